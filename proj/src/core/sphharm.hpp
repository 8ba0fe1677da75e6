// Real fully-normalized spherical harmonics on S^2 and Legendre polynomials,
// with analytic colatitude/longitude derivatives.
#pragma once

#include <Eigen/Dense>

#include "core/geometry.hpp"

namespace ncx::sph {

// P_l(t) with first and second derivatives; |t| must stay away from 1 when
// the derivatives are used downstream near the diagonal.
void legendre_p(int l, double t, double& P, double& dP, double& ddP);

// Orthonormal real harmonic Y_{l m} (m in [-l, l]) at a chart point, with the
// gradient in the (e_colat, e_lon) frame. Sum over m of Y^2 equals
// (2l+1)/(4 pi) at every point.
void real_sph_harm(int l, int m, const geo::ChartPoint& x, double& value,
                   Eigen::Vector2d& grad);

}  // namespace ncx::sph
