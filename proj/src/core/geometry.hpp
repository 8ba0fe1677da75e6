// Manifold models (unit 2-sphere, unit flat 2-torus), chart frames,
// manifold and fiber quadrature rules, and the spherical-integral
// identities used to validate them.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "core/mathutil.hpp"

namespace ncx::geo {

enum class ManifoldKind { Sphere2, Torus2 };

std::string to_string(ManifoldKind k);
ManifoldKind manifold_from_string(const std::string& s);

// Chart coordinates: torus (u,v) in [0,1)^2; sphere u = colatitude in
// (0, pi), v = longitude in [0, 2pi).
struct ChartPoint {
  double u = 0;
  double v = 0;
};

// Colatitude closer than this to a pole is outside the working chart.
// The two excluded caps have total area ~ pi*eps^2 < 1e-12 * vol(S^2).
constexpr double kPoleEps = 1e-6;

struct ManifoldModel {
  ManifoldKind kind = ManifoldKind::Torus2;
  static constexpr int dim = 2;
  double volume() const { return kind == ManifoldKind::Sphere2 ? 4.0 * kPi : 1.0; }
};

Eigen::Vector3d sphere_embed(const ChartPoint& x);

// Orthonormal frame (e_colat, e_lon) at a sphere point; throws errc::domain
// inside the polar caps (callers there must rotate to another chart).
void sphere_frame(const ChartPoint& x, Eigen::Vector3d& e1, Eigen::Vector3d& e2);

struct QuadratureNode {
  ChartPoint x;
  double weight = 0;
};

struct ManifoldQuadrature {
  ManifoldModel model;
  int resolution = 0;
  std::vector<QuadratureNode> nodes;
  double total_weight() const;
};

// Torus: uniform resolution^2 grid, exact for trigonometric polynomials
// below the grid Nyquist. Sphere: Gauss-Legendre in cos(colat) x uniform
// longitude, exact for spherical polynomials of degree < resolution.
ManifoldQuadrature build_manifold_quadrature(const ManifoldModel& model, int resolution);

struct FiberQuadrature {
  int K = 0;
  double weight = 0;                    // s_{n-1}/K per node
  std::vector<double> angles;           // frame angles
  std::vector<Eigen::Vector2d> dirs;    // unit vectors in the frame at x
};

// K equally spaced directions with a deterministic per-point angular offset
// (decorrelates quadrature artifacts across nodes).
FiberQuadrature fiber_directions(const ManifoldModel& model, const ChartPoint& x, int K);

// Max deviation of the sphere change-of-variables identity
// int h(v/|L^-1 v|) dv = int h(Lu) det(L)/|Lu|^n du over a battery of
// polynomial h, under K-node quadrature on S^1.
double sphere_change_check(const Eigen::Matrix2d& L, int K);

// Product quadrature on S^{n-1}, n in {2,3,4}: pairs (direction, weight).
std::vector<std::pair<Eigen::VectorXd, double>> sphere_surface_quadrature(int n, int K);

// s_{d-2} * int_0^pi h(cos t) sin^{d-2} t dt = int_{S^{d-1}} h(<e1, v>) dv,
// with an npts-point Gauss-Legendre rule in t.
double zonal_integral(int d, const std::function<double(double)>& h, int npts);

struct MomentCheck {
  std::string name;
  double quadrature = 0;
  double closed_form = 0;
  double deviation = 0;
};

struct MomentReport {
  std::vector<MomentCheck> checks;
  double max_deviation = 0;
};

// Evaluates each closed-form spherical moment identity against its
// quadrature counterpart on S^{n-1}: projection moments |x|^q beta(n,q),
// the bilinear trace identity, |Av|^4, the (X.v)^3 (Y.v) moment, and the
// H4 average.
MomentReport spherical_moment_suite(int n, const Eigen::MatrixXd& A, const Eigen::VectorXd& x,
                                    int K);

}  // namespace ncx::geo
