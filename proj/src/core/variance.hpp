// Exact variance of the chaos components via the four-Hermite covariance
// density, the 2^q covariance bound, closed forms for the second and fourth
// components on closed manifolds, and the quantitative second-chaos
// comparison for random wave bands.
#pragma once

#include "core/field.hpp"

namespace ncx::variance {

// Covariance density of two bi-chaotic components at fiber directions u, v:
// Theta(a,b) Theta(a',b') E[H_{2a} H_{2b} H_{2a'} H_{2b'}] |u|_{gf} |v|_{gf} / s_n^2,
// with the expectation delegated to the diagram formula. Zero unless
// a + b = a' + b'.
double cov_density(const field::JetCovariance& jc, const field::MetricData& mx,
                   const field::MetricData& my, const Eigen::Vector2d& u,
                   const Eigen::Vector2d& v, int a, int b, int a2, int b2);

// Var(L[q]) by quadrature over M x M x fiber x fiber; stationary torus specs
// reduce to a single grid over x - y, isotropic sphere specs to the angle.
double var_exact(const field::SpectralFieldSpec& spec, int q, int resolution, int K);

// Same integral without any reduction (all node pairs); small inputs only.
double var_exact_full(const field::SpectralFieldSpec& spec, int q, int resolution, int K);

// 2^q \iint (lambda(x) lambda(y)/n) |j''C|^q dx dy.
double var_bound(const field::SpectralFieldSpec& spec, int q, int resolution, int K);
double var_bound_full(const field::SpectralFieldSpec& spec, int q, int resolution, int K);

enum class LWhich { first, second, both };

// Spectral evaluation of the eigenvalue operator 1 + Laplacian/lambda^2
// applied to the covariance in one or both slots.
double l_operator_cov(const field::SpectralFieldSpec& spec, const geo::ChartPoint& x,
                      const geo::ChartPoint& y, LWhich which);

// Var(L[2]) = (L[0]^2 / (2 vol^2)) \iint L2C L1C, closed homothetic specs.
double var2_closed(const field::SpectralFieldSpec& spec, int resolution);

// Var(L[4]) from the Hermite representation of the fourth component with the
// exact fiber averages; closed homothetic specs.
double var4_closed(const field::SpectralFieldSpec& spec, int resolution);

struct BerryReport {
  double sigma2 = 0;        // number of modes (spectral dimension)
  double lambda2 = 0;       // average eigenvalue
  double var_mu = 0;        // variance of the spectral measure
  double lhs = 0;           // Var(L[2])/lambda^2 by the exact closed form
  double spectral_term = 0; // prefactor^2 * 2/sigma^2 * var_mu / lambda^4
  double ratio = 0;
  double prefactor = 0;     // s_{n-1} / (2 s_n sqrt(n))
};

// Both sides of the second-chaos identity for a random-wave band spec
// (raw or normalized). Equality holds for homothetic bands.
BerryReport berry_report(const field::SpectralFieldSpec& spec, int resolution);

}  // namespace ncx::variance
