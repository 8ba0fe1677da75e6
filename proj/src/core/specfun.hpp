// Polynomials, constants and combinatorial formulas behind the chaos
// expansion of the nodal measure: probabilists' Hermite and generalized
// Laguerre polynomials, the sphere constants s_n and beta(n,q), the chi
// expansion coefficients c_chi / A(n,q), the weight Theta(a,b), the Laguerre
// bridge constant c_{d,q}, and the four-Hermite diagram formula with its
// brute-force Wick oracle.
#pragma once

#include <array>

#include "core/mathutil.hpp"
#include "core/rational.hpp"

namespace ncx::specfun {

// Degrees above this lose too much precision in double arithmetic.
constexpr int kMaxDegree = 64;

// H_q(x) in the probabilists' convention: H_{q+1} = x H_q - q H_{q-1}.
double hermite(int q, double x);

// Monomial coefficients of H_q, index = power of x. Derived from the
// generating function e^{tx - t^2/2}.
std::vector<double> hermite_coeffs(int q);

// H_{2a}(0) = (-1)^a (2a)!/(2^a a!).
double hermite_at_zero(int a);

// Generalized Laguerre L_k^{(alpha)}(x) by the three-term recurrence.
double laguerre(int k, double alpha, double x);

// s_n = vol_n(S^n) = 2 pi^{(n+1)/2} / Gamma((n+1)/2).
double sphere_area(int n);

// beta(n,q) = \int_{S^{n-1}} |v_1|^q dv = 2 pi^{(n-1)/2} Gamma((q+1)/2)/Gamma((q+n)/2).
double beta_const(int n, int q);

// Coefficient of H_{2b} in the chaos expansion of |gamma|, gamma ~ N(0,1).
double c_chi(int b);

// A(n,2b) = (pi / s_n) c_chi(2b).
double a_coeff(int n, int b);

// Theta(a,b) = (-1)^{a+b-1} / (2^{a+b} (2b-1) a! b!). The b = 0 case rides on
// (2b-1) = -1; no special-casing.
double theta(int a, int b);
Rational theta_exact(int a, int b);

// Constant linking Laguerre polynomials to spherical Hermite averages:
// L_{q/2}^{(d/2-1)}(|x|^2/2) = c_{d,q} * S_{d,q}(x). q must be even.
double c_dq(int d, int q);

// S_{d,q}(x) = \int_{S^{d-1}} H_q(<x,v>) dv, via monomial expansion and
// the beta(d,j) moments. Closed form; the quadrature counterpart lives in
// the geometry module.
double s_dq(int d, int q, double xnorm);

struct DiagramArgs {
  int a = 0, b = 0, a2 = 0, b2 = 0;       // Hermite degrees
  double c13 = 0, c14 = 0, c23 = 0, c24 = 0;  // correlations, |c| <= 1
};

// E[H_a(g1) H_b(g2) H_{a'}(g3) H_{b'}(g4)] for jointly standard Gaussians
// with C12 = C34 = 0; zero unless a + b = a' + b'.
double diagram4(const DiagramArgs& args);
Rational diagram4_exact(int a, int b, int a2, int b2, const Rational& c13, const Rational& c14,
                        const Rational& c23, const Rational& c24);

// Brute-force diagram enumeration of E[prod_i H_{deg_i}(g_i)] for four
// jointly standard Gaussians with covariance cov (unit diagonal). Test
// oracle for diagram4; sums over all symmetric K with zero diagonal and
// row sums equal to the degrees.
double wick_oracle(const std::array<int, 4>& deg, const std::array<double, 16>& cov);
Rational wick_oracle_exact(const std::array<int, 4>& deg, const std::array<Rational, 16>& cov);

// kappa(a,b,a',b') = sum_k sigma(a,b,a',b',k) from the covariance formula;
// bounded by q! with q = 2a+2b (Vandermonde).
BigInt kappa_exact(int a, int b, int a2, int b2);

// Left side sum_{2a+2b=2a'+2b'=q} |Theta(a,b) Theta(a',b')| q! and right
// side 2^q; sum <= bound with equality only at q = 0.
struct CoefficientBound {
  double sum = 0;
  double bound = 0;
};
CoefficientBound coefficient_bound(int q);
std::pair<Rational, Rational> coefficient_bound_exact(int q);

}  // namespace ncx::specfun
