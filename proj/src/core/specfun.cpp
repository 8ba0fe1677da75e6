#include "core/specfun.hpp"

#include <algorithm>
#include <cmath>

namespace ncx::specfun {

namespace {

void check_degree(int q, const char* who) {
  if (q < 0) throw Error(errc::invalid_argument, std::string(who) + ": negative degree");
  if (q > kMaxDegree) throw Error(errc::domain, std::string(who) + ": degree too large (cap 64)");
}

}  // namespace

double hermite(int q, double x) {
  check_degree(q, "hermite");
  double p0 = 1.0;
  if (q == 0) return p0;
  double p1 = x;
  for (int k = 1; k < q; ++k) {
    const double p2 = x * p1 - k * p0;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

std::vector<double> hermite_coeffs(int q) {
  check_degree(q, "hermite_coeffs");
  // H_q(x) = q! sum_j (-1/2)^j x^{q-2j} / (j! (q-2j)!)
  std::vector<double> c(q + 1, 0.0);
  const double qf = factorial(q);
  double half_pow = 1.0;
  for (int j = 0; 2 * j <= q; ++j) {
    c[q - 2 * j] = qf * half_pow / (factorial(j) * factorial(q - 2 * j));
    half_pow *= -0.5;
  }
  return c;
}

double hermite_at_zero(int a) {
  check_degree(2 * a, "hermite_at_zero");
  double r = (a % 2 == 0) ? 1.0 : -1.0;
  r *= factorial(2 * a) / (std::pow(2.0, a) * factorial(a));
  return r;
}

double laguerre(int k, double alpha, double x) {
  check_degree(k, "laguerre");
  double p0 = 1.0;
  if (k == 0) return p0;
  double p1 = 1.0 + alpha - x;
  for (int m = 1; m < k; ++m) {
    const double p2 = ((2.0 * m + 1.0 + alpha - x) * p1 - (m + alpha) * p0) / (m + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double sphere_area(int n) {
  if (n < 0) throw Error(errc::invalid_argument, "sphere_area: n < 0");
  return 2.0 * std::pow(kPi, 0.5 * (n + 1)) / gamma_pos(0.5 * (n + 1));
}

double beta_const(int n, int q) {
  if (n < 1) throw Error(errc::invalid_argument, "beta_const: n < 1");
  if (q < 0) throw Error(errc::invalid_argument, "beta_const: q < 0");
  return 2.0 * std::pow(kPi, 0.5 * (n - 1)) * gamma_pos(0.5 * (q + 1)) / gamma_pos(0.5 * (q + n));
}

double c_chi(int b) {
  check_degree(2 * b, "c_chi");
  // (-1)^{b-1} / (2^{b-1} sqrt(2 pi) (2b-1) b!), with (2b-1) = -1 at b = 0.
  const double sign = ((b - 1) % 2 == 0) ? 1.0 : -1.0;
  return sign / (std::pow(2.0, b - 1) * std::sqrt(2.0 * kPi) * (2.0 * b - 1.0) * factorial(b));
}

double a_coeff(int n, int b) {
  return kPi / sphere_area(n) * c_chi(b);
}

double theta(int a, int b) {
  check_degree(2 * (a + b), "theta");
  const double sign = ((a + b - 1) % 2 == 0) ? 1.0 : -1.0;
  return sign / (std::pow(2.0, a + b) * (2.0 * b - 1.0) * factorial(a) * factorial(b));
}

Rational theta_exact(int a, int b) {
  if (a < 0 || b < 0) throw Error(errc::invalid_argument, "theta_exact: negative degree");
  const int s = (a + b - 1) & 1 ? -1 : 1;
  Rational den = Rational(big_pow2(a + b) * (2 * b - 1) * big_factorial(a) * big_factorial(b));
  return Rational(s) / den;
}

double c_dq(int d, int q) {
  if (d < 1) throw Error(errc::invalid_argument, "c_dq: d < 1");
  if (q < 0 || q % 2 != 0) throw Error(errc::invalid_argument, "c_dq: q must be even and >= 0");
  check_degree(q, "c_dq");
  const int h = q / 2;
  // (d/2)(d/2+1)...(d/2+h-1) = Gamma(h + d/2)/Gamma(d/2)
  double rising = 1.0;
  for (int j = 0; j < h; ++j) rising *= 0.5 * d + j;
  const double sign = (h % 2 == 0) ? 1.0 : -1.0;
  return rising * sign / (factorial(h) * double_factorial_odd(q - 1) * sphere_area(d - 1));
}

double s_dq(int d, int q, double xnorm) {
  check_degree(q, "s_dq");
  const auto coeffs = hermite_coeffs(q);
  double sum = 0.0;
  double xp = 1.0;
  for (int j = 0; j <= q; ++j) {
    if (j % 2 == 0 && coeffs[j] != 0.0) sum += coeffs[j] * xp * beta_const(d, j);
    xp *= xnorm;
  }
  return sum;
}

double diagram4(const DiagramArgs& g) {
  const int a = g.a, b = g.b, a2 = g.a2, b2 = g.b2;
  if (a < 0 || b < 0 || a2 < 0 || b2 < 0)
    throw Error(errc::invalid_argument, "diagram4: negative degree");
  check_degree(std::max({a, b, a2, b2}), "diagram4");
  if (a + b != a2 + b2) return 0.0;
  const int klo = std::max(0, a2 - b);
  const int khi = std::min(a, a2);
  if (klo > khi) return 0.0;
  double sum = 0.0;
  for (int k = klo; k <= khi; ++k) {
    const double num = std::pow(g.c13, k) * std::pow(g.c14, a - k) * std::pow(g.c23, a2 - k) *
                       std::pow(g.c24, b - a2 + k);
    sum += num / (factorial(k) * factorial(a - k) * factorial(a2 - k) * factorial(b - a2 + k));
  }
  return factorial(a) * factorial(b) * factorial(a2) * factorial(b2) * sum;
}

Rational diagram4_exact(int a, int b, int a2, int b2, const Rational& c13, const Rational& c14,
                        const Rational& c23, const Rational& c24) {
  if (a < 0 || b < 0 || a2 < 0 || b2 < 0)
    throw Error(errc::invalid_argument, "diagram4_exact: negative degree");
  if (a + b != a2 + b2) return 0;
  const int klo = std::max(0, a2 - b);
  const int khi = std::min(a, a2);
  Rational sum = 0;
  for (int k = klo; k <= khi; ++k) {
    Rational term = rat_pow(c13, k) * rat_pow(c14, a - k) * rat_pow(c23, a2 - k) *
                    rat_pow(c24, b - a2 + k);
    term /= Rational(big_factorial(k) * big_factorial(a - k) * big_factorial(a2 - k) *
                     big_factorial(b - a2 + k));
    sum += term;
  }
  return sum * Rational(big_factorial(a) * big_factorial(b) * big_factorial(a2) * big_factorial(b2));
}

namespace {

// Shared enumeration for both oracle flavours. Recurses over the entries
// K_{ij}, i < j, of a symmetric zero-diagonal matrix with row sums = deg,
// accumulating prod C_{ij}^{K_ij} / K_ij!.
template <typename Num>
void wick_recurse(const std::array<int, 4>& legs, const std::array<Num, 16>& cov,
                  const std::array<std::pair<int, int>, 6>& edges, std::size_t e, Num acc,
                  Num& total) {
  if (e == edges.size()) {
    if (legs[0] == 0 && legs[1] == 0 && legs[2] == 0 && legs[3] == 0) total += acc;
    return;
  }
  const auto [i, j] = edges[e];
  const int cap = std::min(legs[i], legs[j]);
  std::array<int, 4> rem = legs;
  Num term = acc;
  for (int k = 0;; ++k) {
    wick_recurse(rem, cov, edges, e + 1, term, total);
    if (k == cap) break;
    rem[i] -= 1;
    rem[j] -= 1;
    term = term * cov[4 * i + j] / Num(k + 1);
  }
}

}  // namespace

double wick_oracle(const std::array<int, 4>& deg, const std::array<double, 16>& cov) {
  for (int d : deg)
    if (d < 0 || d > kMaxDegree) throw Error(errc::invalid_argument, "wick_oracle: bad degree");
  if ((deg[0] + deg[1] + deg[2] + deg[3]) % 2 != 0) return 0.0;
  const std::array<std::pair<int, int>, 6> edges = {
      {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  double total = 0.0;
  wick_recurse<double>(deg, cov, edges, 0, 1.0, total);
  double f = 1.0;
  for (int d : deg) f *= factorial(d);
  return f * total;
}

Rational wick_oracle_exact(const std::array<int, 4>& deg, const std::array<Rational, 16>& cov) {
  for (int d : deg)
    if (d < 0) throw Error(errc::invalid_argument, "wick_oracle_exact: bad degree");
  if ((deg[0] + deg[1] + deg[2] + deg[3]) % 2 != 0) return 0;
  const std::array<std::pair<int, int>, 6> edges = {
      {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  Rational total = 0;
  wick_recurse<Rational>(deg, cov, edges, 0, Rational(1), total);
  BigInt f = 1;
  for (int d : deg) f *= big_factorial(d);
  return Rational(f) * total;
}

BigInt kappa_exact(int a, int b, int a2, int b2) {
  if (a + b != a2 + b2) throw Error(errc::invalid_argument, "kappa_exact: degree mismatch");
  const int A = 2 * a, B = 2 * b, A2 = 2 * a2, B2 = 2 * b2;
  const int klo = std::max(0, A2 - B);
  const int khi = std::min(A, A2);
  const auto binom = [](int n, int k) {
    return big_factorial(n) / (big_factorial(k) * big_factorial(n - k));
  };
  BigInt sum = 0;
  for (int k = klo; k <= khi; ++k) {
    // sigma(a,b,a',b',k) = C(A,k) C(B,A2-k) A2! B2!
    sum += binom(A, k) * binom(B, A2 - k) * big_factorial(A2) * big_factorial(B2);
  }
  return sum;
}

std::pair<Rational, Rational> coefficient_bound_exact(int q) {
  if (q < 0 || q % 2 != 0)
    throw Error(errc::invalid_argument, "coefficient_bound: q must be even and >= 0");
  const int h = q / 2;
  Rational sum = 0;
  for (int a = 0; a <= h; ++a)
    for (int a2 = 0; a2 <= h; ++a2) {
      Rational t = theta_exact(a, h - a) * theta_exact(a2, h - a2);
      if (t < 0) t = -t;
      sum += t;
    }
  sum *= Rational(big_factorial(q));
  return {sum, Rational(big_pow2(q))};
}

CoefficientBound coefficient_bound(int q) {
  auto [sum, bound] = coefficient_bound_exact(q);
  return {static_cast<double>(sum), static_cast<double>(bound)};
}

}  // namespace ncx::specfun
