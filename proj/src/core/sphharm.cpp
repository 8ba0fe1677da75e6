#include "core/sphharm.hpp"

#include <cmath>

namespace ncx::sph {

void legendre_p(int l, double t, double& P, double& dP, double& ddP) {
  if (l < 0) throw Error(errc::invalid_argument, "legendre_p: l < 0");
  double p0 = 1.0, p1 = t;
  if (l == 0) {
    P = 1.0;
    dP = 0.0;
    ddP = 0.0;
    return;
  }
  for (int k = 1; k < l; ++k) {
    const double p2 = ((2.0 * k + 1.0) * t * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  P = p1;
  const double om = 1.0 - t * t;
  if (om < 1e-14) {
    // Endpoint closed forms.
    const double sl = (t > 0) ? 1.0 : ((l - 1) % 2 == 0 ? 1.0 : -1.0);
    dP = sl * 0.5 * l * (l + 1.0);
    const double s2 = (t > 0) ? 1.0 : (l % 2 == 0 ? 1.0 : -1.0);
    ddP = s2 * 0.125 * (l - 1.0) * l * (l + 1.0) * (l + 2.0);
    return;
  }
  dP = l * (p0 - t * p1) / om;
  ddP = (2.0 * t * dP - l * (l + 1.0) * p1) / om;
}

namespace {

// Orthonormalized associated Legendre Q_{l m}(cos t) = N_{l m} P_l^m(cos t)
// and the theta-derivative, m >= 0. Stable three-term recurrences on the
// normalized functions.
void norm_assoc_legendre(int l, int m, double ct, double st, double& Q, double& dQ) {
  double qmm = std::sqrt(1.0 / (4.0 * kPi));
  for (int k = 0; k < m; ++k) qmm *= -std::sqrt((2.0 * k + 3.0) / (2.0 * k + 2.0)) * st;
  if (l == m) {
    Q = qmm;
    dQ = (m == 0) ? 0.0 : (m * ct / st) * qmm;
    return;
  }
  double qprev = qmm;                                      // Q_{m,m}
  double qcur = ct * std::sqrt(2.0 * m + 3.0) * qmm;       // Q_{m+1,m}
  for (int k = m + 2; k <= l; ++k) {
    const double a = std::sqrt((4.0 * k * k - 1.0) / (static_cast<double>(k) * k - m * m));
    const double b = std::sqrt(((2.0 * k + 1.0) * ((k - 1.0) * (k - 1.0) - m * m)) /
                               ((2.0 * k - 3.0) * (static_cast<double>(k) * k - m * m)));
    const double qnext = a * ct * qcur - b * qprev;
    qprev = qcur;
    qcur = qnext;
  }
  Q = qcur;
  const double c = std::sqrt((2.0 * l + 1.0) * (static_cast<double>(l) * l - m * m) / (2.0 * l - 1.0));
  dQ = (l * ct * qcur - c * qprev) / st;
}

}  // namespace

void real_sph_harm(int l, int m, const geo::ChartPoint& x, double& value,
                   Eigen::Vector2d& grad) {
  if (l < 0 || std::abs(m) > l) throw Error(errc::invalid_argument, "real_sph_harm: bad (l, m)");
  if (x.u < geo::kPoleEps || x.u > kPi - geo::kPoleEps)
    throw Error(errc::domain, "real_sph_harm: point inside the excluded polar cap");
  const double ct = std::cos(x.u), st = std::sin(x.u);
  const int ma = std::abs(m);
  double Q, dQ;
  norm_assoc_legendre(l, ma, ct, st, Q, dQ);
  if (m == 0) {
    value = Q;
    grad = {dQ, 0.0};
    return;
  }
  const double s2 = std::sqrt(2.0);
  const double arg = ma * x.v;
  if (m > 0) {
    value = s2 * Q * std::cos(arg);
    grad = {s2 * dQ * std::cos(arg), -s2 * Q * ma * std::sin(arg) / st};
  } else {
    value = s2 * Q * std::sin(arg);
    grad = {s2 * dQ * std::sin(arg), s2 * Q * ma * std::cos(arg) / st};
  }
}

}  // namespace ncx::sph
