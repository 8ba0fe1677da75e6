#include "core/variance.hpp"

#include <cmath>

#include "core/specfun.hpp"

namespace ncx::variance {

namespace {

constexpr int kN = 2;

void check_even_q(int q, const char* who) {
  if (q < 0 || q % 2 != 0)
    throw Error(errc::invalid_argument, std::string(who) + ": q must be even and >= 0");
  if (q > 12) throw Error(errc::domain, std::string(who) + ": q capped at 12");
}

// One weighted point pair of the M x M quadrature.
struct Pair {
  geo::ChartPoint x, y;
  double weight = 0;
};

// Quadrature over M x M collapsed along the symmetry the field model admits:
// stationary torus fields depend on x - y only, isotropic sphere fields on
// the angle. Falls back to all node pairs otherwise.
std::vector<Pair> reduced_pairs(const field::SpectralFieldSpec& spec, int resolution) {
  std::vector<Pair> pairs;
  const double vol = spec.manifold.volume();
  if (spec.manifold.kind == geo::ManifoldKind::Torus2 && field::is_stationary(spec)) {
    const auto quad = geo::build_manifold_quadrature(spec.manifold, resolution);
    pairs.reserve(quad.nodes.size());
    for (const auto& n : quad.nodes) pairs.push_back({{0.0, 0.0}, n.x, vol * n.weight});
    return pairs;
  }
  if (spec.manifold.kind == geo::ManifoldKind::Sphere2 && field::is_isotropic(spec)) {
    const auto& gl = gauss_legendre(resolution);
    const geo::ChartPoint x0{0.5 * kPi, 0.0};
    pairs.reserve(gl.x.size());
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double angle = std::acos(gl.x[i]);
      pairs.push_back({x0, {0.5 * kPi, angle}, vol * 2.0 * kPi * gl.w[i]});
    }
    return pairs;
  }
  const auto quad = geo::build_manifold_quadrature(spec.manifold, resolution);
  pairs.reserve(quad.nodes.size() * quad.nodes.size());
  for (const auto& a : quad.nodes)
    for (const auto& b : quad.nodes) pairs.push_back({a.x, b.x, a.weight * b.weight});
  return pairs;
}

std::vector<Pair> all_pairs(const field::SpectralFieldSpec& spec, int resolution) {
  const auto quad = geo::build_manifold_quadrature(spec.manifold, resolution);
  std::vector<Pair> pairs;
  pairs.reserve(quad.nodes.size() * quad.nodes.size());
  for (const auto& a : quad.nodes)
    for (const auto& b : quad.nodes) pairs.push_back({a.x, b.x, a.weight * b.weight});
  return pairs;
}

// Flattened term list of the double chaos covariance at order q:
// coeff * c13^e13 * c14^e14 * c23^e23 * c24^e24, summed over the (a,b),
// (a',b') splits and the diagram index k.
struct DensityTerm {
  int e13, e14, e23, e24;
  double coeff;
};

std::vector<DensityTerm> density_terms(int q) {
  std::vector<DensityTerm> terms;
  const int half = q / 2;
  for (int a = 0; a <= half; ++a) {
    const int b = half - a;
    for (int a2 = 0; a2 <= half; ++a2) {
      const int b2 = half - a2;
      const double tt = specfun::theta(a, b) * specfun::theta(a2, b2);
      const int A = 2 * a, B = 2 * b, A2 = 2 * a2, B2 = 2 * b2;
      const int klo = std::max(0, A2 - B);
      const int khi = std::min(A, A2);
      for (int k = klo; k <= khi; ++k) {
        const double sigma = factorial(A) * factorial(B) * factorial(A2) * factorial(B2) /
                             (factorial(k) * factorial(A - k) * factorial(A2 - k) *
                              factorial(B - A2 + k));
        terms.push_back({k, A - k, A2 - k, B - A2 + k, tt * sigma});
      }
    }
  }
  return terms;
}

// Correlations of (f(x), grad_u f(x), f(y), grad_v f(y)) normalized to unit
// variance, plus the gf-norm weights.
struct PairKernel {
  field::JetCovariance jc;
  field::MetricData mx, my;
  geo::FiberQuadrature fx, fy;
  std::vector<double> ugf, vgf;        // |u|_{gf}, |v|_{gf}
  std::vector<double> c23, c14;        // per u / per v
  Eigen::MatrixXd c24;                 // per (u, v)

  PairKernel(const field::SpectralFieldSpec& spec, const Pair& p, int K)
      : jc(field::cov_jet(spec, p.x, p.y)),
        mx(field::metric_data(spec, p.x)),
        my(field::metric_data(spec, p.y)),
        fx(geo::fiber_directions(spec.manifold, p.x, K)),
        fy(geo::fiber_directions(spec.manifold, p.y, K)) {
    ugf.resize(K);
    vgf.resize(K);
    c23.resize(K);
    c14.resize(K);
    c24.resize(K, K);
    for (int i = 0; i < K; ++i) {
      ugf[i] = std::sqrt(fx.dirs[i].dot(mx.gf * fx.dirs[i]));
      c23[i] = jc.cpx.dot(fx.dirs[i]) / ugf[i];
    }
    for (int j = 0; j < K; ++j) {
      vgf[j] = std::sqrt(fy.dirs[j].dot(my.gf * fy.dirs[j]));
      c14[j] = jc.cpy.dot(fy.dirs[j]) / vgf[j];
    }
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j)
        c24(i, j) = fx.dirs[i].dot(jc.cpp * fy.dirs[j]) / (ugf[i] * vgf[j]);
  }
};

// Fiber-integrated covariance density of order q at one point pair.
double pair_density(const field::SpectralFieldSpec& spec, const Pair& p, int K, int q,
                    const std::vector<DensityTerm>& terms) {
  const PairKernel ker(spec, p, K);
  const double sn2 = specfun::sphere_area(kN) * specfun::sphere_area(kN);
  std::vector<double> p13(q + 1), p14(q + 1), p23(q + 1), p24(q + 1);
  p13[0] = 1.0;
  for (int e = 1; e <= q; ++e) p13[e] = p13[e - 1] * ker.jc.c;
  double total = 0;
  for (int i = 0; i < K; ++i) {
    p23[0] = 1.0;
    for (int e = 1; e <= q; ++e) p23[e] = p23[e - 1] * ker.c23[i];
    for (int j = 0; j < K; ++j) {
      p14[0] = 1.0;
      p24[0] = 1.0;
      for (int e = 1; e <= q; ++e) {
        p14[e] = p14[e - 1] * ker.c14[j];
        p24[e] = p24[e - 1] * ker.c24(i, j);
      }
      double s = 0;
      for (const auto& t : terms) s += t.coeff * p13[t.e13] * p14[t.e14] * p23[t.e23] * p24[t.e24];
      total += s * ker.ugf[i] * ker.vgf[j];
    }
  }
  return total * ker.fx.weight * ker.fy.weight / sn2;
}

double var_exact_over(const field::SpectralFieldSpec& spec, int q, int K,
                      const std::vector<Pair>& pairs) {
  const auto terms = density_terms(q);
  std::vector<double> contrib(pairs.size());
  parallel_for(pairs.size(), 0, [&](std::size_t i) {
    contrib[i] = pairs[i].weight * pair_density(spec, pairs[i], K, q, terms);
  });
  return pairwise_sum(contrib);
}

double var_bound_over(const field::SpectralFieldSpec& spec, int q,
                      const std::vector<Pair>& pairs) {
  std::vector<double> contrib(pairs.size());
  parallel_for(pairs.size(), 0, [&](std::size_t i) {
    const auto& p = pairs[i];
    const auto mx = field::metric_data(spec, p.x);
    const auto my = field::metric_data(spec, p.y);
    const auto jc = field::cov_jet(spec, p.x, p.y);
    const double jn = field::jet_norm(jc, mx, my);
    contrib[i] = p.weight * mx.lambda_x * my.lambda_x / kN * std::pow(jn, q);
  });
  return std::pow(2.0, q) * pairwise_sum(contrib);
}

void require_unit_variance(const field::SpectralFieldSpec& spec, const char* who) {
  if (!spec.unit_variance)
    throw Error(errc::domain, std::string(who) + ": requires a unit-variance spec");
}

// 1 - lambda_i^2 / lambda^2 per mode: the eigenvalue-operator multiplier.
std::vector<double> l_multipliers(const field::SpectralFieldSpec& spec) {
  const double lambda2 = field::lambda2_spectral(spec);
  std::vector<double> rho(spec.modes.size());
  for (std::size_t i = 0; i < spec.modes.size(); ++i)
    rho[i] = 1.0 - spec.modes[i].eigenvalue / lambda2;
  return rho;
}

// Covariance blocks with and without the eigenvalue operator, as mode sums.
struct LPairJet {
  double C = 0, L1C = 0, L12C = 0;       // L2C = L1C for spectral covariances
  Eigen::Vector2d dX = Eigen::Vector2d::Zero();   // gradient in x (frame at x)
  Eigen::Vector2d dY = Eigen::Vector2d::Zero();   // gradient in y (frame at y)
  Eigen::Vector2d L1dY = Eigen::Vector2d::Zero();
  Eigen::Vector2d L2dX = Eigen::Vector2d::Zero();
  Eigen::Matrix2d ddXY = Eigen::Matrix2d::Zero();
};

LPairJet l_pair_jet(const field::SpectralFieldSpec& spec, const std::vector<double>& rho,
                    const geo::ChartPoint& x, const geo::ChartPoint& y) {
  LPairJet out;
  double vx, vy;
  Eigen::Vector2d gx, gy;
  for (int i = 0; i < spec.n_modes(); ++i) {
    const double w = spec.modes[i].std * spec.modes[i].std;
    field::eval_mode(spec, i, x, vx, gx);
    field::eval_mode(spec, i, y, vy, gy);
    out.C += w * vx * vy;
    out.L1C += w * rho[i] * vx * vy;
    out.L12C += w * rho[i] * rho[i] * vx * vy;
    out.dX += w * gx * vy;
    out.dY += w * vx * gy;
    out.L1dY += w * rho[i] * vx * gy;
    out.L2dX += w * rho[i] * gx * vy;
    out.ddXY += w * gx * gy.transpose();
  }
  return out;
}

double homothetic_lambda_or_throw(const field::SpectralFieldSpec& spec, int resolution,
                                  const char* who) {
  require_unit_variance(spec, who);
  const auto gp = field::global_params(spec, std::min(resolution, 48), 8);
  if (gp.eps > 1e-8)
    throw Error(errc::domain, std::string(who) +
                                  ": requires a homothetic spec (constant gradient covariance); "
                                  "eccentricity " +
                                  format_double(gp.eps));
  return std::sqrt(field::lambda2_spectral(spec));
}

}  // namespace

double cov_density(const field::JetCovariance& jc, const field::MetricData& mx,
                   const field::MetricData& my, const Eigen::Vector2d& u,
                   const Eigen::Vector2d& v, int a, int b, int a2, int b2) {
  if (a < 0 || b < 0 || a2 < 0 || b2 < 0)
    throw Error(errc::invalid_argument, "cov_density: negative index");
  if (a + b != a2 + b2) return 0.0;
  const double ugf = std::sqrt(u.dot(mx.gf * u));
  const double vgf = std::sqrt(v.dot(my.gf * v));
  specfun::DiagramArgs args;
  args.a = 2 * a;
  args.b = 2 * b;
  args.a2 = 2 * a2;
  args.b2 = 2 * b2;
  args.c13 = jc.c;
  args.c14 = jc.cpy.dot(v) / vgf;
  args.c23 = jc.cpx.dot(u) / ugf;
  args.c24 = u.dot(jc.cpp * v) / (ugf * vgf);
  const double sn = specfun::sphere_area(kN);
  return specfun::theta(a, b) * specfun::theta(a2, b2) * specfun::diagram4(args) * ugf * vgf /
         (sn * sn);
}

double var_exact(const field::SpectralFieldSpec& spec, int q, int resolution, int K) {
  check_even_q(q, "var_exact");
  if (q == 0) throw Error(errc::invalid_argument, "var_exact: q >= 2 required");
  require_unit_variance(spec, "var_exact");
  return var_exact_over(spec, q, K, reduced_pairs(spec, resolution));
}

double var_exact_full(const field::SpectralFieldSpec& spec, int q, int resolution, int K) {
  check_even_q(q, "var_exact_full");
  require_unit_variance(spec, "var_exact_full");
  return var_exact_over(spec, q, K, all_pairs(spec, resolution));
}

double var_bound(const field::SpectralFieldSpec& spec, int q, int resolution, int K) {
  check_even_q(q, "var_bound");
  (void)K;  // the norm maximizes over directions exactly
  require_unit_variance(spec, "var_bound");
  return var_bound_over(spec, q, reduced_pairs(spec, resolution));
}

double var_bound_full(const field::SpectralFieldSpec& spec, int q, int resolution, int K) {
  check_even_q(q, "var_bound_full");
  (void)K;
  require_unit_variance(spec, "var_bound_full");
  return var_bound_over(spec, q, all_pairs(spec, resolution));
}

double l_operator_cov(const field::SpectralFieldSpec& spec, const geo::ChartPoint& x,
                      const geo::ChartPoint& y, LWhich which) {
  const auto rho = l_multipliers(spec);
  double vx, vy, sum = 0;
  Eigen::Vector2d gx, gy;
  for (int i = 0; i < spec.n_modes(); ++i) {
    const double w = spec.modes[i].std * spec.modes[i].std;
    field::eval_mode(spec, i, x, vx, gx);
    field::eval_mode(spec, i, y, vy, gy);
    const double mult = which == LWhich::both ? rho[i] * rho[i] : rho[i];
    sum += w * mult * vx * vy;
  }
  return sum;
}

double var2_closed(const field::SpectralFieldSpec& spec, int resolution) {
  const double lambda = homothetic_lambda_or_throw(spec, resolution, "var2_closed");
  const auto rho = l_multipliers(spec);
  const auto pairs = reduced_pairs(spec, resolution);
  std::vector<double> contrib(pairs.size());
  parallel_for(pairs.size(), 0, [&](std::size_t i) {
    const auto pj = l_pair_jet(spec, rho, pairs[i].x, pairs[i].y);
    contrib[i] = pairs[i].weight * pj.L1C * pj.L1C;  // L1C == L2C
  });
  const double dbl_int = pairwise_sum(contrib);
  const double vol = spec.manifold.volume();
  const double sn = specfun::sphere_area(kN);
  const double snm1 = specfun::sphere_area(kN - 1);
  const double L0 = vol * snm1 * lambda / (sn * std::sqrt(static_cast<double>(kN)));
  return L0 * L0 / (2.0 * vol * vol) * dbl_int;
}

double var4_closed(const field::SpectralFieldSpec& spec, int resolution) {
  const double lambda = homothetic_lambda_or_throw(spec, resolution, "var4_closed");
  const auto rho = l_multipliers(spec);
  const auto pairs = reduced_pairs(spec, resolution);
  const double n_l2 = static_cast<double>(kN) / (lambda * lambda);
  const double n2l4 = n_l2 * n_l2;
  const double b4 = 3.0 / (kN * (kN + 2.0));  // fiber-averaged 4th moment beta(n,4)/s_{n-1}
  std::vector<double> contrib(pairs.size());
  parallel_for(pairs.size(), 0, [&](std::size_t i) {
    const auto pj = l_pair_jet(spec, rho, pairs[i].x, pairs[i].y);
    const double C = pj.C;
    const Eigen::Matrix2d A = n_l2 * pj.ddXY;
    const Eigen::Matrix2d AtA = A.transpose() * A;
    const double dY2 = pj.dY.squaredNorm(), dX2 = pj.dX.squaredNorm();
    // E{G(x) G(y)} for G = H4(f) + 2 H3(f) Lf - fiber average of H4(grad):
    double I = 24.0 * std::pow(C, 4);
    I += 72.0 * C * C * pj.L1C * pj.L1C + 24.0 * std::pow(C, 3) * pj.L12C;
    I += 96.0 * std::pow(C, 3) * pj.L1C;
    I -= 24.0 * b4 * n2l4 * (dY2 * dY2 + dX2 * dX2);
    I -= 48.0 * b4 * n2l4 * (dY2 * pj.dY.dot(pj.L1dY) + dX2 * pj.dX.dot(pj.L2dX));
    I += 24.0 * b4 * b4 *
         (2.0 / 3.0 * (AtA * AtA).trace() + 1.0 / 3.0 * AtA.trace() * AtA.trace());
    contrib[i] = pairs[i].weight * I;
  });
  const double dbl_int = pairwise_sum(contrib);
  const double sn = specfun::sphere_area(kN);
  const double snm1 = specfun::sphere_area(kN - 1);
  const double pref = snm1 * lambda / (24.0 * sn * std::sqrt(static_cast<double>(kN)));
  return pref * pref * dbl_int;
}

BerryReport berry_report(const field::SpectralFieldSpec& spec, int resolution) {
  BerryReport rep;
  rep.sigma2 = static_cast<double>(spec.n_modes());
  rep.lambda2 = field::lambda2_spectral(spec);
  double var_mu = 0;
  for (const auto& m : spec.modes) {
    const double d = m.eigenvalue - rep.lambda2;
    var_mu += d * d;
  }
  rep.var_mu = var_mu / rep.sigma2;
  const double sn = specfun::sphere_area(kN);
  const double snm1 = specfun::sphere_area(kN - 1);
  rep.prefactor = snm1 / (2.0 * sn * std::sqrt(static_cast<double>(kN)));
  const auto unit = spec.unit_variance ? spec : field::normalized(spec);
  rep.lhs = var2_closed(unit, resolution) / rep.lambda2;
  // sigma2 counts orthonormal modes, so the squared volume of the expected
  // nodal length enters explicitly (it is one on the unit torus).
  const double vol = spec.manifold.volume();
  rep.spectral_term = 2.0 * rep.prefactor * rep.prefactor * vol * vol / rep.sigma2 *
                      rep.var_mu / (rep.lambda2 * rep.lambda2);
  rep.ratio = rep.spectral_term == 0 ? (rep.lhs == 0 ? 1.0 : std::nan(""))
                                     : rep.lhs / rep.spectral_term;
  return rep;
}

}  // namespace ncx::variance
