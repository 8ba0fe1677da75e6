#include <doctest.h>

#include <cmath>

#include "core/chaos.hpp"
#include "core/specfun.hpp"
#include "testutil.hpp"

using namespace ncx;
using namespace ncx::chaos;
using field::make_anisotropic;
using field::make_arw;
using field::make_band_torus;
using field::make_rsh;
using field::sample_field;

TEST_CASE("zeroth component is the deterministic expectation") {
  {
    const ChaosContext ctx(make_rsh(10), 48, 16);
    const auto s = sample_field(ctx.spec(), 1);
    const double expected = 2.0 * kPi * std::sqrt(55.0);  // vol s_{n-1} lambda / (s_n sqrt(n))
    CHECK(ctx.chaos_q(s, 0, Form::general).value == doctest::Approx(expected).epsilon(1e-10));
  }
  {
    const ChaosContext ctx(make_arw(1), 16, 16);
    const auto s = sample_field(ctx.spec(), 2);
    CHECK(ctx.chaos_q(s, 0, Form::general).value ==
          doctest::Approx(kPi / std::sqrt(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("second chaos of a single-eigenvalue field vanishes per sample") {
  const ChaosContext ctx(make_rsh(5), 48, 8);
  for (uint64_t seed : {11u, 12u, 13u}) {
    const auto s = sample_field(ctx.spec(), seed);
    CHECK(std::abs(ctx.chaos_q(s, 2, Form::general).value) <= 1e-6);
  }
  const ChaosContext tctx(make_arw(5), 24, 8);
  for (uint64_t seed : {14u, 15u}) {
    const auto s = sample_field(tctx.spec(), seed);
    CHECK(std::abs(tctx.chaos_q(s, 2, Form::general).value) <= 1e-10);
  }
}

TEST_CASE("the three integral forms agree on an anisotropic sample") {
  const auto spec = make_anisotropic({{{1, 0}, 1.0}, {{0, 1}, 1.2}, {{1, 1}, 0.3}});
  const ChaosContext ctx(spec, 64, 64);
  const auto s = sample_field(spec, 99);
  for (int q : {2, 4}) {
    const double a = ctx.chaos_q(s, q, Form::general).value;
    const double b = ctx.chaos_q(s, q, Form::lambda_form).value;
    const double c = ctx.chaos_q(s, q, Form::inverse_form).value;
    CHECK(std::abs(a - b) <= 1e-4 * std::max(1.0, std::abs(a)));
    CHECK(std::abs(a - c) <= 1e-4 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("surrogate error scales linearly in the eccentricity for q = 4") {
  std::vector<double> log_eps, log_rms;
  for (double delta : {0.05, 0.1, 0.2}) {
    const auto spec = make_anisotropic({{{1, 0}, 1.0}, {{0, 1}, 1.0 + delta}});
    const ChaosContext ctx(spec, 24, 32);
    const int nsamples = 200;
    std::vector<double> sq(nsamples);
    for (int i = 0; i < nsamples; ++i) {
      const auto s = sample_field(spec, 4200 + i);
      const double d = ctx.chaos_q(s, 4, Form::general).value - ctx.tilde_q(s, 4).value;
      sq[i] = d * d;
    }
    log_eps.push_back(std::log(ctx.params().eps));
    log_rms.push_back(std::log(std::sqrt(pairwise_sum(sq) / nsamples)));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log_eps.size(); ++i) {
    sx += log_eps[i];
    sy += log_rms[i];
    sxx += log_eps[i] * log_eps[i];
    sxy += log_eps[i] * log_rms[i];
  }
  const double n = 3.0;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(std::abs(slope - 1.0) <= 0.2);
}

TEST_CASE("form deviation halves when resolution and fiber double") {
  const auto spec = make_anisotropic({{{1, 0}, 1.0}, {{0, 1}, 1.35}});
  const auto s = sample_field(spec, 7);
  auto dev = [&](int res, int K) {
    const ChaosContext ctx(spec, res, K);
    const double a = ctx.chaos_q(s, 4, Form::general).value;
    const double c = ctx.chaos_q(s, 4, Form::inverse_form).value;
    return std::abs(a - c);
  };
  const double d1 = dev(8, 4);
  const double d2 = dev(16, 8);
  CHECK(d2 <= std::max(0.5 * d1, 5e-14));
}

TEST_CASE("homothetic coincidence of the surrogate") {
  const ChaosContext ctx(normalized(make_band_torus({1, 5})), 24, 16);
  for (uint64_t seed : {21u, 22u, 23u}) {
    const auto s = sample_field(ctx.spec(), seed);
    for (int q : {2, 4}) {
      const double general = ctx.chaos_q(s, q, Form::general).value;
      const double tilde = ctx.tilde_q(s, q).value;
      CHECK(std::abs(general - tilde) <= 1e-8 * std::max(1.0, std::abs(general)));
    }
  }
  // Sphere bands over whole eigenspaces are homothetic as well.
  const ChaosContext sctx(normalized(field::make_band_sphere({3, 5})), 48, 16);
  for (uint64_t seed : {24u, 25u}) {
    const auto s = sample_field(sctx.spec(), seed);
    for (int q : {2, 4}) {
      const double general = sctx.chaos_q(s, q, Form::general).value;
      const double tilde = sctx.tilde_q(s, q).value;
      CHECK(std::abs(general - tilde) <= 1e-8 * std::max(1.0, std::abs(general)));
    }
  }
}

TEST_CASE("surrogate is invariant under the unit-variance normalization") {
  // For a constant-variance field phi = sigma f the surrogate sees only
  // phi/sigma and lambda^{-1} grad phi / sigma, so raw and normalized specs
  // give the same values on matching draws.
  const auto raw = make_band_torus({1, 5});
  const auto unit = normalized(raw);
  const ChaosContext raw_ctx(raw, 24, 16);
  const ChaosContext unit_ctx(unit, 24, 16);
  for (uint64_t seed : {61u, 62u}) {
    const auto s_raw = sample_field(raw, seed);
    const auto s_unit = sample_field(unit, seed);
    for (int q : {0, 2, 4})
      CHECK(raw_ctx.tilde_q(s_raw, q).value ==
            doctest::Approx(unit_ctx.tilde_q(s_unit, q).value).epsilon(1e-10));
  }
}

TEST_CASE("closed second-chaos forms") {
  const ChaosContext ctx(normalized(make_band_torus({1, 5})), 24, 8);
  for (uint64_t seed : {31u, 32u, 33u}) {
    const auto s = sample_field(ctx.spec(), seed);
    const double quad = ctx.closed2(s).value;
    const double spectral = ctx.closed2_spectral(s);
    CHECK(std::abs(quad - spectral) <= 1e-10 * std::max(1.0, std::abs(spectral)));
    // closed2 equals the homothetic surrogate at q = 2.
    CHECK(ctx.tilde_q(s, 2).value == doctest::Approx(quad).epsilon(1e-8));
  }
  // Single-eigenvalue cancellation is exact in the spectral form.
  const ChaosContext actx(make_arw(5), 16, 8);
  for (uint64_t seed : {41u, 42u}) {
    const auto s = sample_field(actx.spec(), seed);
    CHECK(actx.closed2_spectral(s) == 0.0);
  }
  // Zero coefficient vector.
  field::FieldSample zero;
  zero.coeffs.assign(ctx.spec().modes.size(), 0.0);
  CHECK(ctx.closed2(zero).value == 0.0);
}

TEST_CASE("closed fourth-chaos form") {
  const ChaosContext ctx(make_arw(5), 24, 16);
  field::FieldSample zero;
  zero.coeffs.assign(ctx.spec().modes.size(), 0.0);
  CHECK(std::abs(ctx.closed4(zero).value) <= 1e-13);

  for (uint64_t seed : {51u, 52u, 53u}) {
    const auto s = sample_field(ctx.spec(), seed);
    const double c4 = ctx.closed4(s).value;
    CHECK(std::abs(c4 - ctx.tilde_q(s, 4).value) <= 1e-6 * std::max(1.0, std::abs(c4)));
    CHECK(std::abs(c4 - ctx.chaos_q(s, 4, Form::general).value) <=
          1e-6 * std::max(1.0, std::abs(c4)));
  }

  // Chaos components of positive order are centered.
  const int nsamples = 500;
  std::vector<double> vals(nsamples);
  for (int i = 0; i < nsamples; ++i) vals[i] = ctx.closed4(sample_field(ctx.spec(), 600 + i)).value;
  double mean = 0, var = 0;
  for (double v : vals) mean += v;
  mean /= nsamples;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= (nsamples - 1);
  CHECK(std::abs(mean) <= 4.0 * std::sqrt(var / nsamples));
}

TEST_CASE("chaos components of different order are uncorrelated") {
  const ChaosContext ctx(normalized(make_band_torus({1, 5})), 24, 8);
  const int nsamples = 500;
  std::vector<double> c2(nsamples), c4(nsamples);
  for (int i = 0; i < nsamples; ++i) {
    const auto s = sample_field(ctx.spec(), 3000 + i);
    c2[i] = ctx.closed2_spectral(s);
    c4[i] = ctx.closed4(s).value;
  }
  double m2 = 0, m4 = 0;
  for (int i = 0; i < nsamples; ++i) {
    m2 += c2[i];
    m4 += c4[i];
  }
  m2 /= nsamples;
  m4 /= nsamples;
  double cov = 0, v22 = 0;
  for (int i = 0; i < nsamples; ++i) {
    const double a = c2[i] - m2, b = c4[i] - m4;
    cov += a * b;
    v22 += a * a * b * b;
  }
  cov /= nsamples;
  const double se = std::sqrt((v22 / nsamples - cov * cov) / nsamples);
  CHECK(std::abs(cov) <= 4.0 * se);
}

TEST_CASE("chi partial sums") {
  // Q = 0 reproduces the chi mean in three dimensions.
  const Eigen::VectorXd xi = Eigen::Vector3d{0.3, -1.0, 0.2};
  const double q0 = chi_partial(xi, Eigen::Matrix3d::Identity(), 0, 64);
  CHECK(q0 == doctest::Approx(2.0 * std::sqrt(2.0 / kPi)).epsilon(1e-9));

  // One-dimensional reduction: partial sums of the |gamma| expansion.
  for (double g : {0.1, 0.7, -1.3}) {
    Eigen::VectorXd x1(1);
    x1 << g;
    Eigen::MatrixXd G1(1, 1);
    G1 << 1.0;
    for (int Q : {0, 2, 4, 6}) {
      double expected = 0;
      for (int b = 0; 2 * b <= Q; ++b)
        expected += specfun::c_chi(b) * specfun::hermite(2 * b, g);
      CHECK(chi_partial(x1, G1, Q, 8) == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  // Monte Carlo projection property: L2 error decreases in Q.
  const int ndraw = 20000;
  std::array<double, 4> err{};
  const std::array<int, 4> Qs{0, 2, 4, 6};
  for (int i = 0; i < ndraw; ++i) {
    Eigen::Vector3d g;
    for (int k = 0; k < 3; ++k) g[k] = normal_draw(97, i, k);
    const double norm = g.norm();
    for (std::size_t qi = 0; qi < Qs.size(); ++qi) {
      const double d = norm - chi_partial(g, Eigen::Matrix3d::Identity(), Qs[qi], 48);
      err[qi] += d * d;
    }
  }
  for (std::size_t qi = 1; qi < Qs.size(); ++qi) CHECK(err[qi] < err[qi - 1]);

  // General covariance path at Q = 0: matches the direct sphere average of
  // sqrt(v^T G v) scaled by A(n, 0).
  Eigen::Matrix2d G2;
  G2 << 2.0, 0.3, 0.3, 1.0;
  const Eigen::VectorXd x2 = Eigen::Vector2d{0.5, 0.5};
  double avg = 0;
  const auto nodes = geo::sphere_surface_quadrature(2, 128);
  for (const auto& [v, w] : nodes) avg += w * std::sqrt(v.dot(G2 * v));
  CHECK(chi_partial(x2, G2, 0, 128) == doctest::Approx(specfun::a_coeff(2, 0) * avg).epsilon(1e-12));

  // Anisotropic covariance: partial sums still project, so the Monte Carlo
  // L2 error decreases in Q.
  const Eigen::LLT<Eigen::Matrix2d> llt(G2);
  const Eigen::Matrix2d chol = llt.matrixL();
  std::array<double, 3> gerr{};
  const std::array<int, 3> gQs{0, 2, 4};
  const int ngdraw = 4000;
  for (int i = 0; i < ngdraw; ++i) {
    Eigen::Vector2d z{normal_draw(131, i, 0), normal_draw(131, i, 1)};
    const Eigen::VectorXd g = chol * z;  // g ~ N(0, G2)
    for (std::size_t qi = 0; qi < gQs.size(); ++qi) {
      const double d = g.norm() - chi_partial(g, G2, gQs[qi], 64);
      gerr[qi] += d * d;
    }
  }
  for (std::size_t qi = 1; qi < gQs.size(); ++qi) CHECK(gerr[qi] < gerr[qi - 1]);
}

TEST_CASE("level factors") {
  CHECK(level_factor(0.0, 0) == 1.0);
  CHECK(level_factor(0.0, 3) == doctest::Approx(1.0));
  CHECK(level_factor(1.0, 0) == doctest::Approx(std::exp(-0.5)));
  CHECK(level_factor(1.0, 1) == doctest::Approx(0.0));

  // Level scaling of the deterministic component.
  const ChaosContext ctx(make_arw(1), 16, 8);
  const auto s = sample_field(ctx.spec(), 5);
  const double base = ctx.chaos_q(s, 0, Form::general).value;
  const double at1 = ctx.chaos_q(s, 0, Form::general, 1.0).value;
  CHECK(at1 == doctest::Approx(std::exp(-0.5) * base).epsilon(1e-13));
}

TEST_CASE("odd q and bad forms are rejected") {
  const ChaosContext ctx(make_arw(1), 16, 8);
  const auto s = sample_field(ctx.spec(), 6);
  CHECK_THROWS_AS(ctx.chaos_q(s, 3, Form::general), Error);
  CHECK_THROWS_AS(ctx.chaos_q(s, 14, Form::general), Error);
  CHECK_THROWS_AS(ctx.chaos_q(s, 2, Form::closed2), Error);
}
