#include <doctest.h>

#include <cmath>

#include "core/field.hpp"
#include "core/specfun.hpp"
#include "testutil.hpp"

using namespace ncx;
using namespace ncx::field;
using geo::ChartPoint;

namespace {

ChartPoint random_point(const geo::ManifoldModel& m, uint64_t seed, uint64_t i) {
  if (m.kind == geo::ManifoldKind::Torus2)
    return {ncxtest::uniform(seed, i, 0, 0.0, 1.0), ncxtest::uniform(seed, i, 1, 0.0, 1.0)};
  return {ncxtest::uniform(seed, i, 0, 0.3, kPi - 0.3),
          ncxtest::uniform(seed, i, 1, 0.0, 2.0 * kPi)};
}

}  // namespace

TEST_CASE("random spherical harmonics spec") {
  const auto s1 = make_rsh(1);
  CHECK(s1.n_modes() == 3);
  // C(x, y) = <x, y> for degree one.
  for (int t = 0; t < 10; ++t) {
    const auto x = random_point(s1.manifold, 31, 2 * t);
    const auto y = random_point(s1.manifold, 31, 2 * t + 1);
    const auto jc = cov_jet(s1, x, y);
    CHECK(jc.c == doctest::Approx(geo::sphere_embed(x).dot(geo::sphere_embed(y))).epsilon(1e-12));
    CHECK(cov_jet(s1, x, x).c == doctest::Approx(1.0));
  }
  const auto s10 = make_rsh(10);
  for (int t = 0; t < 5; ++t) {
    const auto x = random_point(s10.manifold, 33, t);
    const auto md = metric_data(s10, x);
    CHECK(std::abs(md.lambda_x * md.lambda_x - 110.0) <= 1e-8);
  }
}

TEST_CASE("arithmetic random wave spec") {
  CHECK(lattice_points(1).size() == 4);
  CHECK(lattice_points(5).size() == 8);
  CHECK(lattice_points(25).size() == 12);
  CHECK_THROWS_AS(make_arw(3), Error);

  const auto a1 = make_arw(1);
  for (int t = 0; t < 10; ++t) {
    const auto x = random_point(a1.manifold, 37, 2 * t);
    const auto y = random_point(a1.manifold, 37, 2 * t + 1);
    const double expected = 0.5 * (std::cos(2 * kPi * (x.u - y.u)) + std::cos(2 * kPi * (x.v - y.v)));
    CHECK(cov_jet(a1, x, y).c == doctest::Approx(expected).epsilon(1e-12));
  }
  const auto md = metric_data(a1, {0.37, 0.81});
  CHECK((md.gf - 2.0 * kPi * kPi * Eigen::Matrix2d::Identity()).norm() <= 1e-10);
  CHECK((md.lam - 2.0 * kPi * Eigen::Matrix2d::Identity()).norm() <= 1e-10);
  CHECK(md.lambda_x == doctest::Approx(2.0 * kPi));

  const auto a5 = make_arw(5);
  const auto gp = global_params(a5, 16, 16);
  CHECK(gp.sigma == doctest::Approx(1.0));
  CHECK(gp.lambda == doctest::Approx(2.0 * kPi * std::sqrt(5.0)));
  CHECK(gp.eps <= 1e-10);
}

TEST_CASE("band specs") {
  const auto b = make_band_torus({1, 5});
  CHECK(b.n_modes() == 12);
  const auto gp_raw = global_params(b, 16, 8);
  CHECK(gp_raw.sigma * gp_raw.sigma == doctest::Approx(12.0));
  const auto bn = normalized(b);
  CHECK(lambda2_spectral(bn) == doctest::Approx(4.0 * kPi * kPi * 44.0 / 12.0));
  const auto gp = global_params(bn, 16, 8);
  CHECK(gp.lambda * gp.lambda == doctest::Approx(4.0 * kPi * kPi * 44.0 / 12.0));
  CHECK(gp.eps <= 1e-10);  // both lattice sets are symmetric under rotation

  // Sphere band over one degree coincides with the rsh constructor.
  const auto bs = normalized(make_band_sphere({4}));
  const auto rs = make_rsh(4);
  for (int t = 0; t < 5; ++t) {
    const auto x = random_point(rs.manifold, 39, 2 * t);
    const auto y = random_point(rs.manifold, 39, 2 * t + 1);
    CHECK(cov_jet(bs, x, y).c == doctest::Approx(cov_jet(rs, x, y).c).epsilon(1e-12));
  }

  // Whole sphere eigenspaces keep the field homothetic and the average
  // frequency equal to the mean eigenvalue.
  const auto sband = normalized(make_band_sphere({3, 5}));
  const auto sgp = global_params(sband, 48, 8);
  CHECK(sgp.eps <= 1e-10);
  const double mean_eig = (7.0 * 12.0 + 11.0 * 30.0) / 18.0;  // weighted by dimension
  CHECK(sgp.lambda * sgp.lambda == doctest::Approx(mean_eig).epsilon(1e-10));
}

TEST_CASE("anisotropic spec eccentricity") {
  const auto iso = make_anisotropic({{{1, 0}, 1.0}, {{0, 1}, 1.0}});
  CHECK(global_params(iso, 12, 8).eps <= 1e-12);

  double prev = 0;
  for (const double delta : {0.05, 0.1, 0.2}) {
    const auto spec = make_anisotropic({{{1, 0}, 1.0}, {{0, 1}, 1.0 + delta}});
    const auto gp = global_params(spec, 12, 8);
    const double s2 = 1.0 + (1.0 + delta) * (1.0 + delta);
    const double hand = std::max(std::abs(std::sqrt(2.0 / s2) - 1.0),
                                 std::abs(std::sqrt(2.0 * (1.0 + delta) * (1.0 + delta) / s2) - 1.0));
    CHECK(std::abs(gp.eps - hand) <= 1e-6);
    CHECK(gp.eps > prev);
    prev = gp.eps;

    // Scale invariance of the eccentricity under a global std rescale.
    const auto scaled = make_anisotropic({{{1, 0}, 3.0}, {{0, 1}, 3.0 * (1.0 + delta)}});
    CHECK(global_params(scaled, 12, 8).eps == doctest::Approx(gp.eps).epsilon(1e-12));
  }
  CHECK_THROWS_AS(make_anisotropic({{{1, 0}, 1.0}, {{2, 0}, 1.0}}), Error);
}

TEST_CASE("sampling is reproducible and normal") {
  const auto spec = make_arw(5);
  const auto s1 = sample_field(spec, 12345);
  const auto s2 = sample_field(spec, 12345);
  CHECK(s1.coeffs == s2.coeffs);
  const auto s3 = sample_field(spec, 12346);
  CHECK(s1.coeffs != s3.coeffs);

  const int nsamples = 10000;
  double mean = 0, var = 0;
  for (int i = 0; i < nsamples; ++i) {
    const auto s = sample_field(spec, 1000 + i);
    mean += s.coeffs[0];
    var += s.coeffs[0] * s.coeffs[0];
  }
  mean /= nsamples;
  var = var / nsamples - mean * mean;
  const double std0 = spec.modes[0].std;
  CHECK(std::abs(mean) <= 4.0 * std0 / std::sqrt(static_cast<double>(nsamples)));
  CHECK(std::abs(var - std0 * std0) <= 0.1 * std0 * std0);

  // Pointwise unit variance by Monte Carlo.
  for (int t = 0; t < 5; ++t) {
    const auto x = random_point(spec.manifold, 41, t);
    double acc = 0;
    for (int i = 0; i < nsamples; ++i) {
      const auto s = sample_field(spec, 50000 + i);
      const double v = eval_jet(spec, s, x).value;
      acc += v * v;
    }
    CHECK(std::abs(acc / nsamples - 1.0) <= 0.05);
  }
}

TEST_CASE("jet evaluation") {
  const auto spec = make_arw(5);
  FieldSample zero;
  zero.seed = 0;
  zero.coeffs.assign(spec.modes.size(), 0.0);
  const auto j0 = eval_jet(spec, zero, {0.2, 0.9});
  CHECK(j0.value == 0.0);
  CHECK(j0.grad.norm() == 0.0);

  // Single orthonormal cos mode: gradient is -2 pi sqrt(2) sin(phase) k.
  SpectralFieldSpec single;
  single.manifold.kind = geo::ManifoldKind::Torus2;
  single.modes.push_back({{0, 2, 1}, 4.0 * kPi * kPi * 5.0, 1.0});
  FieldSample one;
  one.coeffs = {1.0};
  const ChartPoint x{0.23, 0.61};
  const auto j = eval_jet(single, one, x);
  const double phase = 2 * kPi * (2 * x.u + 1 * x.v);
  CHECK(j.value == doctest::Approx(std::sqrt(2.0) * std::cos(phase)));
  const Eigen::Vector2d expected =
      -std::sqrt(2.0) * 2.0 * kPi * std::sin(phase) * Eigen::Vector2d{2.0, 1.0};
  CHECK((j.grad - expected).norm() <= 1e-12);

  // Sphere gradients against central finite differences.
  const auto rsh = make_rsh(6);
  const auto s = sample_field(rsh, 777);
  const double h = 1e-5;
  for (int t = 0; t < 20; ++t) {
    const auto p = random_point(rsh.manifold, 43, t);
    const auto jet = eval_jet(rsh, s, p);
    const double d_colat = (eval_jet(rsh, s, {p.u + h, p.v}).value -
                            eval_jet(rsh, s, {p.u - h, p.v}).value) /
                           (2 * h);
    const double d_lon = (eval_jet(rsh, s, {p.u, p.v + h}).value -
                          eval_jet(rsh, s, {p.u, p.v - h}).value) /
                         (2 * h * std::sin(p.u));
    CHECK(jet.grad[0] == doctest::Approx(d_colat).epsilon(1e-6));
    CHECK(jet.grad[1] == doctest::Approx(d_lon).epsilon(1e-6));
  }
}

TEST_CASE("jet covariance at coincident points and against Monte Carlo") {
  for (const auto& spec : {make_rsh(3), make_arw(5)}) {
    const auto x = random_point(spec.manifold, 47, 1);
    const auto jc = cov_jet(spec, x, x);
    CHECK(jc.c == doctest::Approx(1.0));
    CHECK(jc.cpx.norm() <= 1e-12);
    CHECK(jc.cpy.norm() <= 1e-12);
    CHECK((jc.cpp - metric_data(spec, x).gf).norm() <= 1e-12);
  }

  // Monte Carlo jet covariance at point pairs.
  const auto spec = make_arw(1);
  const int nsamples = 100000;
  for (int t = 0; t < 5; ++t) {
    const auto x = random_point(spec.manifold, 53, 2 * t);
    const auto y = random_point(spec.manifold, 53, 2 * t + 1);
    const auto jc = cov_jet(spec, x, y);
    double acc_c = 0;
    Eigen::Vector2d acc_cpy = Eigen::Vector2d::Zero();
    Eigen::Matrix2d acc_cpp = Eigen::Matrix2d::Zero();
    for (int i = 0; i < nsamples; ++i) {
      const auto s = sample_field(spec, 90000 + i);
      const auto jx = eval_jet(spec, s, x);
      const auto jy = eval_jet(spec, s, y);
      acc_c += jx.value * jy.value;
      acc_cpy += jx.value * jy.grad;
      acc_cpp += jx.grad * jy.grad.transpose();
    }
    const double se = 4.0 / std::sqrt(static_cast<double>(nsamples));
    CHECK(std::abs(acc_c / nsamples - jc.c) <= se);
    CHECK(std::abs(acc_cpy[0] / nsamples - jc.cpy[0]) <= se * 2 * kPi);
    CHECK(std::abs(acc_cpp(0, 1) / nsamples - jc.cpp(0, 1)) <= se * 4 * kPi * kPi);
  }

  // Degree-one sphere field: C''(u, v) = <u, v> through the embedding.
  const auto s1 = make_rsh(1);
  const auto x = random_point(s1.manifold, 59, 0);
  const auto y = random_point(s1.manifold, 59, 1);
  const auto jc = cov_jet(s1, x, y);
  Eigen::Vector3d ex1, ex2, ey1, ey2;
  geo::sphere_frame(x, ex1, ex2);
  geo::sphere_frame(y, ey1, ey2);
  CHECK(jc.cpp(0, 0) == doctest::Approx(ex1.dot(ey1)).epsilon(1e-10));
  CHECK(jc.cpp(0, 1) == doctest::Approx(ex1.dot(ey2)).epsilon(1e-10));
  CHECK(jc.cpp(1, 1) == doctest::Approx(ex2.dot(ey2)).epsilon(1e-10));
}

TEST_CASE("jet covariance symmetry") {
  const auto spec = normalized(make_band_torus({1, 5}));
  for (int t = 0; t < 10; ++t) {
    const auto x = random_point(spec.manifold, 61, 2 * t);
    const auto y = random_point(spec.manifold, 61, 2 * t + 1);
    const auto a = cov_jet(spec, x, y);
    const auto b = cov_jet(spec, y, x);
    CHECK(a.c == doctest::Approx(b.c).epsilon(1e-13));
    CHECK((a.cpx - b.cpy).norm() <= 1e-13);
    CHECK((a.cpy - b.cpx).norm() <= 1e-13);
    CHECK((a.cpp - b.cpp.transpose()).norm() <= 1e-13);
  }
}

TEST_CASE("metric data square root contract") {
  const auto spec = make_anisotropic({{{1, 0}, 1.0}, {{0, 1}, 1.3}, {{1, 1}, 0.4}});
  const auto x = random_point(spec.manifold, 67, 0);
  const auto md = metric_data(spec, x);
  CHECK((md.lam * md.lam - 2.0 * md.gf).norm() <= 1e-12 * md.gf.trace());
  CHECK((md.lam * md.lam_inv - Eigen::Matrix2d::Identity()).norm() <= 1e-12);
  CHECK(md.det_lam == doctest::Approx(md.lam.determinant()));
}

TEST_CASE("single eigenvalue specs have constant pointwise frequency") {
  for (const auto& spec : {make_rsh(7), make_arw(5)}) {
    const double e = spec.modes[0].eigenvalue;
    for (int t = 0; t < 8; ++t) {
      const auto x = random_point(spec.manifold, 71, t);
      const auto md = metric_data(spec, x);
      CHECK(md.lambda_x * md.lambda_x == doctest::Approx(e).epsilon(1e-10));
    }
  }
}

TEST_CASE("eccentricity of the normalization never exceeds the raw field") {
  const auto raw = make_band_torus({1, 5});
  const auto unit = normalized(raw);
  const auto gp_raw = global_params(raw, 16, 8);
  const auto gp_unit = global_params(unit, 16, 8);
  CHECK(gp_unit.eps <= gp_raw.eps + 1e-12);
}

TEST_CASE("jet norm") {
  const auto spec = make_rsh(2);
  const auto x = random_point(spec.manifold, 73, 0);
  CHECK(jet_norm(cov_jet(spec, x, x), metric_data(spec, x), metric_data(spec, x)) ==
        doctest::Approx(1.0));

  // Antipodal pair: |P_2(-1)| = 1 drives the norm to one.
  const ChartPoint a{1.0, 0.5};
  const ChartPoint anti{kPi - 1.0, 0.5 + kPi};
  const double jn = jet_norm(cov_jet(spec, a, anti), metric_data(spec, a), metric_data(spec, anti));
  CHECK(jn >= 1.0 - 1e-12);
  CHECK(jn <= 1.0 + 1e-12);

  // Sampled directional maxima never exceed the closed form and approach it.
  const auto bspec = normalized(make_band_torus({1, 5}));
  const auto y = random_point(bspec.manifold, 73, 2);
  const auto z = random_point(bspec.manifold, 73, 3);
  const auto jc = cov_jet(bspec, y, z);
  const auto my = metric_data(bspec, y);
  const auto mz = metric_data(bspec, z);
  const double closed = jet_norm(jc, my, mz);
  double sampled = std::abs(jc.c);
  for (int i = 0; i < 10000; ++i) {
    const double au = ncxtest::uniform(79, i, 0, 0.0, 2.0 * kPi);
    const Eigen::Vector2d u{std::cos(au), std::sin(au)};
    const double ugf = std::sqrt(u.dot(my.gf * u));
    sampled = std::max(sampled, std::abs(jc.cpx.dot(u)) / ugf);
  }
  for (int i = 0; i < 10000; ++i) {
    const double av = ncxtest::uniform(79, i, 1, 0.0, 2.0 * kPi);
    const Eigen::Vector2d v{std::cos(av), std::sin(av)};
    const double vgf = std::sqrt(v.dot(mz.gf * v));
    sampled = std::max(sampled, std::abs(jc.cpy.dot(v)) / vgf);
  }
  for (int i = 0; i < 200; ++i)
    for (int j = 0; j < 200; ++j) {
      const Eigen::Vector2d u{std::cos(kPi * i / 100.0), std::sin(kPi * i / 100.0)};
      const Eigen::Vector2d v{std::cos(kPi * j / 100.0), std::sin(kPi * j / 100.0)};
      const double ugf = std::sqrt(u.dot(my.gf * u));
      const double vgf = std::sqrt(v.dot(mz.gf * v));
      sampled = std::max(sampled, std::abs(u.dot(jc.cpp * v)) / (ugf * vgf));
    }
  CHECK(sampled <= closed + 1e-12);
  CHECK(closed <= sampled + 1e-3);

  // Cauchy-Schwarz: norm stays below one for unit-variance specs.
  for (const auto& s :
       {make_rsh(5), make_arw(5), bspec, make_anisotropic({{{1, 0}, 1.0}, {{0, 1}, 1.2}})}) {
    for (int t = 0; t < 20; ++t) {
      const auto p = random_point(s.manifold, 83, 2 * t);
      const auto q = random_point(s.manifold, 83, 2 * t + 1);
      CHECK(jet_norm(cov_jet(s, p, q), metric_data(s, p), metric_data(s, q)) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("spec json round trip is bit exact and fail-fast") {
  for (const auto& spec : {make_rsh(5), make_arw(5), normalized(make_band_torus({1, 5})),
                           make_anisotropic({{{1, 0}, 1.0}, {{0, 1}, 1.2}})}) {
    const std::string text = spec_to_json(spec).dump();
    const auto back = spec_from_json(nlohmann::json::parse(text));
    REQUIRE(back.modes.size() == spec.modes.size());
    CHECK(back.unit_variance == spec.unit_variance);
    CHECK(back.manifold.kind == spec.manifold.kind);
    for (std::size_t i = 0; i < spec.modes.size(); ++i) {
      CHECK(back.modes[i].id == spec.modes[i].id);
      CHECK(back.modes[i].std == spec.modes[i].std);            // bitwise
      CHECK(back.modes[i].eigenvalue == spec.modes[i].eigenvalue);
    }
    // Second round trip is byte-identical.
    CHECK(spec_to_json(back).dump() == text);
  }

  auto j = spec_to_json(make_rsh(2));
  j["surprise"] = 1;
  CHECK_THROWS_AS(spec_from_json(j), Error);
  auto j2 = spec_to_json(make_rsh(2));
  j2["modes"][0]["eigenvalue"] = 17.0;
  CHECK_THROWS_AS(spec_from_json(j2), Error);
  auto j3 = spec_to_json(make_rsh(2));
  j3["modes"][0]["id"] = {2, 5, 0};
  CHECK_THROWS_AS(spec_from_json(j3), Error);
}

TEST_CASE("field evaluator matches direct evaluation") {
  const auto spec = make_rsh(4);
  std::vector<ChartPoint> pts;
  for (int t = 0; t < 7; ++t) pts.push_back(random_point(spec.manifold, 89, t));
  const FieldEvaluator ev(spec, pts);
  const auto s = sample_field(spec, 4242);
  Eigen::VectorXd f, g1, g2, lap;
  ev.jets(s, f, g1, g2);
  ev.laplacians(s, lap);
  for (int t = 0; t < 7; ++t) {
    const auto jet = eval_jet(spec, s, pts[t]);
    CHECK(f[t] == doctest::Approx(jet.value).epsilon(1e-14));
    CHECK(g1[t] == doctest::Approx(jet.grad[0]).epsilon(1e-14));
    CHECK(g2[t] == doctest::Approx(jet.grad[1]).epsilon(1e-14));
    CHECK(lap[t] == doctest::Approx(eval_laplacian(spec, s, pts[t])).epsilon(1e-12));
    CHECK(lap[t] == doctest::Approx(-20.0 * jet.value).epsilon(1e-12));
  }
}
