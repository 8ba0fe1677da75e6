#include <doctest.h>

#include <cmath>

#include "core/geometry.hpp"
#include "core/specfun.hpp"
#include "core/sphharm.hpp"
#include "testutil.hpp"

using namespace ncx;
using namespace ncx::geo;

TEST_CASE("torus quadrature") {
  const ManifoldModel torus{ManifoldKind::Torus2};
  const auto q = build_manifold_quadrature(torus, 8);
  CHECK(q.nodes.size() == 64);
  for (const auto& n : q.nodes) CHECK(n.weight == doctest::Approx(1.0 / 64.0));
  CHECK(q.total_weight() == doctest::Approx(1.0));
  CHECK_THROWS_AS(build_manifold_quadrature(torus, 3), Error);
}

TEST_CASE("torus quadrature is exact for low-degree trigonometric products") {
  const ManifoldModel torus{ManifoldKind::Torus2};
  const auto q = build_manifold_quadrature(torus, 24);
  // cos^2(2 pi u) cos^2(2 pi v) integrates to 1/4; frequencies up to 4.
  double acc = 0;
  for (const auto& n : q.nodes)
    acc += n.weight * std::pow(std::cos(2 * kPi * n.x.u) * std::cos(2 * kPi * n.x.v), 2);
  CHECK(acc == doctest::Approx(0.25).epsilon(1e-14));
  // Quartic product with mixed frequencies: doubling the resolution must not
  // change an already-exact rule.
  auto quartic = [](const ChartPoint& p) {
    return std::cos(2 * kPi * (p.u + 2 * p.v)) * std::cos(2 * kPi * (p.u - 2 * p.v)) *
           std::sin(2 * kPi * p.u) * std::sin(2 * kPi * (2 * p.u + p.v));
  };
  double a24 = 0;
  for (const auto& n : q.nodes) a24 += n.weight * quartic(n.x);
  const auto q48 = build_manifold_quadrature(torus, 48);
  double a48 = 0;
  for (const auto& n : q48.nodes) a48 += n.weight * quartic(n.x);
  CHECK(a24 == doctest::Approx(a48).epsilon(1e-13));
}

TEST_CASE("sphere quadrature normalization and harmonic orthonormality") {
  const ManifoldModel sphere{ManifoldKind::Sphere2};
  const auto q = build_manifold_quadrature(sphere, 64);
  CHECK(std::abs(q.total_weight() - 4.0 * kPi) <= 1e-12 * 4.0 * kPi);

  Eigen::Vector2d g;
  const auto pairs = std::vector<std::array<int, 4>>{
      {1, 0, 1, 0},   {1, 1, 1, 1},   {1, 0, 2, 0},  {5, 3, 5, 3},  {5, 3, 5, -3},
      {10, 7, 10, 7}, {20, 20, 20, 20}, {20, 5, 18, 5}, {17, 0, 17, 0}, {20, -9, 20, -9},
      {13, 2, 13, 2}, {20, 0, 18, 0}};
  for (const auto& [l1, m1, l2, m2] : pairs) {
    double acc = 0;
    for (const auto& n : q.nodes) {
      double y1, y2;
      sph::real_sph_harm(l1, m1, n.x, y1, g);
      sph::real_sph_harm(l2, m2, n.x, y2, g);
      acc += n.weight * y1 * y2;
    }
    const double expected = (l1 == l2 && m1 == m2) ? 1.0 : 0.0;
    CHECK(std::abs(acc - expected) <= 1e-10);
  }
}

TEST_CASE("legendre addition theorem") {
  // sum_m Y_lm(x) Y_lm(y) = (2l+1)/(4 pi) P_l(<x, y>)
  for (int l : {1, 3, 10}) {
    const ChartPoint x{1.1, 0.7}, y{2.0, 3.9};
    double acc = 0;
    Eigen::Vector2d g;
    for (int m = -l; m <= l; ++m) {
      double yx, yy;
      sph::real_sph_harm(l, m, x, yx, g);
      sph::real_sph_harm(l, m, y, yy, g);
      acc += yx * yy;
    }
    double P, dP, ddP;
    sph::legendre_p(l, sphere_embed(x).dot(sphere_embed(y)), P, dP, ddP);
    CHECK(acc == doctest::Approx((2 * l + 1) / (4.0 * kPi) * P).epsilon(1e-12));
  }
}

TEST_CASE("fiber directions") {
  const ManifoldModel torus{ManifoldKind::Torus2};
  const ChartPoint x{0.3, 0.8};
  const auto f4 = fiber_directions(torus, x, 4);
  CHECK(f4.K == 4);
  for (int j = 0; j < 4; ++j) {
    CHECK(f4.dirs[j].norm() == doctest::Approx(1.0));
    CHECK(std::abs(f4.dirs[j].dot(f4.dirs[(j + 1) % 4])) <= 1e-12);
  }

  // int <w, v>^2 dv = pi |w|^2 exactly at K = 8.
  const Eigen::Vector2d w{1.3, -0.4};
  const auto f8 = fiber_directions(torus, x, 8);
  double acc = 0;
  for (const auto& v : f8.dirs) acc += f8.weight * std::pow(w.dot(v), 2);
  CHECK(acc == doctest::Approx(kPi * w.squaredNorm()).epsilon(1e-13));

  // int H4(<w, v>) dv at K = 16 against the closed form.
  const auto f16 = fiber_directions(torus, x, 16);
  double h4 = 0;
  for (const auto& v : f16.dirs) h4 += f16.weight * specfun::hermite(4, w.dot(v));
  const double wn2 = w.squaredNorm();
  const double closed = (3.0 / 8.0 * wn2 * wn2 - 3.0 * wn2 + 3.0) * 2.0 * kPi;
  CHECK(std::abs(h4 - closed) <= 1e-12 * std::max(1.0, std::abs(closed)));

  const ManifoldModel sphere{ManifoldKind::Sphere2};
  CHECK_THROWS_AS(fiber_directions(sphere, ChartPoint{1e-9, 0.0}, 8), Error);
}

TEST_CASE("sphere change of variables") {
  CHECK(sphere_change_check(Eigen::Matrix2d::Identity(), 64) <= 1e-14);
  Eigen::Matrix2d two = 2.0 * Eigen::Matrix2d::Identity();
  CHECK(sphere_change_check(two, 64) <= 1e-12);
  Eigen::Matrix2d aniso;
  aniso << 2.0, 0.0, 0.0, 1.0;
  CHECK(sphere_change_check(aniso, 256) <= 1e-8);
  Eigen::Matrix2d sing;
  sing << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(sphere_change_check(sing, 64), Error);
}

TEST_CASE("spherical moment identities") {
  {
    // x = 0: all projection moments vanish except q = 0.
    const auto rep = spherical_moment_suite(2, Eigen::Matrix2d::Identity(),
                                            Eigen::Vector2d::Zero(), 64);
    for (const auto& c : rep.checks) CHECK(c.deviation <= 1e-10 * std::max(1.0, std::abs(c.closed_form)));
  }
  {
    // A = identity in n = 2: the quartic trace identity gives 2 pi.
    const auto rep = spherical_moment_suite(2, Eigen::Matrix2d::Identity(),
                                            Eigen::Vector2d{1.0, 0.0}, 64);
    for (const auto& c : rep.checks)
      if (c.name == "Av_norm4") {
        CHECK(c.closed_form == doctest::Approx(2.0 * kPi));
        CHECK(c.quadrature == doctest::Approx(2.0 * kPi));
      }
  }
  {
    // Orthogonal cubic-linear moment vanishes: X = e1, Y = e2.
    const auto nodes = sphere_surface_quadrature(2, 128);
    double acc = 0;
    for (const auto& [v, w] : nodes) acc += w * v[0] * v[0] * v[0] * v[1];
    CHECK(std::abs(acc) <= 1e-14);
  }
  for (int n = 2; n <= 4; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXd A(n, n);
      Eigen::VectorXd x(n);
      for (int i = 0; i < n; ++i) {
        x[i] = ncxtest::uniform(5, n * 100 + trial, i, -2.0, 2.0);
        for (int j = 0; j < n; ++j)
          A(i, j) = ncxtest::uniform(6, n * 100 + trial, 10 + n * i + j, -2.0, 2.0);
      }
      const auto rep = spherical_moment_suite(n, A, x, n == 4 ? 32 : 64);
      for (const auto& c : rep.checks)
        CHECK(c.deviation <= 1e-8 * std::max(1.0, std::abs(c.closed_form)));
    }
  }
}

TEST_CASE("sphere frames are orthonormal, tangent, and vary smoothly") {
  for (int trial = 0; trial < 30; ++trial) {
    const ChartPoint x{ncxtest::uniform(21, trial, 0, 0.2, kPi - 0.2),
                       ncxtest::uniform(21, trial, 1, 0.0, 2.0 * kPi)};
    Eigen::Vector3d e1, e2;
    sphere_frame(x, e1, e2);
    const Eigen::Vector3d p = sphere_embed(x);
    CHECK(e1.norm() == doctest::Approx(1.0));
    CHECK(e2.norm() == doctest::Approx(1.0));
    CHECK(std::abs(e1.dot(e2)) <= 1e-13);
    CHECK(std::abs(e1.dot(p)) <= 1e-13);
    CHECK(std::abs(e2.dot(p)) <= 1e-13);

    const double h = 1e-4;
    for (const auto& dx : {ChartPoint{x.u + h, x.v}, ChartPoint{x.u, x.v + h}}) {
      Eigen::Vector3d f1, f2;
      sphere_frame(dx, f1, f2);
      // Rotation angle between frames is O(h) away from the poles.
      CHECK(std::acos(std::clamp(e1.dot(f1), -1.0, 1.0)) <= 20.0 * h);
    }
  }
}

TEST_CASE("zonal integral reproduces the projection moments") {
  for (int d = 2; d <= 4; ++d)
    for (int q = 0; q <= 6; q += 2) {
      const double z = zonal_integral(d, [&](double c) { return std::pow(1.7 * c, q); }, 128);
      CHECK(z == doctest::Approx(std::pow(1.7, q) * specfun::beta_const(d, q)).epsilon(1e-12));
    }
}
