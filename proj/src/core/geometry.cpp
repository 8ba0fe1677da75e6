#include "core/geometry.hpp"

#include <cmath>

#include "core/specfun.hpp"

namespace ncx::geo {

std::string to_string(ManifoldKind k) {
  return k == ManifoldKind::Sphere2 ? "sphere2" : "torus2";
}

ManifoldKind manifold_from_string(const std::string& s) {
  if (s == "sphere2") return ManifoldKind::Sphere2;
  if (s == "torus2") return ManifoldKind::Torus2;
  throw Error(errc::parse, "unknown manifold kind: " + s);
}

Eigen::Vector3d sphere_embed(const ChartPoint& x) {
  const double st = std::sin(x.u), ct = std::cos(x.u);
  return {st * std::cos(x.v), st * std::sin(x.v), ct};
}

void sphere_frame(const ChartPoint& x, Eigen::Vector3d& e1, Eigen::Vector3d& e2) {
  if (x.u < kPoleEps || x.u > kPi - kPoleEps)
    throw Error(errc::domain,
                "sphere_frame: point inside the excluded polar cap; evaluate in a rotated chart");
  const double st = std::sin(x.u), ct = std::cos(x.u);
  const double cp = std::cos(x.v), sp = std::sin(x.v);
  e1 = {ct * cp, ct * sp, -st};  // d/d(colat)
  e2 = {-sp, cp, 0.0};           // (1/sin)d/d(lon)
}

double ManifoldQuadrature::total_weight() const {
  std::vector<double> w(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) w[i] = nodes[i].weight;
  return pairwise_sum(w);
}

ManifoldQuadrature build_manifold_quadrature(const ManifoldModel& model, int resolution) {
  if (resolution < 4) throw Error(errc::invalid_argument, "quadrature resolution must be >= 4");
  ManifoldQuadrature q;
  q.model = model;
  q.resolution = resolution;
  q.nodes.reserve(static_cast<std::size_t>(resolution) * resolution);
  if (model.kind == ManifoldKind::Torus2) {
    const double w = 1.0 / (static_cast<double>(resolution) * resolution);
    for (int i = 0; i < resolution; ++i)
      for (int j = 0; j < resolution; ++j)
        q.nodes.push_back({{i / static_cast<double>(resolution), j / static_cast<double>(resolution)}, w});
  } else {
    const auto& gl = gauss_legendre(resolution);
    const double wlon = 2.0 * kPi / resolution;
    for (int i = 0; i < resolution; ++i) {
      const double colat = std::acos(gl.x[i]);
      for (int j = 0; j < resolution; ++j)
        q.nodes.push_back({{colat, 2.0 * kPi * j / resolution}, gl.w[i] * wlon});
    }
  }
  return q;
}

FiberQuadrature fiber_directions(const ManifoldModel& model, const ChartPoint& x, int K) {
  if (K < 1) throw Error(errc::invalid_argument, "fiber_directions: K < 1");
  if (model.kind == ManifoldKind::Sphere2) {
    Eigen::Vector3d e1, e2;
    sphere_frame(x, e1, e2);  // pole check
  }
  // Deterministic offset from the chart coordinates.
  const double h = std::sin(x.u * 12.9898 + x.v * 78.233) * 43758.5453;
  const double theta0 = 2.0 * kPi * (h - std::floor(h)) / K;
  FiberQuadrature f;
  f.K = K;
  f.weight = 2.0 * kPi / K;  // s_1 / K
  f.angles.resize(K);
  f.dirs.resize(K);
  for (int j = 0; j < K; ++j) {
    const double a = theta0 + 2.0 * kPi * j / K;
    f.angles[j] = a;
    f.dirs[j] = {std::cos(a), std::sin(a)};
  }
  return f;
}

double sphere_change_check(const Eigen::Matrix2d& L, int K) {
  if (std::abs(L.determinant()) < 1e-14)
    throw Error(errc::invalid_argument, "sphere_change_check: singular L");
  const Eigen::Matrix2d Linv = L.inverse();
  const std::vector<std::function<double(const Eigen::Vector2d&)>> battery = {
      [](const Eigen::Vector2d&) { return 1.0; },
      [](const Eigen::Vector2d& v) { return v[0] * v[0]; },
      [](const Eigen::Vector2d& v) { return v[0] * v[1]; },
      [](const Eigen::Vector2d& v) { return v[1] * v[1] * v[1] * v[1]; },
  };
  const double det = L.determinant();
  double maxdev = 0.0;
  for (const auto& h : battery) {
    std::vector<double> lhs(K), rhs(K);
    for (int j = 0; j < K; ++j) {
      const double a = 2.0 * kPi * j / K;
      const Eigen::Vector2d v{std::cos(a), std::sin(a)};
      lhs[j] = h(v / (Linv * v).norm());
      const Eigen::Vector2d Lu = L * v;
      rhs[j] = h(Lu) * det / std::pow(Lu.norm(), 2.0);
    }
    const double w = 2.0 * kPi / K;
    maxdev = std::max(maxdev, std::abs(w * (pairwise_sum(lhs) - pairwise_sum(rhs))));
  }
  return maxdev;
}

std::vector<std::pair<Eigen::VectorXd, double>> sphere_surface_quadrature(int n, int K) {
  if (n < 2 || n > 4) throw Error(errc::invalid_argument, "sphere_surface_quadrature: n in {2,3,4}");
  std::vector<std::pair<Eigen::VectorXd, double>> out;
  if (n == 2) {
    out.reserve(K);
    for (int j = 0; j < K; ++j) {
      const double a = 2.0 * kPi * j / K;
      Eigen::VectorXd v(2);
      v << std::cos(a), std::sin(a);
      out.emplace_back(v, 2.0 * kPi / K);
    }
    return out;
  }
  // v = (cos t, sin t * u) with u on S^{n-2}, dv = sin^{n-2} t dt du.
  const auto& gl = gauss_legendre(K);
  const auto sub = sphere_surface_quadrature(n - 1, K);
  out.reserve(static_cast<std::size_t>(K) * sub.size());
  for (int i = 0; i < K; ++i) {
    const double t = 0.5 * kPi * (gl.x[i] + 1.0);
    const double wt = 0.5 * kPi * gl.w[i] * std::pow(std::sin(t), n - 2);
    for (const auto& [u, wu] : sub) {
      Eigen::VectorXd v(n);
      v[0] = std::cos(t);
      v.tail(n - 1) = std::sin(t) * u;
      out.emplace_back(v, wt * wu);
    }
  }
  return out;
}

double zonal_integral(int d, const std::function<double(double)>& h, int npts) {
  if (d < 2) throw Error(errc::invalid_argument, "zonal_integral: d < 2");
  const auto& gl = gauss_legendre(npts);
  std::vector<double> terms(npts);
  for (int i = 0; i < npts; ++i) {
    const double t = 0.5 * kPi * (gl.x[i] + 1.0);
    terms[i] = 0.5 * kPi * gl.w[i] * h(std::cos(t)) * std::pow(std::sin(t), d - 2);
  }
  return specfun::sphere_area(d - 2) * pairwise_sum(terms);
}

MomentReport spherical_moment_suite(int n, const Eigen::MatrixXd& A, const Eigen::VectorXd& x,
                                    int K) {
  if (n < 2 || n > 4) throw Error(errc::invalid_argument, "spherical_moment_suite: n in {2,3,4}");
  if (A.rows() != n || A.cols() != n || x.size() != n)
    throw Error(errc::invalid_argument, "spherical_moment_suite: dimension mismatch");
  const auto nodes = sphere_surface_quadrature(n, K);
  const auto integrate = [&](const std::function<double(const Eigen::VectorXd&)>& f) {
    std::vector<double> terms(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) terms[i] = nodes[i].second * f(nodes[i].first);
    return pairwise_sum(terms);
  };

  MomentReport rep;
  const auto push = [&rep](const std::string& name, double quad, double closed) {
    rep.checks.push_back({name, quad, closed, std::abs(quad - closed)});
    rep.max_deviation = std::max(rep.max_deviation, std::abs(quad - closed));
  };

  const double xn = x.norm();
  for (int q = 0; q <= 6; ++q) {
    const double quad = integrate([&](const Eigen::VectorXd& v) { return std::pow(x.dot(v), q); });
    const double closed =
        (q % 2 == 0) ? std::pow(xn, q) * specfun::beta_const(n, q) : 0.0;
    push("projection_moment_q" + std::to_string(q), quad, closed);
  }

  {
    // int int (x^T A y)^2 dy dx = (s_{n-1}^2/n^2) tr(A^T A); the inner
    // integral enters through the quadrature moment matrix int y y^T dy.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [y, w] : nodes) M += w * y * y.transpose();
    const Eigen::MatrixXd AMAt = A * M * A.transpose();
    const double quad =
        integrate([&](const Eigen::VectorXd& x) { return x.dot(AMAt * x); });
    const double s = specfun::sphere_area(n - 1);
    push("bilinear_trace", quad, s * s / (n * n) * (A.transpose() * A).trace());
  }

  {
    const Eigen::MatrixXd AtA = A.transpose() * A;
    const double b4 = specfun::beta_const(n, 4);
    const double closed =
        2.0 / 3.0 * (AtA * AtA).trace() * b4 + AtA.trace() * AtA.trace() * b4 / 3.0;
    const double quad = integrate([&](const Eigen::VectorXd& v) { return std::pow((A * v).norm(), 4); });
    push("Av_norm4", quad, closed);
  }

  {
    // Uses x for X and A's first column for Y.
    const Eigen::VectorXd Y = A.col(0);
    const double closed = xn * xn * x.dot(Y) * specfun::beta_const(n, 4);
    const double quad = integrate(
        [&](const Eigen::VectorXd& v) { return std::pow(x.dot(v), 3) * Y.dot(v); });
    push("cubic_linear_moment", quad, closed);
  }

  {
    const double closed = (3.0 / (n * (n + 2.0)) * std::pow(xn, 4) - 6.0 / n * xn * xn + 3.0) *
                          specfun::sphere_area(n - 1);
    const double quad =
        integrate([&](const Eigen::VectorXd& v) { return specfun::hermite(4, x.dot(v)); });
    push("hermite4_average", quad, closed);
  }

  return rep;
}

}  // namespace ncx::geo
