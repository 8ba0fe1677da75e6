#include "core/chaos.hpp"

#include <cmath>

#include "core/specfun.hpp"

namespace ncx::chaos {

std::string to_string(Form f) {
  switch (f) {
    case Form::general: return "general";
    case Form::lambda_form: return "lambda_form";
    case Form::inverse_form: return "inverse_form";
    case Form::tilde: return "tilde";
    case Form::closed2: return "closed2";
    case Form::closed4: return "closed4";
  }
  return "general";
}

Form form_from_string(const std::string& s) {
  if (s == "general") return Form::general;
  if (s == "lambda_form") return Form::lambda_form;
  if (s == "inverse_form") return Form::inverse_form;
  if (s == "tilde") return Form::tilde;
  if (s == "closed2") return Form::closed2;
  if (s == "closed4") return Form::closed4;
  throw Error(errc::parse, "unknown chaos form: " + s);
}

namespace {

constexpr int kN = 2;  // manifold dimension

void check_q(int q) {
  if (q < 0 || q % 2 != 0) throw Error(errc::invalid_argument, "chaos: q must be even and >= 0");
  if (q > 12) throw Error(errc::domain, "chaos: q capped at 12");
}

}  // namespace

ChaosContext::ChaosContext(const field::SpectralFieldSpec& spec, int resolution, int K)
    : spec_(spec),
      resolution_(resolution),
      K_(K),
      params_(field::global_params(spec, resolution, K)),
      points_(),
      nodes_(),
      evaluator_([&] {
        const auto quad = geo::build_manifold_quadrature(spec.manifold, resolution);
        points_.reserve(quad.nodes.size());
        nodes_.reserve(quad.nodes.size());
        for (const auto& qn : quad.nodes) {
          points_.push_back(qn.x);
          NodeData nd;
          nd.weight = qn.weight;
          nd.metric = field::metric_data(spec_, qn.x);
          const auto fib = geo::fiber_directions(spec_.manifold, qn.x, K);
          nd.dirs = fib.dirs;
          nd.fiber_weight = fib.weight;
          nd.u_gf.resize(K);
          nd.inv_density.resize(K);
          for (int j = 0; j < K; ++j) {
            const Eigen::Vector2d& u = nd.dirs[j];
            nd.u_gf[j] = std::sqrt(u.dot(nd.metric.gf * u));
            nd.inv_density[j] =
                std::pow((nd.metric.lam_inv * u).norm(), -(kN + 1)) / nd.metric.det_lam;
          }
          nodes_.push_back(std::move(nd));
        }
        return field::FieldEvaluator(spec_, points_);
      }()) {
  double s2 = 0;
  for (const auto& m : spec_.modes) s2 += m.std * m.std;
  sigma2_spectral_ = s2 / spec_.manifold.volume();
  lambda2_spectral_ = field::lambda2_spectral(spec_);
}

double ChaosContext::homothetic_lambda_or_throw(const char* who) const {
  if (!spec_.unit_variance)
    throw Error(errc::domain, std::string(who) + ": requires a unit-variance spec");
  if (params_.eps > 1e-8)
    throw Error(errc::domain,
                std::string(who) +
                    ": requires a homothetic spec (constant gradient covariance); eccentricity " +
                    format_double(params_.eps));
  return std::sqrt(lambda2_spectral_);
}

ChaosStatistic ChaosContext::chaos_q(const field::FieldSample& s, int q, Form form,
                                     double level) const {
  check_q(q);
  if (form == Form::tilde) {
    if (level != 0) throw Error(errc::invalid_argument, "tilde form does not take a level");
    return tilde_q(s, q);
  }
  if (form == Form::closed2 || form == Form::closed4)
    throw Error(errc::invalid_argument, "closed forms are separate entry points");
  if (!spec_.unit_variance)
    throw Error(errc::domain, "chaos_q: requires a unit-variance spec");

  const int half = q / 2;
  const double sn = specfun::sphere_area(kN);
  std::vector<double> theta_ab(half + 1), lvl(half + 1);
  for (int a = 0; a <= half; ++a) {
    theta_ab[a] = specfun::theta(a, half - a);
    lvl[a] = level_factor(level, a);
  }

  Eigen::VectorXd f, g1, g2;
  evaluator_.jets(s, f, g1, g2);

  std::vector<double> node_terms(nodes_.size());
  std::vector<double> inner(half + 1);
  for (std::size_t p = 0; p < nodes_.size(); ++p) {
    const NodeData& nd = nodes_[p];
    const Eigen::Vector2d grad{g1[p], g2[p]};
    // inner[b] = fiber sum of H_{2b}(argument) * weight-density
    std::fill(inner.begin(), inner.end(), 0.0);
    for (int j = 0; j < K_; ++j) {
      const Eigen::Vector2d& u = nd.dirs[j];
      double arg = 0, dens = 0;
      switch (form) {
        case Form::general: {
          arg = grad.dot(u) / nd.u_gf[j];
          dens = nd.u_gf[j];
          break;
        }
        case Form::lambda_form: {
          const double lu = (nd.metric.lam * u).norm();
          arg = grad.dot(u) * std::sqrt(static_cast<double>(kN)) / lu;
          dens = lu / std::sqrt(static_cast<double>(kN));
          break;
        }
        case Form::inverse_form: {
          arg = (nd.metric.lam_inv * grad).dot(u) * std::sqrt(static_cast<double>(kN));
          dens = nd.inv_density[j] / std::sqrt(static_cast<double>(kN));
          break;
        }
        default:
          break;
      }
      for (int b = 0; b <= half; ++b) inner[b] += specfun::hermite(2 * b, arg) * dens;
    }
    double total = 0;
    for (int a = 0; a <= half; ++a) {
      const int b = half - a;
      total += theta_ab[a] * lvl[a] * specfun::hermite(2 * a, f[p]) * inner[b];
    }
    node_terms[p] = nd.weight * nd.fiber_weight * total;
  }
  ChaosStatistic out{q, pairwise_sum(node_terms) / sn, form, resolution_, K_, level};
  return out;
}

ChaosStatistic ChaosContext::tilde_q(const field::FieldSample& s, int q) const {
  check_q(q);
  const int half = q / 2;
  const double sn = specfun::sphere_area(kN);
  const double sigma = params_.sigma;
  const double lambda = params_.lambda;
  const double sqn = std::sqrt(static_cast<double>(kN));

  Eigen::VectorXd f, g1, g2;
  evaluator_.jets(s, f, g1, g2);

  std::vector<double> theta_ab(half + 1);
  for (int a = 0; a <= half; ++a) theta_ab[a] = specfun::theta(a, half - a);

  std::vector<double> node_terms(nodes_.size());
  std::vector<double> inner(half + 1);
  for (std::size_t p = 0; p < nodes_.size(); ++p) {
    const NodeData& nd = nodes_[p];
    const Eigen::Vector2d grad{g1[p], g2[p]};
    std::fill(inner.begin(), inner.end(), 0.0);
    for (int j = 0; j < K_; ++j) {
      const double arg = grad.dot(nd.dirs[j]) * sqn / (sigma * lambda);
      for (int b = 0; b <= half; ++b) inner[b] += specfun::hermite(2 * b, arg);
    }
    double total = 0;
    for (int a = 0; a <= half; ++a)
      total += theta_ab[a] * specfun::hermite(2 * a, f[p] / sigma) * inner[half - a];
    node_terms[p] = nd.weight * nd.fiber_weight * lambda * total;
  }
  ChaosStatistic out{q, pairwise_sum(node_terms) / (sn * sqn), Form::tilde, resolution_, K_, 0};
  return out;
}

ChaosStatistic ChaosContext::closed2(const field::FieldSample& s) const {
  const double lambda = homothetic_lambda_or_throw("closed2");
  const double sn = specfun::sphere_area(kN);
  const double snm1 = specfun::sphere_area(kN - 1);
  Eigen::VectorXd f, g1, g2;
  evaluator_.jets(s, f, g1, g2);
  std::vector<double> terms(nodes_.size());
  for (std::size_t p = 0; p < nodes_.size(); ++p) {
    const double grad2 = g1[p] * g1[p] + g2[p] * g2[p];
    terms[p] = nodes_[p].weight * (f[p] * f[p] - grad2 / (lambda * lambda));
  }
  const double value =
      -lambda * snm1 / (2.0 * sn * std::sqrt(static_cast<double>(kN))) * pairwise_sum(terms);
  return {2, value, Form::closed2, resolution_, 0, 0};
}

double ChaosContext::closed2_spectral(const field::FieldSample& s) const {
  homothetic_lambda_or_throw("closed2");
  const double lambda2 = lambda2_spectral_;
  const double sn = specfun::sphere_area(kN);
  const double snm1 = specfun::sphere_area(kN - 1);
  std::vector<double> terms(s.coeffs.size());
  for (std::size_t i = 0; i < s.coeffs.size(); ++i)
    terms[i] = s.coeffs[i] * s.coeffs[i] * (1.0 - spec_.modes[i].eigenvalue / lambda2);
  return -std::sqrt(lambda2) * snm1 / (2.0 * sn * std::sqrt(static_cast<double>(kN))) *
         pairwise_sum(terms);
}

ChaosStatistic ChaosContext::closed4(const field::FieldSample& s) const {
  const double lambda = homothetic_lambda_or_throw("closed4");
  const double sigma = 1.0;  // unit-variance enforced above
  const double sn = specfun::sphere_area(kN);
  const double snm1 = specfun::sphere_area(kN - 1);
  Eigen::VectorXd f, g1, g2, lap;
  evaluator_.jets(s, f, g1, g2);
  evaluator_.laplacians(s, lap);
  std::vector<double> terms(nodes_.size());
  for (std::size_t p = 0; p < nodes_.size(); ++p) {
    const double fp = f[p] / sigma;
    // |x|^2 for x = sqrt(n) grad / (sigma lambda)
    const double r2 =
        kN * (g1[p] * g1[p] + g2[p] * g2[p]) / (sigma * sigma * lambda * lambda);
    const double fiber_avg = 3.0 / (kN * (kN + 2.0)) * r2 * r2 - 6.0 / kN * r2 + 3.0;
    const double lf = f[p] + lap[p] / (lambda * lambda);
    terms[p] = nodes_[p].weight * (specfun::hermite(4, fp) - fiber_avg +
                                   2.0 / sigma * specfun::hermite(3, fp) * lf);
  }
  const double value =
      lambda * snm1 / (24.0 * sn * std::sqrt(static_cast<double>(kN))) * pairwise_sum(terms);
  return {4, value, Form::closed4, resolution_, 0, 0};
}

double chi_partial(const Eigen::VectorXd& xi, const Eigen::MatrixXd& G, int Q, int K) {
  const int n = static_cast<int>(xi.size());
  if (n < 1) throw Error(errc::invalid_argument, "chi_partial: empty vector");
  if (G.rows() != n || G.cols() != n)
    throw Error(errc::invalid_argument, "chi_partial: dimension mismatch");
  if (Q < 0) throw Error(errc::invalid_argument, "chi_partial: Q < 0");

  if (n >= 2 && G.isIdentity(1e-14)) {
    // The integrand depends on <xi, v> alone; collapse to the zonal rule.
    const double xn = xi.norm();
    double total = 0;
    for (int q = 0; q <= Q; q += 2)
      total += specfun::a_coeff(n, q / 2) *
               geo::zonal_integral(n, [&](double c) { return specfun::hermite(q, xn * c); }, K);
    return total;
  }

  std::vector<std::pair<Eigen::VectorXd, double>> nodes;
  if (n == 1) {
    Eigen::VectorXd plus(1), minus(1);
    plus << 1.0;
    minus << -1.0;
    nodes = {{plus, 1.0}, {minus, 1.0}};
  } else {
    nodes = geo::sphere_surface_quadrature(n, K);
  }
  double total = 0;
  for (int q = 0; q <= Q; q += 2) {
    std::vector<double> terms(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& [v, w] = nodes[i];
      const double sd = std::sqrt(v.dot(G * v));
      terms[i] = w * specfun::hermite(q, xi.dot(v) / sd) * sd;
    }
    total += specfun::a_coeff(n, q / 2) * pairwise_sum(terms);
  }
  return total;
}

double level_factor(double t, int a) {
  return std::exp(-0.5 * t * t) * specfun::hermite(2 * a, t) / specfun::hermite_at_zero(a);
}

}  // namespace ncx::chaos
