#include "core/field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "core/sphharm.hpp"
#include "core/specfun.hpp"

namespace ncx::field {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double torus_eigenvalue(int k1, int k2) {
  return 4.0 * kPi * kPi * (static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
}

Mode torus_mode(int trig, int k1, int k2, double std) {
  return Mode{{trig, k1, k2}, torus_eigenvalue(k1, k2), std};
}

Mode sphere_mode(int ell, int m, double std) {
  return Mode{{ell, m, 0}, static_cast<double>(ell) * (ell + 1.0), std};
}

std::vector<geo::ChartPoint> probe_points(const geo::ManifoldModel& model) {
  std::vector<geo::ChartPoint> pts;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      if (model.kind == geo::ManifoldKind::Torus2)
        pts.push_back({(i + 0.171) / 5.0, (j + 0.437) / 5.0});
      else
        pts.push_back({0.2 + 0.55 * kPi * (i + 0.3) / 5.0, kTwoPi * (j + 0.17) / 5.0});
    }
  return pts;
}

double pointwise_variance(const SpectralFieldSpec& spec, const geo::ChartPoint& x) {
  double v = 0;
  double val;
  Eigen::Vector2d g;
  for (int i = 0; i < spec.n_modes(); ++i) {
    eval_mode(spec, i, x, val, g);
    v += spec.modes[i].std * spec.modes[i].std * val * val;
  }
  return v;
}

}  // namespace

std::vector<Eigen::Vector2i> lattice_points(int m) {
  std::vector<Eigen::Vector2i> pts;
  const int r = static_cast<int>(std::floor(std::sqrt(static_cast<double>(m))));
  for (int k1 = -r; k1 <= r; ++k1) {
    const int rem = m - k1 * k1;
    const int k2 = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rem))));
    if (k2 * k2 == rem) {
      pts.push_back({k1, k2});
      if (k2 != 0) pts.push_back({k1, -k2});
    }
  }
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return std::pair(a[0], a[1]) < std::pair(b[0], b[1]);
  });
  return pts;
}

SpectralFieldSpec make_rsh(int ell) {
  if (ell < 1) throw Error(errc::invalid_argument, "make_rsh: ell >= 1 required");
  SpectralFieldSpec spec;
  spec.manifold.kind = geo::ManifoldKind::Sphere2;
  const double std = std::sqrt(4.0 * kPi / (2.0 * ell + 1.0));
  for (int m = -ell; m <= ell; ++m) spec.modes.push_back(sphere_mode(ell, m, std));
  spec.unit_variance = true;
  return spec;
}

SpectralFieldSpec make_arw(int m) {
  const auto pts = lattice_points(m);
  if (pts.empty())
    throw Error(errc::invalid_argument,
                "make_arw: " + std::to_string(m) + " is not a sum of two squares");
  SpectralFieldSpec spec;
  spec.manifold.kind = geo::ManifoldKind::Torus2;
  const double std = 1.0 / std::sqrt(static_cast<double>(pts.size()));
  for (const auto& k : pts) {
    if (k[0] > 0 || (k[0] == 0 && k[1] > 0)) {  // half lattice
      spec.modes.push_back(torus_mode(0, k[0], k[1], std));
      spec.modes.push_back(torus_mode(1, k[0], k[1], std));
    }
  }
  spec.unit_variance = true;
  return spec;
}

SpectralFieldSpec make_band_sphere(const std::vector<int>& ells) {
  if (ells.empty()) throw Error(errc::invalid_argument, "make_band_sphere: empty eigenvalue list");
  SpectralFieldSpec spec;
  spec.manifold.kind = geo::ManifoldKind::Sphere2;
  for (int ell : ells) {
    if (ell < 1) throw Error(errc::invalid_argument, "make_band_sphere: ell >= 1 required");
    for (int m = -ell; m <= ell; ++m) spec.modes.push_back(sphere_mode(ell, m, 1.0));
  }
  spec.unit_variance = false;
  return spec;
}

SpectralFieldSpec make_band_torus(const std::vector<int>& ms) {
  if (ms.empty()) throw Error(errc::invalid_argument, "make_band_torus: empty eigenvalue list");
  SpectralFieldSpec spec;
  spec.manifold.kind = geo::ManifoldKind::Torus2;
  for (int m : ms) {
    const auto pts = lattice_points(m);
    if (pts.empty())
      throw Error(errc::invalid_argument,
                  "make_band_torus: " + std::to_string(m) + " is not a sum of two squares");
    for (const auto& k : pts) {
      if (k[0] > 0 || (k[0] == 0 && k[1] > 0)) {
        spec.modes.push_back(torus_mode(0, k[0], k[1], 1.0));
        spec.modes.push_back(torus_mode(1, k[0], k[1], 1.0));
      }
    }
  }
  spec.unit_variance = false;
  return spec;
}

SpectralFieldSpec make_anisotropic(const std::vector<std::pair<Eigen::Vector2i, double>>& freqs) {
  if (freqs.empty()) throw Error(errc::invalid_argument, "make_anisotropic: empty frequency list");
  Eigen::Matrix2d span = Eigen::Matrix2d::Zero();
  double total = 0;
  for (const auto& [k, s] : freqs) {
    span += s * s * (k.cast<double>() * k.cast<double>().transpose());
    total += 2.0 * s * s;
  }
  if (span.determinant() < 1e-14 * (1.0 + span.trace() * span.trace()))
    throw Error(errc::domain, "make_anisotropic: frequency set does not span R^2 (degenerate gradient covariance)");
  SpectralFieldSpec spec;
  spec.manifold.kind = geo::ManifoldKind::Torus2;
  const double scale = 1.0 / std::sqrt(total);
  for (const auto& [k, s] : freqs) {
    spec.modes.push_back(torus_mode(0, k[0], k[1], s * scale));
    spec.modes.push_back(torus_mode(1, k[0], k[1], s * scale));
  }
  spec.unit_variance = true;
  return spec;
}

SpectralFieldSpec normalized(const SpectralFieldSpec& spec) {
  if (spec.modes.empty()) throw Error(errc::invalid_argument, "normalized: empty spec");
  const auto pts = probe_points(spec.manifold);
  double vmin = 1e300, vmax = -1e300;
  for (const auto& p : pts) {
    const double v = pointwise_variance(spec, p);
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  if (vmin <= 0) throw Error(errc::domain, "normalized: zero pointwise variance");
  if ((vmax - vmin) > 1e-10 * vmax)
    throw Error(errc::domain,
                "normalized: pointwise variance is not constant; per-point rescaling unsupported");
  SpectralFieldSpec out = spec;
  const double scale = 1.0 / std::sqrt(0.5 * (vmin + vmax));
  for (auto& m : out.modes) m.std *= scale;
  out.unit_variance = true;
  return out;
}

bool is_stationary(const SpectralFieldSpec& spec) {
  if (spec.manifold.kind != geo::ManifoldKind::Torus2) return false;
  std::map<std::pair<int, int>, std::array<double, 2>> by_k;
  for (const auto& m : spec.modes) {
    if (m.id[1] == 0 && m.id[2] == 0) continue;  // constant mode
    by_k[{m.id[1], m.id[2]}][m.id[0]] += m.std * m.std;
  }
  for (const auto& [k, v] : by_k)
    if (std::abs(v[0] - v[1]) > 1e-14 * (v[0] + v[1])) return false;
  return true;
}

bool is_isotropic(const SpectralFieldSpec& spec) {
  if (spec.manifold.kind != geo::ManifoldKind::Sphere2) return false;
  std::map<int, std::map<int, double>> by_ell;
  for (const auto& m : spec.modes) by_ell[m.id[0]][m.id[1]] = m.std;
  for (const auto& [ell, ms] : by_ell) {
    if (static_cast<int>(ms.size()) != 2 * ell + 1) return false;
    const double s0 = ms.begin()->second;
    for (const auto& [m, s] : ms)
      if (std::abs(s - s0) > 1e-14 * std::abs(s0)) return false;
  }
  return true;
}

double lambda2_spectral(const SpectralFieldSpec& spec) {
  bool single = true;
  for (const auto& m : spec.modes) single = single && m.eigenvalue == spec.modes[0].eigenvalue;
  if (single && !spec.modes.empty()) return spec.modes[0].eigenvalue;
  double num = 0, den = 0;
  for (const auto& m : spec.modes) {
    num += m.std * m.std * m.eigenvalue;
    den += m.std * m.std;
  }
  if (den <= 0) throw Error(errc::domain, "lambda2_spectral: spec has no active modes");
  return num / den;
}

FieldSample sample_field(const SpectralFieldSpec& spec, uint64_t seed) {
  FieldSample s;
  s.seed = seed;
  s.coeffs.resize(spec.modes.size());
  for (std::size_t i = 0; i < spec.modes.size(); ++i)
    s.coeffs[i] = spec.modes[i].std * normal_draw(seed, i, 0);
  return s;
}

void eval_mode(const SpectralFieldSpec& spec, int mode_index, const geo::ChartPoint& x,
               double& value, Eigen::Vector2d& grad) {
  const Mode& m = spec.modes[mode_index];
  if (spec.manifold.kind == geo::ManifoldKind::Torus2) {
    const int k1 = m.id[1], k2 = m.id[2];
    if (k1 == 0 && k2 == 0) {
      value = 1.0;
      grad.setZero();
      return;
    }
    const double s2 = std::sqrt(2.0);
    const double phase = kTwoPi * (k1 * x.u + k2 * x.v);
    if (m.id[0] == 0) {
      value = s2 * std::cos(phase);
      const double d = -s2 * kTwoPi * std::sin(phase);
      grad = {d * k1, d * k2};
    } else {
      value = s2 * std::sin(phase);
      const double d = s2 * kTwoPi * std::cos(phase);
      grad = {d * k1, d * k2};
    }
  } else {
    sph::real_sph_harm(m.id[0], m.id[1], x, value, grad);
  }
}

Jet1 eval_jet(const SpectralFieldSpec& spec, const FieldSample& sample, const geo::ChartPoint& x) {
  if (sample.coeffs.size() != spec.modes.size())
    throw Error(errc::invalid_argument, "eval_jet: sample does not match spec");
  Jet1 jet;
  double val;
  Eigen::Vector2d g;
  for (int i = 0; i < spec.n_modes(); ++i) {
    eval_mode(spec, i, x, val, g);
    jet.value += sample.coeffs[i] * val;
    jet.grad += sample.coeffs[i] * g;
  }
  return jet;
}

double eval_laplacian(const SpectralFieldSpec& spec, const FieldSample& sample,
                      const geo::ChartPoint& x) {
  double lap = 0;
  double val;
  Eigen::Vector2d g;
  for (int i = 0; i < spec.n_modes(); ++i) {
    eval_mode(spec, i, x, val, g);
    lap -= sample.coeffs[i] * spec.modes[i].eigenvalue * val;
  }
  return lap;
}

JetCovariance cov_jet(const SpectralFieldSpec& spec, const geo::ChartPoint& x,
                      const geo::ChartPoint& y) {
  JetCovariance jc;
  double vx, vy;
  Eigen::Vector2d gx, gy;
  for (int i = 0; i < spec.n_modes(); ++i) {
    const double w = spec.modes[i].std * spec.modes[i].std;
    eval_mode(spec, i, x, vx, gx);
    eval_mode(spec, i, y, vy, gy);
    jc.c += w * vx * vy;
    jc.cpx += w * gx * vy;
    jc.cpy += w * vx * gy;
    jc.cpp += w * gx * gy.transpose();
  }
  return jc;
}

MetricData metric_data(const SpectralFieldSpec& spec, const geo::ChartPoint& x) {
  Eigen::Matrix2d gf = Eigen::Matrix2d::Zero();
  double val;
  Eigen::Vector2d g;
  for (int i = 0; i < spec.n_modes(); ++i) {
    eval_mode(spec, i, x, val, g);
    gf += spec.modes[i].std * spec.modes[i].std * g * g.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(gf);
  const double floor = 1e-14 * gf.trace();
  if (!(es.eigenvalues().minCoeff() > floor))
    throw Error(errc::domain,
                "metric_data: gradient covariance is not positive definite at this point; the "
                "field has a degenerate differential (non-degeneracy assumption violated)");
  MetricData md;
  md.gf = gf;
  const Eigen::Vector2d ev = es.eigenvalues();
  const Eigen::Matrix2d V = es.eigenvectors();
  const int n = 2;
  md.gf_isqrt = V * ev.cwiseSqrt().cwiseInverse().asDiagonal() * V.transpose();
  md.lam = V * (n * ev.array()).sqrt().matrix().asDiagonal() * V.transpose();
  md.lam_inv = V * (n * ev.array()).rsqrt().matrix().asDiagonal() * V.transpose();
  md.det_lam = std::sqrt(n * ev[0]) * std::sqrt(n * ev[1]);
  md.lambda_x = std::sqrt(gf.trace());
  return md;
}

GlobalParams global_params(const SpectralFieldSpec& spec, int resolution, int K) {
  (void)K;  // direction extremes are resolved exactly via the metric eigenvalues
  const auto quad = geo::build_manifold_quadrature(spec.manifold, resolution);
  const double vol = spec.manifold.volume();

  std::vector<double> vterms(quad.nodes.size()), lterms(quad.nodes.size());
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    const auto& node = quad.nodes[i];
    double v = 0, tr = 0;
    double val;
    Eigen::Vector2d g;
    for (int k = 0; k < spec.n_modes(); ++k) {
      const double w = spec.modes[k].std * spec.modes[k].std;
      eval_mode(spec, k, node.x, val, g);
      v += w * val * val;
      tr += w * g.squaredNorm();
    }
    vterms[i] = node.weight * v;
    lterms[i] = node.weight * tr;
  }
  GlobalParams out;
  const double sigma2 = pairwise_sum(vterms) / vol;
  // Average frequency of the unit-variance normalization: amplitude-free,
  // so it coincides with the mean eigenvalue for random-wave bands.
  const double lambda2 = pairwise_sum(lterms) / (vol * sigma2);
  out.sigma = std::sqrt(sigma2);
  out.lambda = std::sqrt(lambda2);

  // Eccentricity: distortion of gradient-covariance spheres plus variance
  // flatness defects. Terms 2 and 3 vanish identically for constant-variance
  // specs and are then skipped.
  const int n = 2;
  double term1 = 0, term2 = 0, term3 = 0;
  double vmin = 1e300, vmax = -1e300;
  for (const auto& node : quad.nodes) {
    const double v = pointwise_variance(spec, node.x);
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  const bool const_var = (vmax - vmin) <= 1e-10 * vmax;
  for (const auto& node : quad.nodes) {
    Eigen::Matrix2d gphi = Eigen::Matrix2d::Zero();
    Eigen::Vector2d dvar = Eigen::Vector2d::Zero();
    double v = 0;
    double val;
    Eigen::Vector2d g;
    for (int k = 0; k < spec.n_modes(); ++k) {
      const double w = spec.modes[k].std * spec.modes[k].std;
      eval_mode(spec, k, node.x, val, g);
      gphi += w * g * g.transpose();
      v += w * val * val;
      dvar += 2.0 * w * val * g;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(gphi);
    // The distortion compares the raw gradient covariance against the raw
    // amplitude, sigma * lambda; the overall scale cancels.
    for (int j = 0; j < 2; ++j)
      term1 = std::max(term1, std::abs(std::sqrt(n * es.eigenvalues()[j]) /
                                           (out.sigma * out.lambda) -
                                       1.0));
    if (!const_var) {
      term2 = std::max(term2, std::abs(std::sqrt(v) / out.sigma - 1.0));
      // |<d sqrt(V)/sigma, u>| maximized over unit u is the gradient norm.
      term3 = std::max(term3, (dvar.norm() / (2.0 * std::sqrt(v) * out.sigma)) *
                                  std::sqrt(static_cast<double>(n)) / out.lambda);
    }
  }
  out.eps = term1 + term2 + term3;
  return out;
}

double jet_norm(const JetCovariance& jc, const MetricData& mx, const MetricData& my) {
  const double t1 = std::abs(jc.c);
  const double t2 = (mx.gf_isqrt * jc.cpx).norm();
  const double t3 = (my.gf_isqrt * jc.cpy).norm();
  const Eigen::Matrix2d B = mx.gf_isqrt * jc.cpp * my.gf_isqrt;
  const double t4 = B.jacobiSvd().singularValues()[0];
  return std::max({t1, t2, t3, t4});
}

nlohmann::json spec_to_json(const SpectralFieldSpec& spec) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["manifold"] = geo::to_string(spec.manifold.kind);
  j["normalization"] = spec.unit_variance ? "unit-variance" : "raw";
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : spec.modes) {
    modes.push_back({{"id", m.id}, {"eigenvalue", m.eigenvalue}, {"std", m.std}});
  }
  j["modes"] = std::move(modes);
  return j;
}

SpectralFieldSpec spec_from_json(const nlohmann::json& j) {
  static const std::set<std::string> allowed = {"schema_version", "manifold", "normalization",
                                                "modes"};
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw Error(errc::parse, "spec json: unknown key '" + key + "'");
  if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1)
    throw Error(errc::parse, "spec json: missing or unsupported schema_version");
  SpectralFieldSpec spec;
  spec.manifold.kind = geo::manifold_from_string(j.at("manifold").get<std::string>());
  const std::string norm = j.at("normalization").get<std::string>();
  if (norm != "raw" && norm != "unit-variance")
    throw Error(errc::parse, "spec json: bad normalization '" + norm + "'");
  spec.unit_variance = norm == "unit-variance";
  for (const auto& jm : j.at("modes")) {
    static const std::set<std::string> mode_keys = {"id", "eigenvalue", "std"};
    for (const auto& [key, _] : jm.items())
      if (!mode_keys.count(key)) throw Error(errc::parse, "spec json mode: unknown key '" + key + "'");
    Mode m;
    const auto id = jm.at("id");
    if (!id.is_array() || id.size() != 3) throw Error(errc::parse, "spec json mode: bad id");
    for (int t = 0; t < 3; ++t) m.id[t] = id[t].get<int>();
    m.eigenvalue = jm.at("eigenvalue").get<double>();
    m.std = jm.at("std").get<double>();
    if (m.std < 0) throw Error(errc::parse, "spec json mode: negative std");
    double expected;
    if (spec.manifold.kind == geo::ManifoldKind::Torus2) {
      if (m.id[0] != 0 && m.id[0] != 1) throw Error(errc::parse, "spec json mode: bad trig flag");
      expected = torus_eigenvalue(m.id[1], m.id[2]);
    } else {
      if (m.id[0] < 0 || std::abs(m.id[1]) > m.id[0])
        throw Error(errc::parse, "spec json mode: bad (ell, m)");
      expected = static_cast<double>(m.id[0]) * (m.id[0] + 1.0);
    }
    if (std::abs(m.eigenvalue - expected) > 1e-9 * (1.0 + expected))
      throw Error(errc::parse, "spec json mode: eigenvalue inconsistent with mode id");
    spec.modes.push_back(m);
  }
  if (spec.modes.empty()) throw Error(errc::parse, "spec json: no modes");
  bool active = false;
  for (const auto& m : spec.modes) active = active || m.std > 0;
  if (!active) throw Error(errc::parse, "spec json: all stds are zero");
  return spec;
}

FieldEvaluator::FieldEvaluator(const SpectralFieldSpec& spec,
                               const std::vector<geo::ChartPoint>& points, bool values_only) {
  const int np = static_cast<int>(points.size());
  const int nm = spec.n_modes();
  val_.resize(np, nm);
  if (!values_only) {
    g1_.resize(np, nm);
    g2_.resize(np, nm);
    lap_.resize(np, nm);
  }
  double val;
  Eigen::Vector2d g;
  for (int p = 0; p < np; ++p)
    for (int m = 0; m < nm; ++m) {
      eval_mode(spec, m, points[p], val, g);
      val_(p, m) = val;
      if (!values_only) {
        g1_(p, m) = g[0];
        g2_(p, m) = g[1];
        lap_(p, m) = -spec.modes[m].eigenvalue * val;
      }
    }
}

void FieldEvaluator::values(const FieldSample& s, Eigen::VectorXd& out) const {
  const Eigen::Map<const Eigen::VectorXd> c(s.coeffs.data(), static_cast<long>(s.coeffs.size()));
  out.noalias() = val_ * c;
}

void FieldEvaluator::jets(const FieldSample& s, Eigen::VectorXd& f, Eigen::VectorXd& g1,
                          Eigen::VectorXd& g2) const {
  if (g1_.size() == 0)
    throw Error(errc::invalid_argument, "FieldEvaluator: built values-only, jets unavailable");
  const Eigen::Map<const Eigen::VectorXd> c(s.coeffs.data(), static_cast<long>(s.coeffs.size()));
  f.noalias() = val_ * c;
  g1.noalias() = g1_ * c;
  g2.noalias() = g2_ * c;
}

void FieldEvaluator::laplacians(const FieldSample& s, Eigen::VectorXd& out) const {
  if (lap_.size() == 0)
    throw Error(errc::invalid_argument, "FieldEvaluator: built values-only, Laplacians unavailable");
  const Eigen::Map<const Eigen::VectorXd> c(s.coeffs.data(), static_cast<long>(s.coeffs.size()));
  out.noalias() = lap_ * c;
}

}  // namespace ncx::field
