#include "core/verify.hpp"

#include <cmath>

#include "core/chaos.hpp"
#include "core/nodal.hpp"
#include "core/specfun.hpp"
#include "core/variance.hpp"
#include "core/sphharm.hpp"

namespace ncx::verify {

void SuiteReport::add(const std::string& name, bool ok, const std::string& detail) {
  checks.push_back({name, ok, detail});
  pass = pass && ok;
}

std::vector<std::string> suite_names() {
  return {"specfun", "geometry", "field", "chaos", "variance", "nodal"};
}

namespace {

using field::make_anisotropic;
using field::make_arw;
using field::make_band_torus;
using field::make_rsh;
using field::sample_field;

std::string dev_str(double d) { return "max deviation " + format_double(d); }

double uniform(uint64_t seed, uint64_t i, uint64_t j, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(mix64(seed, i, j) >> 11) * 0x1.0p-53);
}

geo::ChartPoint random_point(const geo::ManifoldModel& m, uint64_t seed, uint64_t i) {
  if (m.kind == geo::ManifoldKind::Torus2)
    return {uniform(seed, i, 0, 0.0, 1.0), uniform(seed, i, 1, 0.0, 1.0)};
  return {uniform(seed, i, 0, 0.3, kPi - 0.3), uniform(seed, i, 1, 0.0, 2.0 * kPi)};
}

// E[f(g)] for g ~ N(0,1), with the domain split at zero for |x| kinks.
double gauss_expect(const std::function<double(double)>& f) {
  const auto& gl = gauss_legendre(200);
  std::vector<double> terms;
  terms.reserve(2 * gl.x.size());
  for (int side = 0; side < 2; ++side) {
    const double a = side == 0 ? -12.0 : 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double x = a + 6.0 * (gl.x[i] + 1.0);
      terms.push_back(6.0 * gl.w[i] * f(x) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi));
    }
  }
  return pairwise_sum(terms);
}

void specfun_suite(SuiteReport& rep, uint64_t seed, const FaultInjection& fault) {
  using namespace specfun;
  {
    double dev = 0;
    for (int q = 0; q <= 12; ++q) {
      const auto c = hermite_coeffs(q);
      for (int g = 0; g < 50; ++g) {
        const double x = -5.0 + 10.0 * g / 49.0;
        double poly = 0, xp = 1;
        for (int j = 0; j <= q; ++j) {
          poly += c[j] * xp;
          xp *= x;
        }
        dev = std::max(dev, std::abs(hermite(q, x) - poly) / std::max(1.0, std::abs(poly)));
      }
    }
    rep.add("hermite_generating_function", dev <= 1e-10, dev_str(dev));
  }
  {
    double dev = 0;
    for (int q = 0; q <= 8; ++q)
      for (int p = 0; p <= 8; ++p) {
        const double e = gauss_expect([&](double x) { return hermite(q, x) * hermite(p, x); });
        const double expected = q == p ? factorial(q) : 0.0;
        dev = std::max(dev, std::abs(e - expected) / std::max(1.0, expected));
      }
    rep.add("hermite_orthogonality", dev <= 1e-8, dev_str(dev));
  }
  {
    bool ok = true;
    for (int trial = 0; trial < 20 && ok; ++trial) {
      std::array<Rational, 4> c;
      for (int t = 0; t < 4; ++t)
        c[t] = Rational(static_cast<long>(mix64(seed, trial, t) % 17) - 8,
                        static_cast<long>(9 + mix64(seed + 1, trial, t) % 8));
      std::array<Rational, 16> cov{};
      for (int i = 0; i < 4; ++i) cov[4 * i + i] = 1;
      cov[2] = cov[8] = c[0];
      cov[3] = cov[12] = c[1];
      cov[6] = cov[9] = c[2];
      cov[7] = cov[13] = c[3];
      for (int s = 0; s <= 6 && ok; ++s)
        for (int a = 0; a <= s && ok; ++a)
          for (int a2 = 0; a2 <= s && ok; ++a2)
            ok = diagram4_exact(a, s - a, a2, s - a2, c[0], c[1], c[2], c[3]) ==
                 wick_oracle_exact({a, s - a, a2, s - a2}, cov);
    }
    rep.add("diagram_formula_vs_wick_enumeration", ok,
            ok ? "exact rational equality" : "exact mismatch found");
  }
  {
    double dev = 0;
    for (int b = 0; b <= 5; ++b) {
      const double oracle =
          gauss_expect([&](double x) { return std::abs(x) * hermite(2 * b, x); }) /
          factorial(2 * b);
      dev = std::max(dev, std::abs(c_chi(b) - oracle));
    }
    rep.add("chi_coefficient_projection", dev <= 1e-8, dev_str(dev));
  }
  {
    double dev = 0;
    for (int d = 2; d <= 4; ++d)
      for (int q = 2; q <= 6; q += 2)
        for (int i = 0; i < 20; ++i) {
          const double xn = uniform(seed + 2, d * 10 + q, i, 0.0, 3.0);
          const double S = geo::zonal_integral(
              d, [&](double t) { return hermite(q, xn * t); }, 256);
          const double lhs = laguerre(q / 2, 0.5 * d - 1.0, 0.5 * xn * xn);
          dev = std::max(dev, std::abs(lhs - c_dq(d, q) * S) / (1.0 + std::pow(xn, q)));
        }
    rep.add("laguerre_spherical_identity", dev <= 1e-8, dev_str(dev));
  }
  {
    bool ok = true;
    for (int q = 0; q <= 10 && ok; q += 2) {
      const int h = q / 2;
      for (int a = 0; a <= h && ok; ++a)
        for (int a2 = 0; a2 <= h && ok; ++a2)
          ok = kappa_exact(a, h - a, a2, h - a2) <= big_factorial(q);
    }
    rep.add("vandermonde_coefficient_bound", ok, "exact integer comparison");
  }
  {
    double dev = 0;
    const auto& gl = gauss_legendre(128);
    for (int n = 2; n <= 5; ++n)
      for (int q = 0; q <= 8; ++q) {
        double acc = 0;
        for (int half = 0; half < 2; ++half) {
          const double a = half * 0.5 * kPi;
          for (std::size_t i = 0; i < gl.x.size(); ++i) {
            const double t = a + 0.25 * kPi * (gl.x[i] + 1.0);
            acc += 0.25 * kPi * gl.w[i] * std::pow(std::abs(std::cos(t)), q) *
                   std::pow(std::sin(t), n - 2);
          }
        }
        const double oracle = sphere_area(n - 2) * acc;
        dev = std::max(dev, std::abs(beta_const(n, q) - oracle) / std::max(1.0, oracle));
      }
    rep.add("beta_quadrature", dev <= 1e-10, dev_str(dev));
  }
  {
    // Consistency of Theta with the explicit low-order components, plus the
    // 2^q sum bound with equality only at q = 0.
    const double flip = fault.flip_theta_sign ? -1.0 : 1.0;
    double dev = std::abs(flip * theta(0, 0) - 1.0);
    dev = std::max(dev, std::abs(flip * theta(1, 0) + 0.5));
    dev = std::max(dev, std::abs(flip * theta(0, 1) - 0.5));
    dev = std::max(dev, std::abs(flip * theta(2, 0) - 0.125));
    dev = std::max(dev, std::abs(flip * theta(1, 1) + 0.25));
    dev = std::max(dev, std::abs(flip * theta(0, 2) + 1.0 / 24.0));
    bool ok = dev <= 1e-14;
    for (int q = 0; q <= 12; q += 2) {
      const auto [sum, bound] = coefficient_bound_exact(q);
      ok = ok && (q == 0 ? sum == bound : sum < bound);
    }
    rep.add("theta_consistency_and_sum_bound", ok, dev_str(dev));
  }
}

void geometry_suite(SuiteReport& rep, uint64_t seed, const FaultInjection&) {
  {
    const auto tq = geo::build_manifold_quadrature({geo::ManifoldKind::Torus2}, 32);
    const auto sq = geo::build_manifold_quadrature({geo::ManifoldKind::Sphere2}, 64);
    const double d1 = std::abs(tq.total_weight() - 1.0);
    const double d2 = std::abs(sq.total_weight() - 4.0 * kPi) / (4.0 * kPi);
    rep.add("quadrature_normalization", d1 <= 1e-12 && d2 <= 1e-12,
            dev_str(std::max(d1, d2)));
  }
  {
    const auto sq = geo::build_manifold_quadrature({geo::ManifoldKind::Sphere2}, 64);
    double dev = 0;
    Eigen::Vector2d g;
    const std::vector<std::array<int, 4>> pairs = {{1, 0, 1, 0},     {5, 3, 5, 3},
                                                   {10, -7, 10, -7}, {20, 20, 20, 20},
                                                   {20, 5, 18, 5},   {17, 0, 17, 0}};
    for (const auto& [l1, m1, l2, m2] : pairs) {
      double acc = 0;
      for (const auto& n : sq.nodes) {
        double y1, y2;
        sph::real_sph_harm(l1, m1, n.x, y1, g);
        sph::real_sph_harm(l2, m2, n.x, y2, g);
        acc += n.weight * y1 * y2;
      }
      dev = std::max(dev, std::abs(acc - ((l1 == l2 && m1 == m2) ? 1.0 : 0.0)));
    }
    rep.add("harmonic_orthonormality", dev <= 1e-10, dev_str(dev));
  }
  {
    double dev = 0;
    for (int n = 2; n <= 4; ++n)
      for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd A(n, n);
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) {
          x[i] = uniform(seed, n * 100 + trial, i, -2.0, 2.0);
          for (int j = 0; j < n; ++j)
            A(i, j) = uniform(seed + 1, n * 100 + trial, 10 + n * i + j, -2.0, 2.0);
        }
        const int K = n == 2 ? 256 : (n == 3 ? 128 : 48);
        const auto r = geo::spherical_moment_suite(n, A, x, K);
        for (const auto& c : r.checks)
          dev = std::max(dev, c.deviation / std::max(1.0, std::abs(c.closed_form)));
      }
    rep.add("spherical_moment_identities", dev <= 1e-8, dev_str(dev));
  }
  {
    // Quartic eigenfunction products integrate exactly above Nyquist.
    const auto q24 = geo::build_manifold_quadrature({geo::ManifoldKind::Torus2}, 24);
    const auto q48 = geo::build_manifold_quadrature({geo::ManifoldKind::Torus2}, 48);
    auto quartic = [](const geo::ChartPoint& p) {
      return std::cos(2 * kPi * (p.u + 2 * p.v)) * std::cos(2 * kPi * (p.u - 2 * p.v)) *
             std::sin(2 * kPi * p.u) * std::sin(2 * kPi * (2 * p.u + p.v));
    };
    double a = 0, b = 0;
    for (const auto& n : q24.nodes) a += n.weight * quartic(n.x);
    for (const auto& n : q48.nodes) b += n.weight * quartic(n.x);
    rep.add("torus_trigonometric_exactness", std::abs(a - b) <= 1e-13, dev_str(std::abs(a - b)));
  }
  {
    Eigen::Matrix2d L;
    L << 2.0, 0.3, -0.1, 1.0;
    const double dev = geo::sphere_change_check(L, 256);
    rep.add("sphere_change_of_variables", dev <= 1e-8, dev_str(dev));
  }
  {
    double worst = 0;
    const double h = 1e-4;
    for (int t = 0; t < 30; ++t) {
      const auto x = random_point({geo::ManifoldKind::Sphere2}, seed + 3, t);
      Eigen::Vector3d e1, e2, f1, f2;
      geo::sphere_frame(x, e1, e2);
      geo::sphere_frame({x.u + h, x.v}, f1, f2);
      worst = std::max(worst, std::acos(std::clamp(e1.dot(f1), -1.0, 1.0)) / h);
    }
    rep.add("frame_smoothness", worst <= 20.0, "max angle/h " + format_double(worst));
  }
}

void field_suite(SuiteReport& rep, uint64_t seed, const FaultInjection&) {
  const std::vector<field::SpectralFieldSpec> specs = {
      make_rsh(5), make_arw(5), normalized(make_band_torus({1, 5})),
      make_anisotropic({{{1, 0}, 1.0}, {{0, 1}, 1.2}})};
  {
    double dev = 0;
    for (const auto& spec : specs) {
      const auto quad = geo::build_manifold_quadrature(spec.manifold, 16);
      for (const auto& n : quad.nodes) {
        double v = 0, val;
        Eigen::Vector2d g;
        for (int i = 0; i < spec.n_modes(); ++i) {
          field::eval_mode(spec, i, n.x, val, g);
          v += spec.modes[i].std * spec.modes[i].std * val * val;
        }
        dev = std::max(dev, std::abs(v - 1.0));
      }
    }
    rep.add("unit_variance_at_nodes", dev <= 1e-10, dev_str(dev));
  }
  {
    double worst = 0;
    for (const auto& spec : specs)
      for (int t = 0; t < 25; ++t) {
        const auto x = random_point(spec.manifold, seed + 4, 2 * t);
        const auto y = random_point(spec.manifold, seed + 4, 2 * t + 1);
        worst = std::max(worst, field::jet_norm(field::cov_jet(spec, x, y),
                                                field::metric_data(spec, x),
                                                field::metric_data(spec, y)));
      }
    rep.add("cauchy_schwarz_jet_norm", worst <= 1.0 + 1e-12, "max norm " + format_double(worst));
  }
  {
    double dev = 0;
    const auto spec = specs[2];
    for (int t = 0; t < 10; ++t) {
      const auto x = random_point(spec.manifold, seed + 5, 2 * t);
      const auto y = random_point(spec.manifold, seed + 5, 2 * t + 1);
      const auto a = field::cov_jet(spec, x, y);
      const auto b = field::cov_jet(spec, y, x);
      dev = std::max({dev, std::abs(a.c - b.c), (a.cpx - b.cpy).norm(),
                      (a.cpp - b.cpp.transpose()).norm()});
    }
    rep.add("jet_covariance_symmetry", dev <= 1e-12, dev_str(dev));
  }
  {
    const auto raw = make_band_torus({1, 5});
    const auto gp_raw = field::global_params(raw, 16, 8);
    const auto gp_unit = field::global_params(normalized(raw), 16, 8);
    rep.add("normalization_shrinks_eccentricity", gp_unit.eps <= gp_raw.eps + 1e-12,
            format_double(gp_unit.eps) + " vs " + format_double(gp_raw.eps));
  }
  {
    double dev = 0;
    for (const auto& spec : {make_rsh(7), make_arw(5)})
      for (int t = 0; t < 8; ++t) {
        const auto md =
            field::metric_data(spec, random_point(spec.manifold, seed + 6, t));
        dev = std::max(dev, std::abs(md.lambda_x * md.lambda_x - spec.modes[0].eigenvalue) /
                                spec.modes[0].eigenvalue);
      }
    rep.add("single_eigenvalue_pointwise_frequency", dev <= 1e-10, dev_str(dev));
  }
  {
    double dev = 0;
    for (const auto& spec : specs)
      for (int t = 0; t < 8; ++t) {
        const auto md = field::metric_data(spec, random_point(spec.manifold, seed + 7, t));
        dev = std::max(dev, (md.lam * md.lam - 2.0 * md.gf).norm() / md.gf.trace());
      }
    rep.add("frequency_endomorphism_square_root", dev <= 1e-12, dev_str(dev));
  }
  {
    bool ok = true;
    for (const auto& spec : specs) {
      const auto s1 = sample_field(spec, seed + 8);
      const auto s2 = sample_field(spec, seed + 8);
      ok = ok && s1.coeffs == s2.coeffs;
      const auto text = field::spec_to_json(spec).dump();
      const auto back = field::spec_from_json(nlohmann::json::parse(text));
      ok = ok && field::spec_to_json(back).dump() == text;
    }
    rep.add("sampling_and_serialization_determinism", ok,
            ok ? "bit-exact" : "round trip mismatch");
  }
}

void chaos_suite(SuiteReport& rep, uint64_t seed, const FaultInjection&) {
  const auto band = normalized(make_band_torus({1, 5}));
  const chaos::ChaosContext bctx(band, 24, 8);
  {
    const int nsamples = 500;
    std::vector<double> c2(nsamples), c4(nsamples);
    for (int i = 0; i < nsamples; ++i) {
      const auto s = sample_field(band, seed * 1000 + i);
      c2[i] = bctx.closed2_spectral(s);
      c4[i] = bctx.closed4(s).value;
    }
    double m2 = 0, m4 = 0;
    for (int i = 0; i < nsamples; ++i) {
      m2 += c2[i];
      m4 += c4[i];
    }
    m2 /= nsamples;
    m4 /= nsamples;
    double v2 = 0, v4 = 0, cov = 0, m22 = 0;
    for (int i = 0; i < nsamples; ++i) {
      v2 += (c2[i] - m2) * (c2[i] - m2);
      v4 += (c4[i] - m4) * (c4[i] - m4);
      cov += (c2[i] - m2) * (c4[i] - m4);
      m22 += (c2[i] - m2) * (c2[i] - m2) * (c4[i] - m4) * (c4[i] - m4);
    }
    v2 /= nsamples;
    v4 /= nsamples;
    cov /= nsamples;
    const bool centered = std::abs(m2) <= 4.0 * std::sqrt(v2 / nsamples) &&
                          std::abs(m4) <= 4.0 * std::sqrt(v4 / nsamples);
    rep.add("chaos_components_centered", centered,
            "means " + format_double(m2) + ", " + format_double(m4));
    const double se_cov = std::sqrt(std::max(0.0, m22 / nsamples - cov * cov) / nsamples);
    rep.add("chaos_orthogonality_2_4", std::abs(cov) <= 4.0 * se_cov,
            "cov " + format_double(cov) + " se " + format_double(se_cov));
  }
  {
    const auto aniso = make_anisotropic({{{1, 0}, 1.0}, {{0, 1}, 1.35}});
    const auto s = sample_field(aniso, seed + 11);
    auto dev = [&](int res, int K) {
      const chaos::ChaosContext ctx(aniso, res, K);
      return std::abs(ctx.chaos_q(s, 4, chaos::Form::general).value -
                      ctx.chaos_q(s, 4, chaos::Form::inverse_form).value);
    };
    const double d1 = dev(8, 4), d2 = dev(16, 8);
    rep.add("form_equivalence_halving", d2 <= std::max(0.5 * d1, 5e-14),
            format_double(d1) + " -> " + format_double(d2));
  }
  {
    double dev = 0;
    for (int t = 0; t < 3; ++t) {
      const auto s = sample_field(band, seed + 20 + t);
      for (int q : {2, 4})
        dev = std::max(dev, std::abs(bctx.chaos_q(s, q, chaos::Form::general).value -
                                     bctx.tilde_q(s, q).value));
    }
    rep.add("homothetic_surrogate_coincidence", dev <= 1e-8, dev_str(dev));
  }
  {
    const chaos::ChaosContext rctx(make_rsh(5), 48, 8);
    double worst = 0;
    bool spectral_zero = true;
    const chaos::ChaosContext actx(make_arw(5), 16, 8);
    for (int t = 0; t < 3; ++t) {
      const auto s = sample_field(rctx.spec(), seed + 30 + t);
      worst = std::max(worst, std::abs(rctx.chaos_q(s, 2, chaos::Form::general).value));
      spectral_zero =
          spectral_zero && actx.closed2_spectral(sample_field(actx.spec(), seed + 40 + t)) == 0.0;
    }
    rep.add("eigenfunction_second_chaos_cancellation", worst <= 1e-6 && spectral_zero,
            dev_str(worst));
  }
  {
    const double mean3 =
        chaos::chi_partial(Eigen::Vector3d{0.2, 0.4, -1.0}, Eigen::Matrix3d::Identity(), 0, 64);
    const double dev = std::abs(mean3 - 2.0 * std::sqrt(2.0 / kPi));
    bool lf = chaos::level_factor(0.0, 2) == 1.0 &&
              std::abs(chaos::level_factor(1.0, 0) - std::exp(-0.5)) <= 1e-15 &&
              chaos::level_factor(1.0, 1) == 0.0;
    rep.add("chi_partial_and_level_factors", dev <= 1e-9 && lf, dev_str(dev));
  }
}

void variance_suite(SuiteReport& rep, uint64_t seed, const FaultInjection&) {
  (void)seed;
  const std::vector<field::SpectralFieldSpec> specs = {
      make_rsh(5), make_arw(5), normalized(make_band_torus({1, 5})),
      make_anisotropic({{{1, 0}, 1.0}, {{0, 1}, 1.2}})};
  {
    bool ok = true;
    double margin = 1e300;
    for (const auto& spec : specs) {
      const int res = spec.manifold.kind == geo::ManifoldKind::Sphere2 ? 48 : 32;
      for (int q : {2, 4}) {
        const double ve = variance::var_exact(spec, q, res, 16);
        const double vb = variance::var_bound(spec, q, res, 16);
        ok = ok && ve >= -1e-10 && ve <= vb + 1e-8;
        margin = std::min(margin, vb - ve);
      }
    }
    rep.add("covariance_bound_dominates", ok, "min slack " + format_double(margin));
  }
  {
    const auto band = specs[2];
    const double ve = variance::var_exact(band, 2, 32, 16);
    const double vc = variance::var2_closed(band, 32);
    const double dev = std::abs(ve - vc) / std::max(1.0, std::abs(vc));
    rep.add("second_chaos_variance_routes", dev <= 1e-8, dev_str(dev));
  }
  {
    const auto arw = make_arw(1);
    const double ve = variance::var_exact(arw, 4, 24, 16);
    const double v4 = variance::var4_closed(arw, 24);
    const double dev = std::abs(ve - v4) / std::max(1e-300, std::abs(ve));
    rep.add("fourth_chaos_variance_routes", dev <= 1e-6, dev_str(dev));
  }
  {
    const double a = variance::var_exact(make_arw(1), 4, 12, 8);
    const double b = variance::var_exact_full(make_arw(1), 4, 12, 8);
    const double dev = std::abs(a - b) / std::max(1.0, std::abs(b));
    rep.add("stationarity_reduction", dev <= 1e-10, dev_str(dev));
  }
  {
    const auto rep1 = variance::berry_report(make_arw(5), 24);
    const auto rep2 = variance::berry_report(make_band_torus({1, 5}), 32);
    const bool ok = rep1.lhs <= 1e-12 && rep1.spectral_term == 0.0 &&
                    std::abs(rep2.ratio - 1.0) <= 1e-8;
    rep.add("berry_band_comparison", ok, "band ratio " + format_double(rep2.ratio));
  }
}

void nodal_suite(SuiteReport& rep, uint64_t seed, const FaultInjection&) {
  {
    field::SpectralFieldSpec spec;
    spec.manifold.kind = geo::ManifoldKind::Torus2;
    spec.modes.push_back({{0, 1, 0}, 4.0 * kPi * kPi, 1.0});
    field::FieldSample s;
    s.coeffs = {1.0 / std::sqrt(2.0)};
    const auto grid = nodal::build_grid(spec.manifold, 64);
    const double two = nodal::nodal_length(spec, s, grid, 0.0).length;

    field::SpectralFieldSpec z;
    z.manifold.kind = geo::ManifoldKind::Sphere2;
    z.modes.push_back({{1, 0, 0}, 2.0, 1.0});
    field::FieldSample zs;
    zs.coeffs = {1.0};
    const auto sgrid = nodal::build_grid(z.manifold, 128);
    const double eq = nodal::nodal_length(z, zs, sgrid, 0.0).length;
    const bool ok = std::abs(two - 2.0) <= 1e-10 && std::abs(eq - 2.0 * kPi) <= 0.01 * 2.0 * kPi;
    rep.add("known_level_sets", ok,
            "circles " + format_double(two) + ", equator " + format_double(eq));
  }
  {
    const auto spec = make_arw(5);
    const auto s = sample_field(spec, seed + 50);
    const double ref =
        nodal::nodal_length(spec, s, nodal::build_grid(spec.manifold, 512), 0.0).length;
    const double e64 = std::abs(
        nodal::nodal_length(spec, s, nodal::build_grid(spec.manifold, 64), 0.0).length - ref);
    const double e128 = std::abs(
        nodal::nodal_length(spec, s, nodal::build_grid(spec.manifold, 128), 0.0).length - ref);
    rep.add("grid_refinement_convergence", e128 <= e64 && e64 / std::max(e128, 1e-12) >= 2.0,
            format_double(e64) + " -> " + format_double(e128));
  }
  {
    const auto spec = make_arw(1);
    const nodal::NodalExtractor ex(spec, nodal::build_grid(spec.manifold, 128));
    const int nsamples = 200;
    double mean = 0, var = 0;
    std::vector<double> L(nsamples);
    for (int i = 0; i < nsamples; ++i) {
      L[i] = ex.extract(sample_field(spec, seed * 100 + i), 0.0).length;
      mean += L[i];
    }
    mean /= nsamples;
    for (double l : L) var += (l - mean) * (l - mean);
    var /= (nsamples - 1);
    const double expected = kPi / std::sqrt(2.0);
    const double tol = std::max(0.02 * expected, 4.0 * std::sqrt(var / nsamples));
    rep.add("kac_rice_mean", std::abs(mean - expected) <= tol,
            "mean " + format_double(mean) + " expected " + format_double(expected));
  }
  {
    const auto spec = make_arw(5);
    const nodal::NodalExtractor ex(spec, nodal::build_grid(spec.manifold, 128));
    const chaos::ChaosContext ctx(spec, 24, 8);
    const int nsamples = 300;
    std::vector<double> L(nsamples), c4(nsamples);
    for (int i = 0; i < nsamples; ++i) {
      const auto s = sample_field(spec, seed * 200 + i);
      L[i] = ex.extract(s, 0.0).length;
      c4[i] = ctx.closed4(s).value;
    }
    double mL = 0, m4 = 0;
    for (int i = 0; i < nsamples; ++i) {
      mL += L[i];
      m4 += c4[i];
    }
    mL /= nsamples;
    m4 /= nsamples;
    double varL = 0, var4 = 0, cov = 0, m22 = 0;
    for (int i = 0; i < nsamples; ++i) {
      varL += (L[i] - mL) * (L[i] - mL);
      var4 += (c4[i] - m4) * (c4[i] - m4);
      cov += (L[i] - mL) * (c4[i] - m4);
      m22 += (L[i] - mL) * (L[i] - mL) * (c4[i] - m4) * (c4[i] - m4);
    }
    varL /= (nsamples - 1);
    var4 /= (nsamples - 1);
    cov /= nsamples;
    const double v2 = variance::var_exact(spec, 2, 24, 16);
    const double v4 = variance::var_exact(spec, 4, 24, 16);
    const double seL = varL * std::sqrt(2.0 / (nsamples - 1.0));
    rep.add("variance_dominance", varL >= v2 + v4 - 4.0 * seL,
            "MC " + format_double(varL) + " >= " + format_double(v2 + v4));
    const double se_cov = std::sqrt(std::max(0.0, m22 / nsamples - cov * cov) / nsamples);
    rep.add("projection_identity", std::abs(cov - var4) <= 4.0 * std::sqrt(se_cov * se_cov +
                                                                           2.0 * var4 * var4 /
                                                                               (nsamples - 1.0)),
            "cov " + format_double(cov) + " var " + format_double(var4));
  }
  {
    const auto spec = make_arw(5);
    const auto s = sample_field(spec, seed + 60);
    const auto grid = nodal::build_grid(spec.manifold, 128);
    const auto a = nodal::nodal_length(spec, s, grid, 0.0);
    const auto b = nodal::nodal_length(spec, s, grid, 0.0);
    rep.add("extraction_determinism", a.length == b.length && a.degenerate_vertices ==
                                                                   b.degenerate_vertices,
            format_double(a.length));
  }
}

}  // namespace

SuiteReport run_suite(const std::string& name, uint64_t seed, const FaultInjection& fault) {
  SuiteReport rep;
  rep.suite = name;
  if (name == "specfun")
    specfun_suite(rep, seed, fault);
  else if (name == "geometry")
    geometry_suite(rep, seed, fault);
  else if (name == "field")
    field_suite(rep, seed, fault);
  else if (name == "chaos")
    chaos_suite(rep, seed, fault);
  else if (name == "variance")
    variance_suite(rep, seed, fault);
  else if (name == "nodal")
    nodal_suite(rep, seed, fault);
  else
    throw Error(errc::invalid_argument, "unknown verify suite: " + name);
  return rep;
}

}  // namespace ncx::verify
