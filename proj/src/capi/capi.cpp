// C shim over the core library: opaque handles, thread-local error text,
// exceptions mapped to status codes.
#include "nodalchaos/nodalchaos.h"

#include <cstring>
#include <memory>
#include <string>

#include "core/chaos.hpp"
#include "core/nodal.hpp"
#include "core/runner.hpp"
#include "core/specfun.hpp"
#include "core/variance.hpp"

struct ncx_spec {
  ncx::field::SpectralFieldSpec spec;
};

struct ncx_sample {
  ncx::field::SpectralFieldSpec spec;
  ncx::field::FieldSample sample;
};

namespace {

thread_local std::string g_last_error;

int code_of(const ncx::Error& e) {
  switch (e.code()) {
    case ncx::errc::invalid_argument: return NCX_ERR_INVALID_ARGUMENT;
    case ncx::errc::domain: return NCX_ERR_DOMAIN;
    case ncx::errc::parse: return NCX_ERR_PARSE;
    case ncx::errc::io: return NCX_ERR_IO;
    case ncx::errc::check_failed: return NCX_ERR_CHECK_FAILED;
    case ncx::errc::internal: return NCX_ERR_INTERNAL;
  }
  return NCX_ERR_INTERNAL;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return NCX_OK;
  } catch (const ncx::Error& e) {
    g_last_error = e.what();
    return code_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NCX_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return NCX_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int require(bool cond, const char* msg) {
  if (!cond) {
    g_last_error = msg;
    return NCX_ERR_INVALID_ARGUMENT;
  }
  return NCX_OK;
}

int run_tool(const char* config_json, const char* out_dir, char** summary_json,
             nlohmann::json (*runner)(const nlohmann::json&, const std::string&)) {
  if (int rc = require(config_json && out_dir && summary_json, "null argument")) return rc;
  return guarded([&] {
    const auto cfg = nlohmann::json::parse(std::string(config_json), nullptr, false);
    if (cfg.is_discarded()) throw ncx::Error(ncx::errc::parse, "config is not valid JSON");
    *summary_json = dup_string(runner(cfg, out_dir).dump(2));
  });
}

}  // namespace

extern "C" {

const char* ncx_version(void) { return "1.0.0"; }

const char* ncx_last_error(void) { return g_last_error.c_str(); }

void ncx_string_free(char* s) { std::free(s); }

int ncx_hermite(int q, double x, double* out) {
  if (int rc = require(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = ncx::specfun::hermite(q, x); });
}

int ncx_hermite_at_zero(int a, double* out) {
  if (int rc = require(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = ncx::specfun::hermite_at_zero(a); });
}

int ncx_laguerre(int k, double alpha, double x, double* out) {
  if (int rc = require(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = ncx::specfun::laguerre(k, alpha, x); });
}

int ncx_sphere_area(int n, double* out) {
  if (int rc = require(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = ncx::specfun::sphere_area(n); });
}

int ncx_beta_const(int n, int q, double* out) {
  if (int rc = require(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = ncx::specfun::beta_const(n, q); });
}

int ncx_c_chi(int b, double* out) {
  if (int rc = require(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = ncx::specfun::c_chi(b); });
}

int ncx_a_coeff(int n, int b, double* out) {
  if (int rc = require(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = ncx::specfun::a_coeff(n, b); });
}

int ncx_theta(int a, int b, double* out) {
  if (int rc = require(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = ncx::specfun::theta(a, b); });
}

int ncx_c_dq(int d, int q, double* out) {
  if (int rc = require(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = ncx::specfun::c_dq(d, q); });
}

int ncx_diagram4(int a, int b, int a2, int b2, double c13, double c14, double c23, double c24,
                 double* out) {
  if (int rc = require(out != nullptr, "null output")) return rc;
  return guarded([&] {
    ncx::specfun::DiagramArgs args{a, b, a2, b2, c13, c14, c23, c24};
    *out = ncx::specfun::diagram4(args);
  });
}

int ncx_wick_oracle(const int deg[4], const double cov[16], double* out) {
  if (int rc = require(deg && cov && out, "null argument")) return rc;
  return guarded([&] {
    std::array<int, 4> d;
    std::array<double, 16> c;
    std::copy(deg, deg + 4, d.begin());
    std::copy(cov, cov + 16, c.begin());
    *out = ncx::specfun::wick_oracle(d, c);
  });
}

int ncx_coefficient_bound(int q, double* sum, double* bound) {
  if (int rc = require(sum && bound, "null output")) return rc;
  return guarded([&] {
    const auto cb = ncx::specfun::coefficient_bound(q);
    *sum = cb.sum;
    *bound = cb.bound;
  });
}

int ncx_level_factor(double t, int a, double* out) {
  if (int rc = require(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = ncx::chaos::level_factor(t, a); });
}

int ncx_spec_rsh(int ell, ncx_spec** out) {
  if (int rc = require(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = new ncx_spec{ncx::field::make_rsh(ell)}; });
}

int ncx_spec_arw(int m, ncx_spec** out) {
  if (int rc = require(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = new ncx_spec{ncx::field::make_arw(m)}; });
}

int ncx_spec_band_torus(const int* ms, size_t n_ms, int normalize, ncx_spec** out) {
  if (int rc = require(ms && out, "null argument")) return rc;
  return guarded([&] {
    auto spec = ncx::field::make_band_torus(std::vector<int>(ms, ms + n_ms));
    if (normalize) spec = ncx::field::normalized(spec);
    *out = new ncx_spec{std::move(spec)};
  });
}

int ncx_spec_band_sphere(const int* ells, size_t n_ells, int normalize, ncx_spec** out) {
  if (int rc = require(ells && out, "null argument")) return rc;
  return guarded([&] {
    auto spec = ncx::field::make_band_sphere(std::vector<int>(ells, ells + n_ells));
    if (normalize) spec = ncx::field::normalized(spec);
    *out = new ncx_spec{std::move(spec)};
  });
}

int ncx_spec_anisotropic(const int* k1, const int* k2, const double* stds, size_t n,
                         ncx_spec** out) {
  if (int rc = require(k1 && k2 && stds && out, "null argument")) return rc;
  return guarded([&] {
    std::vector<std::pair<Eigen::Vector2i, double>> freqs;
    for (size_t i = 0; i < n; ++i) freqs.push_back({{k1[i], k2[i]}, stds[i]});
    *out = new ncx_spec{ncx::field::make_anisotropic(freqs)};
  });
}

int ncx_spec_from_json(const char* text, ncx_spec** out) {
  if (int rc = require(text && out, "null argument")) return rc;
  return guarded([&] {
    const auto j = nlohmann::json::parse(std::string(text), nullptr, false);
    if (j.is_discarded()) throw ncx::Error(ncx::errc::parse, "spec is not valid JSON");
    *out = new ncx_spec{ncx::field::spec_from_json(j)};
  });
}

int ncx_spec_to_json(const ncx_spec* spec, char** out) {
  if (int rc = require(spec && out, "null argument")) return rc;
  return guarded([&] { *out = dup_string(ncx::field::spec_to_json(spec->spec).dump()); });
}

void ncx_spec_free(ncx_spec* spec) { delete spec; }

int ncx_spec_n_modes(const ncx_spec* spec, size_t* out) {
  if (int rc = require(spec && out, "null argument")) return rc;
  *out = spec->spec.modes.size();
  return NCX_OK;
}

int ncx_spec_global_params(const ncx_spec* spec, int resolution, int K, double* sigma,
                           double* lambda, double* eps) {
  if (int rc = require(spec && sigma && lambda && eps, "null argument")) return rc;
  return guarded([&] {
    const auto gp = ncx::field::global_params(spec->spec, resolution, K);
    *sigma = gp.sigma;
    *lambda = gp.lambda;
    *eps = gp.eps;
  });
}

int ncx_sample_create(const ncx_spec* spec, uint64_t seed, ncx_sample** out) {
  if (int rc = require(spec && out, "null argument")) return rc;
  return guarded([&] {
    *out = new ncx_sample{spec->spec, ncx::field::sample_field(spec->spec, seed)};
  });
}

void ncx_sample_free(ncx_sample* sample) { delete sample; }

int ncx_sample_eval(const ncx_sample* sample, double u, double v, double* value, double grad[2]) {
  if (int rc = require(sample && value && grad, "null argument")) return rc;
  return guarded([&] {
    const auto jet = ncx::field::eval_jet(sample->spec, sample->sample, {u, v});
    *value = jet.value;
    grad[0] = jet.grad[0];
    grad[1] = jet.grad[1];
  });
}

int ncx_chaos_q(const ncx_sample* sample, int q, int resolution, int K, const char* form,
                double level, double* out) {
  if (int rc = require(sample && form && out, "null argument")) return rc;
  return guarded([&] {
    const auto f = ncx::chaos::form_from_string(form);
    const ncx::chaos::ChaosContext ctx(sample->spec, resolution, K);
    switch (f) {
      case ncx::chaos::Form::tilde: *out = ctx.tilde_q(sample->sample, q).value; break;
      case ncx::chaos::Form::closed2: *out = ctx.closed2(sample->sample).value; break;
      case ncx::chaos::Form::closed4: *out = ctx.closed4(sample->sample).value; break;
      default: *out = ctx.chaos_q(sample->sample, q, f, level).value;
    }
  });
}

int ncx_nodal_length(const ncx_sample* sample, int resolution, double level, double* length,
                     int* degenerate_vertices) {
  if (int rc = require(sample && length, "null argument")) return rc;
  return guarded([&] {
    const auto grid = ncx::nodal::build_grid(sample->spec.manifold, resolution);
    const auto res = ncx::nodal::nodal_length(sample->spec, sample->sample, grid, level);
    *length = res.length;
    if (degenerate_vertices) *degenerate_vertices = res.degenerate_vertices;
  });
}

int ncx_var_exact(const ncx_spec* spec, int q, int resolution, int K, double* out) {
  if (int rc = require(spec && out, "null argument")) return rc;
  return guarded([&] { *out = ncx::variance::var_exact(spec->spec, q, resolution, K); });
}

int ncx_var_bound(const ncx_spec* spec, int q, int resolution, int K, double* out) {
  if (int rc = require(spec && out, "null argument")) return rc;
  return guarded([&] { *out = ncx::variance::var_bound(spec->spec, q, resolution, K); });
}

int ncx_var2_closed(const ncx_spec* spec, int resolution, double* out) {
  if (int rc = require(spec && out, "null argument")) return rc;
  return guarded([&] { *out = ncx::variance::var2_closed(spec->spec, resolution); });
}

int ncx_var4_closed(const ncx_spec* spec, int resolution, double* out) {
  if (int rc = require(spec && out, "null argument")) return rc;
  return guarded([&] { *out = ncx::variance::var4_closed(spec->spec, resolution); });
}

int ncx_jet_norm(const ncx_spec* spec, double xu, double xv, double yu, double yv, double* out) {
  if (int rc = require(spec && out, "null argument")) return rc;
  return guarded([&] {
    const ncx::geo::ChartPoint x{xu, xv}, y{yu, yv};
    *out = ncx::field::jet_norm(ncx::field::cov_jet(spec->spec, x, y),
                                ncx::field::metric_data(spec->spec, x),
                                ncx::field::metric_data(spec->spec, y));
  });
}

int ncx_run_constants(const char* config_json, const char* out_dir, char** summary_json) {
  const int rc = run_tool(config_json, out_dir, summary_json, &ncx::runner::run_constants);
  if (rc != NCX_OK) return rc;
  const auto summary = nlohmann::json::parse(*summary_json);
  if (!summary.at("pass").get<bool>()) {
    g_last_error = "constant oracle deviation exceeds 1e-8";
    return NCX_ERR_CHECK_FAILED;
  }
  return NCX_OK;
}

int ncx_run_verify(const char* config_json, char** report_json) {
  if (int rc = require(config_json && report_json, "null argument")) return rc;
  bool pass = false;
  const int rc = guarded([&] {
    const auto cfg = nlohmann::json::parse(std::string(config_json), nullptr, false);
    if (cfg.is_discarded()) throw ncx::Error(ncx::errc::parse, "config is not valid JSON");
    const auto rep = ncx::runner::run_verify(cfg);
    pass = rep.at("pass").get<bool>();
    *report_json = dup_string(rep.dump(2));
  });
  if (rc != NCX_OK) return rc;
  if (!pass) {
    g_last_error = "one or more invariant checks failed";
    return NCX_ERR_CHECK_FAILED;
  }
  return NCX_OK;
}

int ncx_run_simulate(const char* config_json, const char* out_dir, char** summary_json) {
  return run_tool(config_json, out_dir, summary_json, &ncx::runner::run_simulate);
}

int ncx_run_variance(const char* config_json, const char* out_dir, char** summary_json) {
  const int rc = run_tool(config_json, out_dir, summary_json, &ncx::runner::run_variance);
  if (rc != NCX_OK) return rc;
  const auto summary = nlohmann::json::parse(*summary_json);
  if (!summary.at("bound_dominates").get<bool>()) {
    g_last_error = "exact variance exceeds the 2^q covariance bound";
    return NCX_ERR_CHECK_FAILED;
  }
  return NCX_OK;
}

int ncx_run_berry(const char* config_json, const char* out_dir, char** summary_json) {
  return run_tool(config_json, out_dir, summary_json, &ncx::runner::run_berry);
}

int ncx_run_nodal(const char* config_json, const char* out_dir, char** summary_json) {
  return run_tool(config_json, out_dir, summary_json, &ncx::runner::run_nodal);
}

}  // extern "C"
