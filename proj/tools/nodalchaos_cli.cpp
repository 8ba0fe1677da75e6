// Command line front end. Talks to the library exclusively through the C
// API in nodalchaos.h; its own job is assembling config JSON from flags and
// files and relaying summaries.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "nodalchaos/nodalchaos.h"

namespace {

using nlohmann::json;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<uint64_t> seed;
  std::optional<int> workers, resolution, fiber, samples;
  std::optional<double> level;
  std::string field_json;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_field = true) {
  cmd->add_option("--config", o.config_path, "JSON config file (flags override its keys)");
  cmd->add_option("--out", o.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "base seed (default 1, echoed in the summary)");
  cmd->add_option("--workers", o.workers, "worker threads (0 = hardware)");
  cmd->add_option("--resolution", o.resolution, "quadrature/grid resolution");
  cmd->add_option("--fiber", o.fiber, "fiber quadrature size K");
  cmd->add_option("--samples", o.samples, "Monte Carlo sample count");
  cmd->add_option("--level", o.level, "level t of the excursion");
  if (with_field)
    cmd->add_option("--field", o.field_json,
                    "field config JSON, e.g. '{\"builtin\":\"rsh\",\"ell\":10}'");
}

json load_config(const CommonOpts& o) {
  json cfg;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw CLI::ValidationError("--config", "cannot read " + o.config_path);
    in >> cfg;
  } else {
    cfg = json::object();
  }
  if (!cfg.contains("schema_version")) cfg["schema_version"] = 1;
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.workers) cfg["workers"] = *o.workers;
  if (o.resolution) cfg["resolution"] = *o.resolution;
  if (o.fiber) cfg["fiber"] = *o.fiber;
  if (o.samples) cfg["samples"] = *o.samples;
  if (o.level) cfg["level"] = *o.level;
  if (!o.field_json.empty()) cfg["field"] = json::parse(o.field_json);
  return cfg;
}

int finish(int rc, char* summary) {
  if (summary) {
    std::cout << summary << "\n";
    ncx_string_free(summary);
  }
  if (rc != NCX_OK) std::cerr << "error (" << rc << "): " << ncx_last_error() << "\n";
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nodal length chaos components of Gaussian fields: exact formulas, bounds, and "
               "Monte Carlo validation"};
  app.require_subcommand(1);

  CommonOpts constants_o, verify_o, simulate_o, variance_o, berry_o, nodal_o;
  int n_max = 6, q_max = 8;
  std::string suite = "all";
  std::vector<int> qs;
  std::vector<std::string> forms;
  std::vector<std::string> bands;
  std::string berry_manifold = "torus2";

  auto* c_constants =
      app.add_subcommand("constants", "closed-form constants against their oracles");
  add_common(c_constants, constants_o, false);
  c_constants->add_option("--n-max", n_max, "largest dimension index")->capture_default_str();
  c_constants->add_option("--q-max", q_max, "largest degree")->capture_default_str();

  auto* c_verify = app.add_subcommand("verify", "run an invariant suite");
  add_common(c_verify, verify_o, false);
  c_verify->add_option("--suite", suite,
                       "specfun|geometry|field|chaos|variance|nodal|all")
      ->capture_default_str();

  auto* c_simulate = app.add_subcommand("simulate", "per-sample chaos statistics to CSV");
  add_common(c_simulate, simulate_o);
  c_simulate->add_option("--q", qs, "chaos orders (even)");
  c_simulate->add_option("--form", forms, "evaluation forms");

  auto* c_variance = app.add_subcommand("variance", "exact variances, bounds and Monte Carlo");
  add_common(c_variance, variance_o);
  c_variance->add_option("--q", qs, "chaos orders (even)");

  auto* c_berry = app.add_subcommand("berry", "second-chaos comparison across band specs");
  add_common(c_berry, berry_o, false);
  c_berry->add_option("--band", bands, "band as comma-separated eigenvalue indices, repeatable");
  c_berry->add_option("--manifold", berry_manifold, "torus2|sphere2")->capture_default_str();

  auto* c_nodal = app.add_subcommand("nodal", "Monte Carlo nodal length moments");
  add_common(c_nodal, nodal_o);

  CLI11_PARSE(app, argc, argv);

  try {
    char* summary = nullptr;
    if (c_constants->parsed()) {
      json cfg = load_config(constants_o);
      if (c_constants->count("--n-max") || !cfg.contains("n_max")) cfg["n_max"] = n_max;
      if (c_constants->count("--q-max") || !cfg.contains("q_max")) cfg["q_max"] = q_max;
      const int rc = ncx_run_constants(cfg.dump().c_str(), constants_o.out_dir.c_str(), &summary);
      return finish(rc, summary);
    }
    if (c_verify->parsed()) {
      json cfg = load_config(verify_o);
      if (c_verify->count("--suite") || !cfg.contains("suite")) cfg["suite"] = suite;
      const int rc = ncx_run_verify(cfg.dump().c_str(), &summary);
      return finish(rc, summary);
    }
    if (c_simulate->parsed()) {
      json cfg = load_config(simulate_o);
      if (!qs.empty()) cfg["q"] = qs;
      if (!forms.empty()) cfg["forms"] = forms;
      const int rc = ncx_run_simulate(cfg.dump().c_str(), simulate_o.out_dir.c_str(), &summary);
      return finish(rc, summary);
    }
    if (c_variance->parsed()) {
      json cfg = load_config(variance_o);
      if (!qs.empty()) cfg["q"] = qs;
      const int rc = ncx_run_variance(cfg.dump().c_str(), variance_o.out_dir.c_str(), &summary);
      return finish(rc, summary);
    }
    if (c_berry->parsed()) {
      json cfg = load_config(berry_o);
      if (!bands.empty()) {
        json list = json::array();
        for (const auto& b : bands) {
          json one = json::array();
          std::size_t pos = 0;
          while (pos < b.size()) {
            const std::size_t comma = b.find(',', pos);
            one.push_back(std::stoi(b.substr(pos, comma - pos)));
            if (comma == std::string::npos) break;
            pos = comma + 1;
          }
          list.push_back(one);
        }
        cfg["bands"] = list;
      }
      if (c_berry->count("--manifold") || !cfg.contains("manifold"))
        cfg["manifold"] = berry_manifold;
      const int rc = ncx_run_berry(cfg.dump().c_str(), berry_o.out_dir.c_str(), &summary);
      return finish(rc, summary);
    }
    if (c_nodal->parsed()) {
      json cfg = load_config(nodal_o);
      const int rc = ncx_run_nodal(cfg.dump().c_str(), nodal_o.out_dir.c_str(), &summary);
      return finish(rc, summary);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return NCX_ERR_PARSE;
  }
  return 0;
}
