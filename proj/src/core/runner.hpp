// Experiment drivers behind the CLI subcommands: constants tables, invariant
// suites, chaos batches, variance reports, band comparisons and nodal Monte
// Carlo, with CSV/JSON outputs and static SVG plots.
#pragma once

#include <string>

#include "core/field.hpp"

namespace ncx::runner {

// Builds a spec from a config value: {"builtin": ...}, an inline spec
// object, or {"file": "path"}.
field::SpectralFieldSpec spec_from_config(const nlohmann::json& j);

// Each runner validates its config (schema_version = 1, unknown keys
// rejected), writes its artifacts under out_dir, and returns a summary.
nlohmann::json run_constants(const nlohmann::json& cfg, const std::string& out_dir);
nlohmann::json run_verify(const nlohmann::json& cfg);
nlohmann::json run_simulate(const nlohmann::json& cfg, const std::string& out_dir);
nlohmann::json run_variance(const nlohmann::json& cfg, const std::string& out_dir);
nlohmann::json run_berry(const nlohmann::json& cfg, const std::string& out_dir);
nlohmann::json run_nodal(const nlohmann::json& cfg, const std::string& out_dir);

}  // namespace ncx::runner
