// Invariant suites per module, runnable through the library and the CLI.
#pragma once

#include <string>
#include <vector>

#include "core/mathutil.hpp"

namespace ncx::verify {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  bool pass = true;

  void add(const std::string& name, bool ok, const std::string& detail = "");
};

// Test-only fault injection: lets the suite demonstrate that a corrupted
// constant is caught.
struct FaultInjection {
  bool flip_theta_sign = false;
};

SuiteReport run_suite(const std::string& name, uint64_t seed,
                      const FaultInjection& fault = {});
std::vector<std::string> suite_names();

}  // namespace ncx::verify
