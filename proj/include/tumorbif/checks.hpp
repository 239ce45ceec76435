#pragma once

#include <string>
#include <vector>

#include "tumorbif/io.hpp"

namespace tumorbif {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Property suite over the solver modules for the configured model and
/// grids. Deterministic: fixed seeds, no timing-dependent decisions.
std::vector<CheckResult> run_property_suite(const io::RunConfig& cfg);

}  // namespace tumorbif
