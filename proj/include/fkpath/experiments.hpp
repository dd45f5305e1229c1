#pragma once

#include <string>
#include <vector>

#include "fkpath/config.hpp"

namespace fkpath {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentOutcome {
  std::vector<CheckResult> checks;
  nlohmann::json summary;
  bool all_pass() const {
    for (const CheckResult& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Runs one configured experiment, writing CSV/JSON outputs under
// cfg.out_dir. Pure with respect to the config and seed: identical inputs
// produce byte-identical outputs regardless of thread count.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

// CLI entry: parse, run, print one PASS/FAIL line per declared check.
// Exit codes: 0 all checks pass, 2 config rejected, 3 numeric/check failure.
int run_config_file(const std::string& path);
int validate_config_file(const std::string& path);

}  // namespace fkpath
