#pragma once

#include <string>
#include <vector>

#include "crmt/kv.hpp"

namespace crmt {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<CheckResult> checks;
  std::vector<std::string> csv_files;
  std::vector<std::string> notes;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Names of the available experiments, in fixed order.
const std::vector<std::string>& experiment_names();

bool experiment_needs_seed(const std::string& name);

// Runs one experiment. `params` overrides the documented defaults; CSV
// artifacts land in out_dir, along with <name>_summary.txt. Identical
// params and seed produce byte-identical CSV files.
ExperimentResult run_experiment(const std::string& name, const KvMap& params,
                                const std::string& out_dir);

// Config handling for the CLI: `apply_overrides` merges `key=value` strings
// over a file-loaded map; overridden keys are reported so the summary can
// note that flags win over the file.
KvMap load_config_file(const std::string& path);
std::vector<std::string> apply_overrides(KvMap& base,
                                         const std::vector<std::string>& kvs);

void write_summary(const ExperimentResult& result, const KvMap& params,
                   const std::string& out_dir);

}  // namespace crmt
