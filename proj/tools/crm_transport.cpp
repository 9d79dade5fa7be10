// crm-transport: experiment harness for optimal-transport distances between
// scaled completely random measures.
//
//   crm-transport run --experiment <name> --seed <u64> [--config <path>]
//                     [--out <dir>] [--mc <n>] [--set key=value ...]
//   crm-transport verify [--out <dir>] [--seed <u64>]
//
// `run` writes one CSV per experiment plus a text summary with the built-in
// checks; `verify` executes the full verification suite and exits 0 only if
// every criterion passes.
#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "crmt/acceptance.hpp"
#include "crmt/experiments.hpp"
#include "crmt/kv.hpp"

int main(int argc, char** argv) {
  CLI::App app{"optimal transport distances between scaled CRMs"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one experiment");
  std::string experiment;
  std::string config_path;
  std::string out_dir = "out";
  std::string seed_str;
  long mc = -1;
  std::vector<std::string> overrides;
  run->add_option("--experiment", experiment, "experiment name")->required();
  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--out", out_dir, "output directory (default: out)");
  run->add_option("--seed", seed_str, "master seed (required when stochastic)");
  run->add_option("--mc", mc, "Monte Carlo budget override");
  run->add_option("--set", overrides, "extra key=value parameter overrides");

  auto* verify = app.add_subcommand("verify", "run the verification suite");
  std::string verify_out = "verify_out";
  std::string verify_seed;
  verify->add_option("--out", verify_out, "output directory");
  verify->add_option("--seed", verify_seed, "master seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run)) {
      bool known = false;
      for (const auto& name : crmt::experiment_names())
        known = known || name == experiment;
      if (!known) {
        std::fprintf(stderr, "unknown experiment '%s'; available:\n",
                     experiment.c_str());
        for (const auto& name : crmt::experiment_names())
          std::fprintf(stderr, "  %s\n", name.c_str());
        return 2;
      }

      crmt::KvMap params;
      if (!config_path.empty()) params = crmt::load_config_file(config_path);
      std::vector<std::string> flag_overrides = overrides;
      if (!seed_str.empty()) flag_overrides.push_back("seed=" + seed_str);
      if (mc >= 0) flag_overrides.push_back("mc=" + std::to_string(mc));
      auto overridden = crmt::apply_overrides(params, flag_overrides);

      if (crmt::experiment_needs_seed(experiment) && !params.has("seed")) {
        std::fprintf(stderr,
                     "experiment '%s' is stochastic: --seed is required\n",
                     experiment.c_str());
        return 2;
      }

      auto result = crmt::run_experiment(experiment, params, out_dir);
      for (const auto& key : overridden)
        result.notes.push_back("flag overrode config value for '" + key + "'");
      crmt::write_summary(result, params, out_dir);
      for (const auto& c : result.checks)
        std::printf("[%s] %s: %s\n", c.pass ? "pass" : "FAIL", c.name.c_str(),
                    c.detail.c_str());
      for (const auto& n : result.notes) std::printf("note: %s\n", n.c_str());
      for (const auto& f : result.csv_files)
        std::printf("wrote %s\n", f.c_str());
      return result.all_pass() ? 0 : 3;
    }

    std::uint64_t seed = crmt::kDefaultVerifySeed;
    if (!verify_seed.empty()) {
      crmt::KvMap tmp;
      tmp.set("seed", verify_seed);
      seed = tmp.get_u64("seed");
    }
    auto results = crmt::run_acceptance(verify_out, seed);
    return crmt::all_passed(results) ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
