#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crmt {

inline constexpr std::uint64_t kDefaultVerifySeed = 20240801ULL;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the full verification suite (13 criteria), writing CSV artifacts under
// out_dir and printing one pass/fail line per criterion to stdout.
std::vector<CriterionResult> run_acceptance(const std::string& out_dir,
                                            std::uint64_t master_seed);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace crmt
