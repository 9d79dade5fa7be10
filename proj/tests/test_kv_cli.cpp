#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crmt/experiments.hpp"
#include "crmt/kv.hpp"
#include "crmt/measures.hpp"

using crmt::KvMap;
using crmt::Mixture1D;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("kv parse and print round trip") {
  std::string text =
      "# comment line\n"
      "alpha = 1.5\n"
      "name = posterior_dp_jump\n"
      "\n"
      "grid = 1 2 3.5\n";
  KvMap kv = KvMap::parse(text);
  CHECK(kv.get_double("alpha") == 1.5);
  CHECK(kv.get("name") == "posterior_dp_jump");
  CHECK(kv.get_doubles("grid") == std::vector<double>{1.0, 2.0, 3.5});
  CHECK(!kv.has("missing"));
  CHECK(kv.get_double_or("missing", 7.0) == 7.0);

  KvMap again = KvMap::parse(kv.print());
  CHECK(again.print() == kv.print());

  CHECK_THROWS_AS(KvMap::parse("no equals sign"), std::invalid_argument);
  CHECK_THROWS_AS(kv.get("absent"), std::invalid_argument);
  CHECK_THROWS_AS(kv.get_double("name"), std::invalid_argument);
}

TEST_CASE("mixture serialization round trip") {
  Mixture1D m;
  m.add(0.25, Mixture1D::Atom{1.5});
  m.add(0.25, Mixture1D::Gaussian{-0.5, 2.0});
  m.add(0.25, Mixture1D::PoissonLaw{3.0});
  m.add(0.25, Mixture1D::Empirical{{0.1, 0.2, 0.30000000000000004}});

  KvMap kv;
  crmt::mixture_to_kv(m, "m.", kv);
  Mixture1D back = crmt::mixture_from_kv(KvMap::parse(kv.print()), "m.");

  REQUIRE(back.components.size() == 4);
  CHECK(std::get<Mixture1D::Atom>(back.components[0].part).x == 1.5);
  CHECK(std::get<Mixture1D::Gaussian>(back.components[1].part).var == 2.0);
  CHECK(std::get<Mixture1D::PoissonLaw>(back.components[2].part).mean == 3.0);
  CHECK(std::get<Mixture1D::Empirical>(back.components[3].part).points ==
        std::vector<double>{0.1, 0.2, 0.30000000000000004});
}

TEST_CASE("intensity serialization round trip") {
  crmt::ScaledLevyIntensity s;
  s.base_jump = crmt::JumpFamily::gen_gamma(2.5, 0.3);
  s.base = Mixture1D::gaussian(0.0, 1.0);
  s.base_weight = 0.6;
  s.fixed_atoms.push_back({1.25, crmt::JumpFamily::gamma(2.5), 0.4});

  KvMap kv;
  crmt::intensity_to_kv(s, "", kv);
  auto back = crmt::intensity_from_kv(KvMap::parse(kv.print()), "");
  CHECK(back.base_jump.kind == crmt::JumpFamily::Kind::GenGamma);
  CHECK(back.base_jump.rate == 2.5);
  CHECK(back.base_jump.sigma == 0.3);
  CHECK(back.base_weight == 0.6);
  REQUIRE(back.fixed_atoms.size() == 1);
  CHECK(back.fixed_atoms[0].location == 1.25);
  CHECK(back.fixed_atoms[0].weight == 0.4);
}

TEST_CASE("override merging reports the keys flags win on") {
  KvMap file = KvMap::parse("alpha = 2\nseed = 9\n");
  auto overridden = crmt::apply_overrides(file, {"alpha=3", "extra=1"});
  CHECK(file.get_double("alpha") == 3.0);
  CHECK(file.get_double("extra") == 1.0);
  CHECK(file.get_u64("seed") == 9);
  REQUIRE(overridden.size() == 1);
  CHECK(overridden[0] == "alpha");
  CHECK_THROWS_AS(crmt::apply_overrides(file, {"bad override"}),
                  std::invalid_argument);
}

TEST_CASE("stochastic experiments demand a seed") {
  CHECK(crmt::experiment_needs_seed("bound_check"));
  CHECK(!crmt::experiment_needs_seed("prior_gamma_jump"));
  KvMap empty;
  CHECK_THROWS_AS(
      crmt::run_experiment("posterior_dp_atoms_same_base", empty, "kv_tmp"),
      std::invalid_argument);
  CHECK_THROWS_AS(crmt::run_experiment("nonsense", empty, "kv_tmp"),
                  std::invalid_argument);
}

TEST_CASE("experiment CSV output is byte-deterministic") {
  namespace fs = std::filesystem;
  KvMap params;
  params.set("seed", std::uint64_t{77});
  params.set("alpha2_grid", std::string("50"));
  params.set("n_max", 40L);

  auto r1 = crmt::run_experiment("posterior_dp_atoms_same_base", params,
                                 "kv_tmp/a");
  auto r2 = crmt::run_experiment("posterior_dp_atoms_same_base", params,
                                 "kv_tmp/b");
  REQUIRE(r1.csv_files.size() == 1);
  REQUIRE(r2.csv_files.size() == 1);
  CHECK(slurp(r1.csv_files[0]) == slurp(r2.csv_files[0]));
  CHECK(!slurp(r1.csv_files[0]).empty());

  crmt::write_summary(r1, params, "kv_tmp/a");
  CHECK(fs::exists("kv_tmp/a/posterior_dp_atoms_same_base_summary.txt"));
  fs::remove_all("kv_tmp");
}

TEST_CASE("fast experiments run clean with small grids") {
  KvMap p1;
  p1.set("alpha2_grid", std::string("1.5 2 4"));
  auto r1 = crmt::run_experiment("prior_gamma_jump", p1, "kv_tmp2");
  CHECK(r1.all_pass());

  KvMap p2;
  p2.set("sigma_grid", std::string("0.2 0.5 0.8"));
  auto r2 = crmt::run_experiment("prior_gengamma_jump", p2, "kv_tmp2");
  CHECK(r2.all_pass());

  KvMap p3;
  p3.set("alpha2_grid", std::string("5"));
  p3.set("n_max", 25L);
  auto r3 = crmt::run_experiment("posterior_dp_jump", p3, "kv_tmp2");
  CHECK(r3.all_pass());

  std::filesystem::remove_all("kv_tmp2");
}
