#include "crmt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "crmt/asymptotics.hpp"
#include "crmt/measures.hpp"
#include "crmt/posterior.hpp"
#include "crmt/simulate.hpp"
#include "crmt/transport.hpp"

namespace crmt {

namespace {

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path);
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out_ << ',';
      out_ << columns[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i]))
        throw std::runtime_error("experiment produced a non-finite value");
      if (i) out_ << ',';
      out_ << format_double(values[i]);
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

std::string csv_path(const std::string& out_dir, const std::string& name) {
  std::filesystem::create_directories(out_dir);
  return (std::filesystem::path(out_dir) / (name + ".csv")).string();
}

void check(ExperimentResult& r, const std::string& name, bool pass,
           const std::string& detail) {
  r.checks.push_back({name, pass, detail});
}

std::vector<double> default_doubles(const KvMap& p, const std::string& key,
                                    std::vector<double> fallback) {
  if (!p.has(key)) return fallback;
  return p.get_doubles(key);
}

Mixture1D gaussian_from(const KvMap& p, const std::string& mean_key,
                        double mean, const std::string& var_key, double var) {
  return Mixture1D::gaussian(p.get_double_or(mean_key, mean),
                             p.get_double_or(var_key, var));
}

std::uint64_t required_seed(const KvMap& p, const std::string& name) {
  if (!p.has("seed"))
    throw std::invalid_argument("experiment '" + name +
                                "' is stochastic: --seed is required");
  return p.get_u64("seed");
}

// ---------------------------------------------------------------- priors

ExperimentResult run_prior_gamma_jump(const KvMap& p,
                                      const std::string& out_dir) {
  ExperimentResult r;
  r.experiment = "prior_gamma_jump";
  std::vector<double> grid = default_doubles(p, "alpha2_grid", [] {
    std::vector<double> g;
    for (double a = 1.05; a <= 20.0; a *= 1.12) g.push_back(a);
    g.push_back(20.0);
    return g;
  }());
  double C = constant_C();
  std::string path = csv_path(out_dir, r.experiment);
  CsvWriter csv(path, {"alpha2", "jump", "bound"});
  bool below = true, increasing = true;
  double prev = -1.0;
  for (double a2 : grid) {
    double j = jump_gamma_gamma(1.0, a2);
    double bound = C * std::log(a2);
    csv.row({a2, j, bound});
    below = below && j <= bound + 1e-12;
    increasing = increasing && j > prev;
    prev = j;
  }
  r.csv_files.push_back(path);
  check(r, "jump_below_bound", below, "J(1,a2) <= C log(a2) on the grid");
  check(r, "jump_increasing", increasing, "J(1,a2) increasing in a2");
  return r;
}

ExperimentResult run_prior_gengamma_jump(const KvMap& p,
                                         const std::string& out_dir) {
  ExperimentResult r;
  r.experiment = "prior_gengamma_jump";
  std::vector<double> grid = default_doubles(p, "sigma_grid", [] {
    std::vector<double> g;
    for (double s = 0.05; s < 0.96; s += 0.05) g.push_back(s);
    return g;
  }());
  std::string path = csv_path(out_dir, r.experiment);
  CsvWriter csv(path, {"sigma", "jump"});
  bool increasing = true;
  double prev = -1.0;
  for (double s : grid) {
    double j = jump_gengamma_gamma(s);
    csv.row({s, j});
    increasing = increasing && j > prev;
    prev = j;
  }
  r.csv_files.push_back(path);
  double slope = jump_gengamma_gamma(1e-3) / 1e-3;
  check(r, "jump_increasing", increasing, "J(sigma) increasing on the grid");
  check(r, "origin_slope", slope > 0.77 && slope < 0.81,
        "J(1e-3)/1e-3 = " + format_double(slope) + ", expected in [0.77,0.81]");
  return r;
}

// ------------------------------------------------------------- posterior

ExperimentResult run_posterior_dp_jump(const KvMap& p,
                                       const std::string& out_dir) {
  ExperimentResult r;
  r.experiment = "posterior_dp_jump";
  double a1 = p.get_double_or("alpha1", 1.0);
  std::vector<double> a2s = default_doubles(p, "alpha2_grid", {2.0, 5.0, 10.0});
  long n_max = p.get_long_or("n_max", 100);
  double C = constant_C();
  std::string path = csv_path(out_dir, r.experiment);
  CsvWriter csv(path, {"n", "alpha2", "jump", "bound"});
  bool decreasing = true, below = true;
  for (double a2 : a2s) {
    double prev = 1e300;
    for (long n = 0; n <= n_max; ++n) {
      double j = jump_gamma_gamma(a1 + n, a2 + n);
      double bound = C * std::log((a2 + n) / (a1 + n));
      csv.row({static_cast<double>(n), a2, j, bound});
      decreasing = decreasing && j < prev;
      below = below && j <= bound + 1e-12;
      prev = j;
    }
  }
  r.csv_files.push_back(path);
  check(r, "jump_decreasing_in_n", decreasing, "J(a1,a2,n) decreasing in n");
  check(r, "jump_below_bound", below, "J <= C log((a2+n)/(a1+n)) at every n");
  return r;
}

ExperimentResult run_posterior_dp_atoms_same_alpha(const KvMap& p,
                                                   const std::string& out_dir) {
  ExperimentResult r;
  r.experiment = "posterior_dp_atoms_same_alpha";
  Rng rng(required_seed(p, r.experiment));
  std::vector<double> alphas = default_doubles(p, "alpha_grid", {1.0, 10.0, 100.0});
  long n_max = p.get_long_or("n_max", 200);
  Mixture1D base1 = gaussian_from(p, "base1_mean", 1.0, "base1_var", 1.0);
  Mixture1D base2 = gaussian_from(p, "base2_mean", 2.0, "base2_var", 1.0);
  DataSequence data = gen_iid(
      Mixture1D::poisson(p.get_double_or("data_poisson_mean", 1.0)),
      static_cast<std::size_t>(n_max), rng);
  double w_bases = w1_mixture(base1, base2);

  std::string path = csv_path(out_dir, r.experiment);
  CsvWriter csv(path, {"n", "alpha", "atom", "exact"});
  double worst = 0.0;
  bool decreasing = true;
  for (double a : alphas) {
    double prev = 1e300;
    for (long n = 0; n <= n_max; n += (n < 20 ? 1 : 10)) {
      auto rep = dw_posterior_dp(a, base1, a, base2,
                                 data.summary(static_cast<std::size_t>(n)));
      double exact = a / (a + n) * w_bases;
      csv.row({static_cast<double>(n), a, rep.atom_part, exact});
      worst = std::max(worst, std::abs(rep.atom_part - exact));
      decreasing = decreasing && rep.atom_part < prev + 1e-12;
      prev = rep.atom_part;
    }
  }
  r.csv_files.push_back(path);
  check(r, "atom_exact_formula", worst <= 1e-8,
        "max |A - a/(a+n) W1(P1,P2)| = " + format_double(worst));
  check(r, "atom_decreasing", decreasing, "A decreasing in n for equal alphas");
  return r;
}

ExperimentResult run_posterior_dp_atoms_same_base(const KvMap& p,
                                                  const std::string& out_dir) {
  ExperimentResult r;
  r.experiment = "posterior_dp_atoms_same_base";
  Rng rng(required_seed(p, r.experiment));
  double a1 = p.get_double_or("alpha1", 10.0);
  std::vector<double> a2s = default_doubles(p, "alpha2_grid", {50.0, 100.0, 500.0});
  long n_max = p.get_long_or("n_max", 200);
  Mixture1D base = gaussian_from(p, "base_mean", 1.0, "base_var", 1.0);
  DataSequence data = gen_iid(
      Mixture1D::poisson(p.get_double_or("data_poisson_mean", 1.0)),
      static_cast<std::size_t>(n_max), rng);

  std::string path = csv_path(out_dir, r.experiment);
  CsvWriter csv(path, {"n", "alpha2", "atom"});
  for (double a2 : a2s) {
    long argmax = 1;
    double best = -1.0;
    for (long n = 1; n <= n_max; ++n) {
      auto rep = dw_posterior_dp(a1, base, a2, base,
                                 data.summary(static_cast<std::size_t>(n)));
      csv.row({static_cast<double>(n), a2, rep.atom_part});
      if (rep.atom_part > best) {
        best = rep.atom_part;
        argmax = n;
      }
    }
    r.notes.push_back("alpha2 = " + format_double(a2) + ": atom peak at n = " +
                      std::to_string(argmax) + " (sqrt(a1 a2) = " +
                      format_double(std::sqrt(a1 * a2)) + ")");
    if (a2 == 500.0)
      check(r, "peak_window_alpha2_500", argmax >= 40 && argmax <= 100,
            "peak at n = " + std::to_string(argmax) + ", window [40,100]");
  }
  r.csv_files.push_back(path);
  if (r.checks.empty())
    check(r, "peak_recorded", true, "peak locations recorded in the summary");
  return r;
}

// ------------------------------------------------------------ asymptotics

ExperimentResult run_latent_phase(const KvMap& p, const std::string& out_dir) {
  ExperimentResult r;
  r.experiment = "latent_phase";
  double sigma = p.get_double_or("sigma", 0.3);
  double alpha = p.get_double_or("alpha", 1.0);
  double lambda = p.get_double_or("lambda", 1.0);
  std::vector<double> ns =
      default_doubles(p, "n_grid", {100, 316, 1000, 3162, 10000});
  double expo = sigma / (1.0 + sigma);

  std::string path = csv_path(out_dir, r.experiment);
  CsvWriter csv(path, {"n", "regime", "k", "expected_scale", "rate", "ratio"});
  // regimes: 0 sub (k = ceil(log n)), 1 critical (k = ceil(lambda n^p)),
  // 2 super (k = ceil(n^0.9))
  std::vector<std::vector<double>> scales(3);
  bool band = true;
  for (int regime = 0; regime < 3; ++regime) {
    for (double nd : ns) {
      long n = static_cast<long>(nd);
      long k;
      RegimeSpec spec = RegimeSpec::sub_critical();
      if (regime == 0) {
        k = static_cast<long>(std::ceil(std::log(nd)));
      } else if (regime == 1) {
        k = static_cast<long>(std::ceil(lambda * std::pow(nd, expo)));
        spec = RegimeSpec::critical(lambda);
      } else {
        k = static_cast<long>(std::ceil(std::pow(nd, 0.9)));
        spec = RegimeSpec::super_critical();
      }
      LatentLaw law{alpha, sigma, n, k};
      double scale = expected_latent_scale(law);
      double rate = latent_rate(alpha, sigma, spec, n, k);
      double ratio = scale / rate;
      csv.row({nd, static_cast<double>(regime), static_cast<double>(k), scale,
               rate, ratio});
      scales[regime].push_back(scale);
      if (n == static_cast<long>(ns.back()))
        band = band && ratio >= 0.8 && ratio <= 1.25;
    }
  }
  r.csv_files.push_back(path);
  check(r, "ratio_band_at_nmax", band,
        "E[(1+U)^sigma]/r_n within [0.8, 1.25] at the largest n");
  // log-log slope over the last grid step
  auto slope = [&](int regime) {
    std::size_t m = ns.size();
    return std::log(scales[regime][m - 1] / scales[regime][m - 2]) /
           std::log(ns[m - 1] / ns[m - 2]);
  };
  bool slopes = std::abs(slope(0) - expo) < 0.1 &&
                std::abs(slope(1) - expo) < 0.1 && std::abs(slope(2) - 0.9) < 0.1;
  check(r, "loglog_slopes", slopes,
        "slopes " + format_double(slope(0)) + ", " + format_double(slope(1)) +
            ", " + format_double(slope(2)) + " vs " + format_double(expo) +
            ", " + format_double(expo) + ", 0.9");
  return r;
}

// ---------------------------------------------------------------- merging

ExperimentResult run_merging(const KvMap& p, const std::string& out_dir,
                             bool pitman_yor) {
  ExperimentResult r;
  r.experiment = pitman_yor ? "merging_py_data" : "merging_dp_data";
  Rng rng(required_seed(p, r.experiment));
  double alpha = p.get_double_or("alpha", 100.0);
  std::vector<double> sigmas = default_doubles(p, "sigma_grid", {0.2, 0.5, 0.8});
  long n_pow_max = p.get_long_or("n_pow_max", 12);
  std::size_t mc = static_cast<std::size_t>(p.get_long_or("mc", 200));
  Mixture1D base = gaussian_from(p, "base_mean", 0.0, "base_var", 1.0);
  double abar = p.get_double_or("data_alpha_bar", 1.0);
  double sbar = p.get_double_or("data_sigma_bar", 0.9);
  Mixture1D data_base = gaussian_from(p, "data_base_mean", 0.0, "data_base_var", 1.0);

  std::size_t n_max = static_cast<std::size_t>(1) << n_pow_max;
  DataSequence data;
  if (p.has("data_file")) {
    data = DataSequence::load_csv(p.get("data_file"));
    if (data.values.size() < n_max)
      throw std::invalid_argument("data_file has fewer than n_max values");
    r.notes.push_back("data replayed from " + p.get("data_file"));
  } else {
    data = pitman_yor ? gen_pitman_yor(abar, sbar, data_base, n_max, rng)
                      : gen_crp(abar, data_base, n_max, rng);
    std::string data_path = csv_path(out_dir, r.experiment + "_data");
    data.save_csv(data_path);
    r.csv_files.push_back(data_path);
  }

  std::string path = csv_path(out_dir, r.experiment);
  CsvWriter csv(path, {"n", "sigma", "k", "estimate", "std_error"});
  bool decreased = true;
  for (double sigma : sigmas) {
    double first = -1.0, last = -1.0;
    for (long pw = 4; pw <= n_pow_max; ++pw) {
      std::size_t n = static_cast<std::size_t>(1) << pw;
      PosteriorState state = data.summary(n);
      Rng stream = rng.substream((pw << 8) ^ static_cast<long>(sigma * 1e3));
      auto rep =
          dw_posterior_gengamma_vs_dp(alpha, sigma, base, state, mc, stream);
      csv.row({static_cast<double>(n), sigma, static_cast<double>(state.k()),
               rep.total, rep.mc_std_error.value_or(0.0)});
      if (first < 0.0) first = rep.total;
      last = rep.total;
    }
    if (!pitman_yor) decreased = decreased && last < first;
  }
  r.csv_files.push_back(path);
  if (pitman_yor) {
    double k_ratio = static_cast<double>(data.summary(n_max).k()) /
                     std::pow(static_cast<double>(n_max), sbar);
    check(r, "k_growth_power", k_ratio > 0.2 && k_ratio < 5.0,
          "k_n / n^sbar = " + format_double(k_ratio));
  } else {
    double k_ratio = static_cast<double>(data.summary(n_max).k()) /
                     (abar * std::log(static_cast<double>(n_max)));
    check(r, "k_growth_log", k_ratio > 0.3 && k_ratio < 3.0,
          "k_n / (abar log n) = " + format_double(k_ratio));
    check(r, "distance_decreases", decreased,
          "posterior distance decreases from the smallest to the largest n");
  }
  return r;
}

ExperimentResult run_continuous_limit(const KvMap& p,
                                      const std::string& out_dir) {
  ExperimentResult r;
  r.experiment = "continuous_limit";
  Rng rng(required_seed(p, r.experiment));
  double alpha = p.get_double_or("alpha", 100.0);
  double sigma = p.get_double_or("sigma", 0.5);
  std::vector<double> ns = default_doubles(p, "n_grid", {250, 1000, 2000});
  std::size_t mc = static_cast<std::size_t>(p.get_long_or("mc", 300));
  Mixture1D base = gaussian_from(p, "base_mean", 0.0, "base_var", 1.0);
  Mixture1D data_law = gaussian_from(p, "data_mean", 0.0, "data_var", 1.0);

  std::string path = csv_path(out_dir, r.experiment);
  CsvWriter csv(path, {"n", "estimate", "std_error", "limit", "ratio"});
  double final_ratio = 0.0;
  for (double nd : ns) {
    auto n = static_cast<std::size_t>(nd);
    Rng stream = rng.substream(n);
    DataSequence data = gen_iid(data_law, n, stream);
    PosteriorState state = data.summary(n);
    double limit = continuous_data_limit(
        sigma, base, Mixture1D::empirical(data.values));
    auto rep = dw_posterior_gengamma_vs_dp(alpha, sigma, base, state, mc, stream);
    double ratio = rep.total / limit;
    csv.row({nd, rep.total, rep.mc_std_error.value_or(0.0), limit, ratio});
    final_ratio = ratio;
  }
  r.csv_files.push_back(path);
  check(r, "limit_ratio", std::abs(final_ratio - 1.0) <= 0.15,
        "estimate/limit = " + format_double(final_ratio) + " at n_max");
  return r;
}

ExperimentResult run_bound_check(const KvMap& p, const std::string& out_dir) {
  ExperimentResult r;
  r.experiment = "bound_check";
  std::uint64_t seed = required_seed(p, r.experiment);
  long n_seeds = p.get_long_or("seeds", 20);
  double a1 = p.get_double_or("alpha1", 1.0);
  double a2 = p.get_double_or("alpha2", 2.0);
  double epsilon = p.get_double_or("epsilon", 1e-6);
  std::size_t mc = static_cast<std::size_t>(p.get_long_or("mc", 2000));
  Mixture1D base = gaussian_from(p, "base_mean", 0.0, "base_var", 1.0);
  TestFunction f = p.get_or("test_function", "clamped_linear") == "tanh"
                       ? TestFunction::tanh_like()
                       : TestFunction::clamped_linear();

  ScaledLevyIntensity i1{JumpFamily::gamma(a1), base, 1.0, {}};
  ScaledLevyIntensity i2{JumpFamily::gamma(a2), base, 1.0, {}};

  std::string path = csv_path(out_dir, r.experiment);
  CsvWriter csv(path, {"seed_index", "lhs", "std_error", "rhs"});
  bool all_below = true;
  Rng master(seed);
  for (long s = 0; s < n_seeds; ++s) {
    Rng stream = master.substream(static_cast<std::uint64_t>(s));
    auto res = check_integral_bound(i1, i2, f, epsilon, mc, stream);
    csv.row({static_cast<double>(s), res.lhs_estimate, res.lhs_std_error,
             res.rhs});
    all_below =
        all_below && res.lhs_estimate <= res.rhs + 3.0 * res.lhs_std_error;
  }
  r.csv_files.push_back(path);
  check(r, "bound_holds", all_below,
        "lhs <= rhs + 3 std errors in every seed");
  return r;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "prior_gamma_jump",
      "prior_gengamma_jump",
      "posterior_dp_jump",
      "posterior_dp_atoms_same_alpha",
      "posterior_dp_atoms_same_base",
      "latent_phase",
      "merging_dp_data",
      "merging_py_data",
      "continuous_limit",
      "bound_check",
  };
  return names;
}

bool experiment_needs_seed(const std::string& name) {
  return name == "posterior_dp_atoms_same_alpha" ||
         name == "posterior_dp_atoms_same_base" ||
         name == "merging_dp_data" || name == "merging_py_data" ||
         name == "continuous_limit" || name == "bound_check";
}

ExperimentResult run_experiment(const std::string& name, const KvMap& params,
                                const std::string& out_dir) {
  if (name == "prior_gamma_jump") return run_prior_gamma_jump(params, out_dir);
  if (name == "prior_gengamma_jump")
    return run_prior_gengamma_jump(params, out_dir);
  if (name == "posterior_dp_jump")
    return run_posterior_dp_jump(params, out_dir);
  if (name == "posterior_dp_atoms_same_alpha")
    return run_posterior_dp_atoms_same_alpha(params, out_dir);
  if (name == "posterior_dp_atoms_same_base")
    return run_posterior_dp_atoms_same_base(params, out_dir);
  if (name == "latent_phase") return run_latent_phase(params, out_dir);
  if (name == "merging_dp_data") return run_merging(params, out_dir, false);
  if (name == "merging_py_data") return run_merging(params, out_dir, true);
  if (name == "continuous_limit") return run_continuous_limit(params, out_dir);
  if (name == "bound_check") return run_bound_check(params, out_dir);
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

KvMap load_config_file(const std::string& path) { return KvMap::load(path); }

std::vector<std::string> apply_overrides(KvMap& base,
                                         const std::vector<std::string>& kvs) {
  KvMap overrides;
  for (const std::string& kv : kvs) {
    std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("override '" + kv + "' is not key=value");
    overrides.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return base.merge_from(overrides);
}

void write_summary(const ExperimentResult& result, const KvMap& params,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream out(std::filesystem::path(out_dir) /
                    (result.experiment + "_summary.txt"));
  out << "experiment = " << result.experiment << "\n\nparameters:\n";
  for (const auto& [k, v] : params.items())
    out << "  " << k << " = " << v << "\n";
  out << "\nchecks:\n";
  for (const auto& c : result.checks)
    out << "  [" << (c.pass ? "pass" : "FAIL") << "] " << c.name << ": "
        << c.detail << "\n";
  if (!result.notes.empty()) {
    out << "\nnotes:\n";
    for (const auto& n : result.notes) out << "  " << n << "\n";
  }
  out << "\ncsv:\n";
  for (const auto& f : result.csv_files) out << "  " << f << "\n";
}

}  // namespace crmt
