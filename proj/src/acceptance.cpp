#include "crmt/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "crmt/asymptotics.hpp"
#include "crmt/experiments.hpp"
#include "crmt/kv.hpp"
#include "crmt/measures.hpp"
#include "crmt/numerics.hpp"
#include "crmt/posterior.hpp"
#include "crmt/simulate.hpp"
#include "crmt/specfun.hpp"
#include "crmt/transport.hpp"

namespace crmt {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// plain midpoint Riemann sum on a geometric grid; the independent cross-check
// route used by criteria 1
double riemann_geometric(const std::function<double(double)>& f, double a,
                         double b, std::size_t cells) {
  double ratio = std::pow(b / a, 1.0 / static_cast<double>(cells));
  double sum = 0.0;
  double lo = a;
  for (std::size_t i = 0; i < cells; ++i) {
    double hi = lo * ratio;
    sum += f(std::sqrt(lo * hi)) * (hi - lo);
    lo = hi;
  }
  return sum;
}

struct Ctx {
  std::string out_dir;
  std::uint64_t seed;
};

using Criterion = CriterionResult (*)(const Ctx&);

CriterionResult c01_constant(const Ctx& ctx) {
  CriterionResult r{1, "constant C", false, "", 0.0};
  double C = constant_C();
  double riemann = riemann_geometric(
      [](double t) { return std::abs(gamma_upper(0.0, t) - std::exp(-t)); },
      1e-12, 60.0, 250000);
  bool in_band = C >= 0.55 && C <= 0.57;
  bool agree = std::abs(C - riemann) <= 1e-6;
  r.pass = in_band && agree;
  r.detail = "C = " + fmt(C) + ", Riemann oracle " + fmt(riemann) +
             ", |diff| = " + fmt(std::abs(C - riemann));
  std::ofstream out(fs::path(ctx.out_dir) / "c01_constant.csv");
  out << "quantity,value\nC," << format_double(C) << "\nriemann,"
      << format_double(riemann) << "\n";
  return r;
}

CriterionResult c02_origin_slope(const Ctx&) {
  CriterionResult r{2, "J'(0) slope", false, "", 0.0};
  double slope = jump_gengamma_gamma(1e-3) / 1e-3;
  r.pass = slope >= 0.77 && slope <= 0.81;
  r.detail = "J(1e-3)/1e-3 = " + fmt(slope) + ", band [0.77, 0.81]";
  return r;
}

CriterionResult c03_prior_jump(const Ctx& ctx) {
  CriterionResult r{3, "prior gamma jump bound", false, "", 0.0};
  double C = constant_C();
  std::ofstream out(fs::path(ctx.out_dir) / "c03_prior_jump.csv");
  out << "alpha2,jump,bound\n";
  bool below = true, increasing = true;
  double prev = -1.0;
  for (double a2 : {1.5, 2.0, 5.0, 10.0, 20.0}) {
    double j = jump_gamma_gamma(1.0, a2);
    below = below && j <= C * std::log(a2) + 1e-12;
    increasing = increasing && j > prev;
    prev = j;
    out << format_double(a2) << ',' << format_double(j) << ','
        << format_double(C * std::log(a2)) << "\n";
  }
  double eps = 0.02;
  double J = jump_gamma_gamma(1.0, 1.0 + eps);
  double expansion_err = std::abs(J - (C * eps - 0.5 * C * eps * eps)) / (eps * eps);
  bool second_order = expansion_err <= 0.2 * C;
  r.pass = below && increasing && second_order;
  r.detail = "bound " + std::string(below ? "ok" : "violated") +
             ", increasing " + (increasing ? "ok" : "violated") +
             ", |J - (C e - C e^2/2)|/e^2 = " + fmt(expansion_err) +
             " (limit " + fmt(0.2 * C) + ")";
  return r;
}

CriterionResult c04_posterior_jump(const Ctx& ctx) {
  CriterionResult r{4, "DP posterior jump asymptotics", false, "", 0.0};
  double C = constant_C();
  double a1 = 1.0, a2 = 5.0;
  long n_ref = 1000;
  double J_ref = jump_gamma_gamma(a1 + n_ref, a2 + n_ref);
  double asym = std::abs(n_ref * J_ref / (C * (a2 - a1)) - 1.0);

  std::ofstream out(fs::path(ctx.out_dir) / "c04_posterior_jump.csv");
  out << "n,jump,bound\n";
  bool decreasing = true, below = true;
  double prev = 1e300;
  for (long n = 1; n <= 100; ++n) {
    double j = jump_gamma_gamma(a1 + n, a2 + n);
    double bound = C * std::log((a2 + n) / (a1 + n));
    decreasing = decreasing && j < prev;
    below = below && j <= bound + 1e-12;
    prev = j;
    out << n << ',' << format_double(j) << ',' << format_double(bound) << "\n";
  }
  r.pass = asym <= 0.05 && decreasing && below;
  r.detail = "|n J/(C(a2-a1)) - 1| = " + fmt(asym) + " at n=1000; decreasing " +
             (decreasing ? "ok" : "violated") + "; bound " +
             (below ? "ok" : "violated");
  return r;
}

CriterionResult c05_atoms_same_alpha(const Ctx& ctx) {
  CriterionResult r{5, "DP atom component, same alpha", false, "", 0.0};
  Rng rng(Rng::mix(ctx.seed, 5));
  auto base1 = Mixture1D::gaussian(1.0, 1.0);
  auto base2 = Mixture1D::gaussian(2.0, 1.0);
  DataSequence data = gen_iid(Mixture1D::poisson(1.0), 100, rng);
  double w = w1_mixture(base1, base2);
  double alpha = 10.0;
  double worst = 0.0;
  std::ofstream out(fs::path(ctx.out_dir) / "c05_atoms_same_alpha.csv");
  out << "n,atom,exact\n";
  for (long n : {0L, 10L, 100L}) {
    auto rep = dw_posterior_dp(alpha, base1, alpha, base2,
                               data.summary(static_cast<std::size_t>(n)));
    double exact = alpha / (alpha + n) * w;
    worst = std::max(worst, std::abs(rep.atom_part - exact));
    out << n << ',' << format_double(rep.atom_part) << ','
        << format_double(exact) << "\n";
  }
  r.pass = worst <= 1e-8;
  r.detail = "max |A - (a/(a+n)) W1| = " + fmt(worst) + " over n in {0,10,100}";
  return r;
}

CriterionResult c06_atoms_same_base(const Ctx& ctx) {
  CriterionResult r{6, "DP atom component, same base", false, "", 0.0};
  Rng rng(Rng::mix(ctx.seed, 6));
  auto base = Mixture1D::gaussian(1.0, 1.0);
  DataSequence data = gen_iid(Mixture1D::poisson(1.0), 200, rng);
  double a1 = 10.0, a2 = 500.0;
  long argmax = 1;
  double best = -1.0;
  std::ofstream out(fs::path(ctx.out_dir) / "c06_atoms_same_base.csv");
  out << "n,atom\n";
  for (long n = 1; n <= 200; ++n) {
    auto rep = dw_posterior_dp(a1, base, a2, base,
                               data.summary(static_cast<std::size_t>(n)));
    out << n << ',' << format_double(rep.atom_part) << "\n";
    if (rep.atom_part > best) {
      best = rep.atom_part;
      argmax = n;
    }
  }
  r.pass = argmax >= 40 && argmax <= 100;
  r.detail = "atom peak at n = " + std::to_string(argmax) +
             ", accepted window [40, 100]";
  return r;
}

CriterionResult c07_merging_rate(const Ctx& ctx) {
  CriterionResult r{7, "DP merging rate", false, "", 0.0};
  Rng rng(Rng::mix(ctx.seed, 7));
  auto base1 = Mixture1D::gaussian(1.0, 1.0);
  auto base2 = Mixture1D::gaussian(2.0, 1.0);
  DataSequence data = gen_iid(Mixture1D::poisson(1.0), 10000, rng);
  double lo = 1e300, hi = -1e300;
  std::ofstream out(fs::path(ctx.out_dir) / "c07_merging.csv");
  out << "n,total,scaled\n";
  for (long n : {100L, 1000L, 10000L}) {
    auto rep = dw_posterior_dp(1.0, base1, 5.0, base2,
                               data.summary(static_cast<std::size_t>(n)));
    double scaled = n * rep.total;
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
    out << n << ',' << format_double(rep.total) << ','
        << format_double(scaled) << "\n";
  }
  r.pass = hi / lo <= 5.0;
  r.detail = "n d_W in [" + fmt(lo) + ", " + fmt(hi) + "], ratio " +
             fmt(hi / lo) + " (limit 5)";
  return r;
}

CriterionResult c08_latent_phase(const Ctx& ctx) {
  CriterionResult r{8, "latent phase transition", false, "", 0.0};
  double sigma = 0.3, alpha = 1.0, lambda = 1.0;
  long n = 10000;
  double nd = static_cast<double>(n);
  double expo = sigma / (1.0 + sigma);
  std::ofstream out(fs::path(ctx.out_dir) / "c08_latent_phase.csv");
  out << "regime,k,expected_scale,rate,ratio\n";
  bool ok = true;
  std::string detail;
  struct Case {
    const char* name;
    long k;
    RegimeSpec spec;
  };
  for (const Case& c :
       {Case{"sub", static_cast<long>(std::ceil(std::log(nd))),
             RegimeSpec::sub_critical()},
        Case{"critical",
             static_cast<long>(std::ceil(lambda * std::pow(nd, expo))),
             RegimeSpec::critical(lambda)},
        Case{"super", static_cast<long>(std::ceil(std::pow(nd, 0.9))),
             RegimeSpec::super_critical()}}) {
    LatentLaw law{alpha, sigma, n, c.k};
    double scale = expected_latent_scale(law);
    double rate = latent_rate(alpha, sigma, c.spec, n, c.k);
    double ratio = scale / rate;
    ok = ok && ratio >= 0.8 && ratio <= 1.25;
    out << c.name << ',' << c.k << ',' << format_double(scale) << ','
        << format_double(rate) << ',' << format_double(ratio) << "\n";
    if (!detail.empty()) detail += ", ";
    detail += std::string(c.name) + " " + fmt(ratio);
  }
  r.pass = ok;
  r.detail = "E[(1+U)^s]/r_n: " + detail + " (band [0.8, 1.25])";
  return r;
}

CriterionResult c09_sampler(const Ctx& ctx) {
  CriterionResult r{9, "latent sampler correctness", false, "", 0.0};
  LatentLaw law{100.0, 0.3, 1000,
                static_cast<long>(std::ceil(std::log(1000.0)))};
  Rng rng(Rng::mix(ctx.seed, 9));
  const std::size_t N = 100000;
  double acceptance = 0.0;
  std::vector<double> us = latent_sample(law, rng, N, &acceptance);

  // reference CDF of x = (1+u)^sigma on a fine grid by cumulative Simpson
  double xm = latent_mode_x(law);
  double fm = law.f_x(xm);
  double sd = 1.0 / std::sqrt(law.f_x_second(xm));
  double lo = std::max(1.0 + 1e-9, xm - 14.0 * sd);
  double hi = xm + 14.0 * sd;
  const std::size_t cells = 40000;
  std::vector<double> grid_x(cells + 1), grid_F(cells + 1);
  double h = (hi - lo) / cells;
  auto density = [&](double x) { return std::exp(fm - law.f_x(x)); };
  double acc = 0.0;
  grid_x[0] = lo;
  grid_F[0] = 0.0;
  double f_prev = density(lo);
  for (std::size_t i = 1; i <= cells; ++i) {
    double x = lo + i * h;
    double f_cur = density(x);
    acc += 0.5 * h * (f_prev + f_cur);
    grid_x[i] = x;
    grid_F[i] = acc;
    f_prev = f_cur;
  }
  for (auto& v : grid_F) v /= acc;

  auto cdf = [&](double x) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    auto it = std::upper_bound(grid_x.begin(), grid_x.end(), x);
    std::size_t i = static_cast<std::size_t>(it - grid_x.begin());
    double t = (x - grid_x[i - 1]) / (grid_x[i] - grid_x[i - 1]);
    return grid_F[i - 1] + t * (grid_F[i] - grid_F[i - 1]);
  };

  std::vector<double> xs(us.size());
  for (std::size_t i = 0; i < us.size(); ++i)
    xs[i] = std::pow(1.0 + us[i], law.sigma);
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double F = cdf(xs[i]);
    double up = static_cast<double>(i + 1) / xs.size();
    double dn = static_cast<double>(i) / xs.size();
    ks = std::max(ks, std::max(std::abs(F - up), std::abs(F - dn)));
  }
  r.pass = ks < 0.02 && acceptance > 0.2;
  r.detail = "KS = " + fmt(ks) + " (limit 0.02), acceptance = " +
             fmt(acceptance) + " (floor 0.2)";
  std::ofstream out(fs::path(ctx.out_dir) / "c09_sampler.csv");
  out << "quantity,value\nks," << format_double(ks) << "\nacceptance,"
      << format_double(acceptance) << "\n";
  return r;
}

CriterionResult c10_continuous_limit(const Ctx& ctx) {
  CriterionResult r{10, "continuous-data limit", false, "", 0.0};
  Rng rng(Rng::mix(ctx.seed, 10));
  double alpha = 100.0, sigma = 0.5;
  auto base = Mixture1D::gaussian(0.0, 1.0);
  const std::size_t n = 2000;
  DataSequence data = gen_iid(Mixture1D::gaussian(0.0, 1.0), n, rng);
  PosteriorState state = data.summary(n);
  double limit =
      continuous_data_limit(sigma, base, Mixture1D::empirical(data.values));
  auto rep = dw_posterior_gengamma_vs_dp(alpha, sigma, base, state, 500, rng);
  double ratio = rep.total / limit;
  r.pass = std::abs(ratio - 1.0) <= 0.15;
  r.detail = "estimate " + fmt(rep.total) + " (se " +
             fmt(rep.mc_std_error.value_or(0.0)) + "), limit " + fmt(limit) +
             ", ratio " + fmt(ratio) + " (band 1 +- 0.15)";
  std::ofstream out(fs::path(ctx.out_dir) / "c10_continuous_limit.csv");
  out << "quantity,value\nestimate," << format_double(rep.total)
      << "\nstd_error," << format_double(rep.mc_std_error.value_or(0.0))
      << "\nlimit," << format_double(limit) << "\n";
  return r;
}

CriterionResult c11_metric_suite(const Ctx& ctx) {
  CriterionResult r{11, "metric property suite", false, "", 0.0};
  Rng rng(Rng::mix(ctx.seed, 11));
  auto random_family = [&rng]() {
    double rate = std::exp(rng.uniform(std::log(0.3), std::log(30.0)));
    if (rng.uniform() < 0.5) return JumpFamily::gamma(rate);
    return JumpFamily::gen_gamma(rate, rng.uniform(0.1, 0.9));
  };
  auto random_mixture = [&rng]() {
    Mixture1D m;
    int parts = 1 + static_cast<int>(rng.uniform() * 3);
    double left = 1.0;
    for (int i = 0; i < parts; ++i) {
      double w = (i + 1 == parts) ? left : left * rng.uniform(0.2, 0.8);
      left -= (i + 1 == parts) ? 0.0 : w;
      double pick = rng.uniform();
      if (pick < 0.35)
        m.add(w, Mixture1D::Atom{rng.uniform(-3.0, 3.0)});
      else if (pick < 0.7)
        m.add(w, Mixture1D::Gaussian{rng.uniform(-2.0, 2.0),
                                     rng.uniform(0.2, 2.0)});
      else if (pick < 0.85)
        m.add(w, Mixture1D::PoissonLaw{rng.uniform(0.5, 3.0)});
      else {
        std::vector<double> pts;
        int np = 2 + static_cast<int>(rng.uniform() * 4);
        for (int j = 0; j < np; ++j) pts.push_back(rng.uniform(-2.0, 2.0));
        m.add(w, Mixture1D::Empirical{pts});
      }
    }
    return m;
  };

  int failures = 0;
  for (int rep = 0; rep < 100; ++rep) {
    JumpFamily a = random_family(), b = random_family(), c = random_family();
    double ab = w1_extended(a, b);
    if (ab != w1_extended(b, a)) ++failures;
    if (ab > 2.0) ++failures;
    if (ab > w1_extended(a, c) + w1_extended(c, b) + 1e-9) ++failures;
    if (w1_extended(a, a) != 0.0) ++failures;
  }
  for (int rep = 0; rep < 100; ++rep) {
    Mixture1D a = random_mixture(), b = random_mixture(), c = random_mixture();
    double ab = w1_mixture(a, b);
    if (ab != w1_mixture(b, a)) ++failures;
    if (ab > w1_mixture(a, c) + w1_mixture(c, b) + 1e-9) ++failures;
    if (w1_mixture(a, a) > 1e-12) ++failures;
  }
  r.pass = failures == 0;
  r.detail = "200 randomized triples, " + std::to_string(failures) +
             " violations (symmetry exact, triangle slack 1e-9, W* <= 2)";
  return r;
}

CriterionResult c12_bound_check(const Ctx& ctx) {
  CriterionResult r{12, "functional bound check", false, "", 0.0};
  auto base = Mixture1D::gaussian(0.0, 1.0);
  ScaledLevyIntensity i1{JumpFamily::gamma(1.0), base, 1.0, {}};
  ScaledLevyIntensity i2{JumpFamily::gamma(2.0), base, 1.0, {}};
  TestFunction f = TestFunction::clamped_linear();
  Rng master(Rng::mix(ctx.seed, 12));
  std::ofstream out(fs::path(ctx.out_dir) / "c12_bound_check.csv");
  out << "seed_index,lhs,std_error,rhs\n";
  int violations = 0;
  double min_margin = 1e300;
  for (int s = 0; s < 20; ++s) {
    Rng stream = master.substream(static_cast<std::uint64_t>(s));
    auto res = check_integral_bound(i1, i2, f, 1e-6, 2000, stream);
    out << s << ',' << format_double(res.lhs_estimate) << ','
        << format_double(res.lhs_std_error) << ',' << format_double(res.rhs)
        << "\n";
    double margin = res.rhs + 3.0 * res.lhs_std_error - res.lhs_estimate;
    min_margin = std::min(min_margin, margin);
    if (margin < 0.0) ++violations;
  }
  r.pass = violations == 0;
  r.detail = "20 seeds, " + std::to_string(violations) +
             " violations, smallest margin " + fmt(min_margin);
  return r;
}

CriterionResult c13_determinism(const Ctx& ctx) {
  CriterionResult r{13, "determinism of verify artifacts", false, "", 0.0};
  KvMap det;
  KvMap stoch;
  stoch.set("seed", ctx.seed);
  stoch.set("sigma_grid", std::string("0.5"));
  stoch.set("n_pow_max", 8L);
  stoch.set("mc", 50L);

  std::vector<std::string> produced[2];
  for (int rep = 0; rep < 2; ++rep) {
    std::string dir =
        (fs::path(ctx.out_dir) / ("rep" + std::to_string(rep + 1))).string();
    auto r1 = run_experiment("prior_gamma_jump", det, dir);
    auto r2 = run_experiment("merging_dp_data", stoch, dir);
    for (const auto& f : r1.csv_files) produced[rep].push_back(f);
    for (const auto& f : r2.csv_files) produced[rep].push_back(f);
  }
  bool identical = produced[0].size() == produced[1].size();
  for (std::size_t i = 0; identical && i < produced[0].size(); ++i) {
    std::ifstream a(produced[0][i], std::ios::binary);
    std::ifstream b(produced[1][i], std::ios::binary);
    std::ostringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    identical = sa.str() == sb.str();
  }
  r.pass = identical;
  r.detail = std::string("two runs with the same master seed are ") +
             (identical ? "byte-identical" : "DIFFERENT");
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::string& out_dir,
                                            std::uint64_t master_seed) {
  fs::create_directories(out_dir);
  Ctx ctx{out_dir, master_seed};
  const Criterion criteria[] = {
      c01_constant,      c02_origin_slope,    c03_prior_jump,
      c04_posterior_jump, c05_atoms_same_alpha, c06_atoms_same_base,
      c07_merging_rate,  c08_latent_phase,    c09_sampler,
      c10_continuous_limit, c11_metric_suite, c12_bound_check,
      c13_determinism,
  };
  std::vector<CriterionResult> results;
  for (Criterion c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult res = c(ctx);
    auto t1 = std::chrono::steady_clock::now();
    res.seconds = std::chrono::duration<double>(t1 - t0).count();
    std::printf("[%s] %2d %-32s %s (%.2f s)\n", res.pass ? "PASS" : "FAIL",
                res.id, res.name.c_str(), res.detail.c_str(), res.seconds);
    std::fflush(stdout);
    results.push_back(std::move(res));
  }
  int passed = 0;
  for (const auto& res : results) passed += res.pass ? 1 : 0;
  std::printf("%d/%zu criteria passed\n", passed, results.size());
  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace crmt
