#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "crmt/measures.hpp"
#include "crmt/posterior.hpp"
#include "crmt/rng.hpp"

namespace crmt {

// A generated observation sequence. Any prefix can be summarized into the
// conditioning state; summaries of a shorter run with the same seed agree
// with prefixes of a longer one.
struct DataSequence {
  std::vector<double> values;

  PosteriorState summary(std::size_t n) const;
  void save_csv(const std::string& path) const;  // one value per line
  static DataSequence load_csv(const std::string& path);
};

DataSequence gen_iid(const Mixture1D& law, std::size_t n, Rng& rng);

// Blackwell-MacQueen urn: observation n+1 is new from the base with
// probability abar/(abar+n), otherwise a uniformly chosen previous value.
DataSequence gen_crp(double alpha_bar, const Mixture1D& base, std::size_t n,
                     Rng& rng);

// Two-parameter urn: new value with probability (abar + k sbar)/(abar + n),
// existing cluster j with probability (n_j - sbar)/(abar + n).
DataSequence gen_pitman_yor(double alpha_bar, double sigma_bar,
                            const Mixture1D& base, std::size_t n, Rng& rng);

// Jumps above a truncation level, drawn as a compound Poisson approximation
// of the CRM: N ~ Poisson(mass above epsilon), then i.i.d. (size, location)
// pairs with sizes from the truncated jump law by inverse-tail inversion.
struct TruncatedCRM {
  struct Jump {
    double size = 0.0;
    double location = 0.0;
  };
  std::vector<Jump> jumps;
  double epsilon = 0.0;
  double rate = 0.0;  // Poisson mean used for the jump count

  double total_mass() const;
  double integrate(const struct TestFunction& f) const;
};

TruncatedCRM sample_crm_truncated(const ScaledLevyIntensity& intensity,
                                  double epsilon, Rng& rng);

// Bounded Lipschitz test functions with known constants, for checking the
// functional bound W1(int f dmu1, int f dmu2) <= max(sup|f|, Lip f) d_W.
struct TestFunction {
  enum class Kind { ClampedLinear, TanhLike };
  Kind kind = Kind::ClampedLinear;
  double sup_bound = 1.0;
  double lip = 1.0;

  double operator()(double x) const;
  static TestFunction clamped_linear();
  static TestFunction tanh_like();
};

struct BoundCheckResult {
  double lhs_estimate = 0.0;  // empirical W1 between integral samples
  double lhs_std_error = 0.0;
  double rhs = 0.0;  // max(sup|f|, Lip f) * d_W
};

BoundCheckResult check_integral_bound(const ScaledLevyIntensity& i1,
                                      const ScaledLevyIntensity& i2,
                                      const TestFunction& f, double epsilon,
                                      std::size_t mc_budget, Rng& rng);

}  // namespace crmt
