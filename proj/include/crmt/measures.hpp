#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "crmt/rng.hpp"

namespace crmt {

// Jump-size law of a scaled Levy intensity, normalized to unit first moment
// about 0. Two closed families cover every intensity used here:
//   Gamma(rate a):          a e^{-a s} / s
//   GenGamma(rate a, sigma): a^{1-sigma}/Gamma(1-sigma) e^{-a s} / s^{1+sigma}
// Both have infinite total mass and int s rho(ds) = 1.
struct JumpFamily {
  enum class Kind { Gamma, GenGamma };

  Kind kind = Kind::Gamma;
  double rate = 1.0;
  double sigma = 0.0;  // only meaningful for GenGamma, in (0,1)

  static JumpFamily gamma(double rate);
  static JumpFamily gen_gamma(double rate, double sigma);

  double density(double s) const;

  // U(u) = rho(u, inf); diverges as u -> 0+
  double tail(double u) const;

  // M(u) = int_u^inf U(s) ds, closed form; M(0) = 1 by normalization
  double tail_primitive(double u) const;

  friend bool operator==(const JumpFamily& a, const JumpFamily& b) {
    return a.kind == b.kind && a.rate == b.rate &&
           (a.kind == Kind::Gamma || a.sigma == b.sigma);
  }
};

// Probability measure on the real line: weighted mixture of atoms, Gaussian
// and Poisson components, and empirical measures. All parts have a finite
// first moment; the CDF is right-continuous.
struct Mixture1D {
  struct Atom {
    double x = 0.0;
  };
  struct Gaussian {
    double mean = 0.0;
    double var = 1.0;
  };
  struct PoissonLaw {
    double mean = 1.0;
  };
  struct Empirical {
    std::vector<double> points;
  };
  using Part = std::variant<Atom, Gaussian, PoissonLaw, Empirical>;

  struct Component {
    double weight = 1.0;
    Part part;
  };

  std::vector<Component> components;

  static Mixture1D atom(double x);
  static Mixture1D gaussian(double mean, double var);
  static Mixture1D poisson(double mean);
  static Mixture1D empirical(std::vector<double> points);

  Mixture1D& add(double weight, Part part);

  void validate() const;  // weights >= 0, sum to 1 within 1e-12

  double cdf(double x) const;
  double first_moment() const;

  // E[(X - r)^+] and E[(l - X)^+]; both vanish as r -> +inf, l -> -inf and
  // certify truncation of the CDF integrals
  double upper_partial(double r) const;
  double lower_partial(double l) const;

  // true if the measure has point masses (atoms or empirical points)
  bool has_point_mass() const;

  double sample(Rng& rng) const;
};

// Scaled Levy intensity in canonical form: a homogeneous part
// base_weight * (base_jump x base) plus location-fixed atoms carrying their
// own jump families. Weights sum to 1, so the mean measure is a probability.
struct ScaledLevyIntensity {
  struct FixedAtom {
    double location = 0.0;
    JumpFamily jump;
    double weight = 0.0;
  };

  JumpFamily base_jump;
  Mixture1D base;
  double base_weight = 1.0;
  std::vector<FixedAtom> fixed_atoms;

  bool homogeneous() const { return fixed_atoms.empty(); }
  void validate() const;
};

// Unnormalized prior specifications and their canonical scaled forms
// (division by the expected total mass).
struct GammaPrior {
  double total_mass = 1.0;  // alpha: intensity alpha e^{-b s}/s
  double scale = 1.0;       // b
};
struct GenGammaPrior {
  double total_mass = 1.0;  // alpha: intensity alpha/Gamma(1-sigma) e^{-s}/s^{1+sigma}
  double sigma = 0.5;
};

ScaledLevyIntensity scale_to_unit_mean(const GammaPrior& prior, Mixture1D base);
ScaledLevyIntensity scale_to_unit_mean(const GenGammaPrior& prior, Mixture1D base);

}  // namespace crmt
