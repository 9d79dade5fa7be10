#pragma once

#include <optional>

#include "crmt/measures.hpp"

namespace crmt {

enum class DistanceMethod { closed_form_quadrature, cdf_integration, monte_carlo };

// Distance value with its jump/atom decomposition. For deterministic methods
// total = jump_part + atom_part to within quadrature tolerance; Monte Carlo
// results carry the standard error of the total.
struct DistanceReport {
  double total = 0.0;
  double jump_part = 0.0;
  double atom_part = 0.0;
  DistanceMethod method = DistanceMethod::closed_form_quadrature;
  std::optional<double> mc_std_error;
};

// Extended Wasserstein distance between two normalized jump measures:
// W*(rho1, rho2) = int_0^inf |U1(u) - U2(u)| du, always <= 2.
double w1_extended(const JumpFamily& j1, const JumpFamily& j2);

// Jump component between two scaled gamma intensities,
// J(a1,a2) = int |a1 Gamma(0,a1 s) - a2 Gamma(0,a2 s)| ds = J(1, a2/a1).
double jump_gamma_gamma(double a1, double a2);

// The point of maximum of t Gamma(0,t), i.e. the root of Gamma(0,t) = e^{-t}.
// Cached after the first call.
double intersection_tbar();

// C = int_0^inf |Gamma(0,t) - e^{-t}| dt, about 0.563. Cached.
double constant_C();

// Jump component between a scaled generalized gamma and a scaled gamma
// intensity with equal rates: J(sigma) = int |Gamma(-sigma,t)/Gamma(1-sigma)
// - Gamma(0,t)| dt. Independent of the rate; increasing in sigma.
double jump_gengamma_gamma(double sigma);

// Classical L1 Wasserstein distance between mixtures on the real line via
// int |F1 - F2| dx with breakpoints at every point mass.
double w1_mixture(const Mixture1D& m1, const Mixture1D& m2);

// Nested distance between two homogeneous scaled Levy intensities:
// jump part W*(rho1, rho2) plus atom part W1(P1, P2).
DistanceReport dw_homogeneous(const ScaledLevyIntensity& i1,
                              const ScaledLevyIntensity& i2);

}  // namespace crmt
