#pragma once

#include "crmt/measures.hpp"
#include "crmt/posterior.hpp"

namespace crmt {

// Asymptotic growth regime of the number of distinct values k relative to
// n^{sigma/(1+sigma)}. Regimes are explicit inputs: they are asymptotic
// classifications and cannot be inferred from a single finite n.
struct RegimeSpec {
  enum class Kind { SubCritical, Critical, SuperCritical };
  Kind kind = Kind::SubCritical;
  double lambda = 0.0;  // k ~ lambda n^{sigma/(1+sigma)}, Critical only

  static RegimeSpec sub_critical() { return {Kind::SubCritical, 0.0}; }
  static RegimeSpec critical(double lambda) { return {Kind::Critical, lambda}; }
  static RegimeSpec super_critical() { return {Kind::SuperCritical, 0.0}; }
};

// Concentration point r_n of (1+U)^sigma:
//   SubCritical:   alpha^{-s/(1+s)} n^{s/(1+s)}
//   Critical:      gamma n^{s/(1+s)} with gamma solving
//                  s lambda / x + x^{-(1+s)/s} = alpha
//   SuperCritical: (s/alpha) k   (k required)
double latent_rate(double alpha, double sigma, const RegimeSpec& regime,
                   long n, long k = -1);

// Finite-n mode of the transformed latent density on (1, inf).
double latent_mode(double alpha, double sigma, long n, long k);

// E[(1+U)^sigma] by quadrature against the transformed latent density.
double expected_latent_scale(const LatentLaw& law);

// omega(n) = (a2 - a1) n / ((a1 + n)(a2 + n)), the prefactor of the
// posterior atom component when the two priors share a base measure.
double dp_atom_prefactor(double alpha1, double alpha2, long n);

// Integer n maximizing omega, adjacent to sqrt(a1 a2).
long dp_atom_prefactor_maximizer(double alpha1, double alpha2);

// Merging rate max(n^{-1/(1+sigma)}, k/n) of a generalized gamma posterior
// against a gamma posterior.
double gengamma_merge_rate(double sigma, long n, long k);

// Limit of the posterior distance for i.i.d. continuous data with law
// data_law: sigma (J(sigma) + W1(base, data_law)). Does not depend on the
// total mass parameter.
double continuous_data_limit(double sigma, const Mixture1D& base,
                             const Mixture1D& data_law);

}  // namespace crmt
