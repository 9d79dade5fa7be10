#pragma once

#include <cstddef>
#include <vector>

#include "crmt/measures.hpp"
#include "crmt/rng.hpp"
#include "crmt/transport.hpp"

namespace crmt {

// Conditioning data: n observations collapsed to distinct values with
// multiplicities, in order of first appearance. Ties are exact (values
// compare equal as doubles).
struct PosteriorState {
  long n = 0;
  std::vector<std::pair<double, long>> distinct;  // (value, multiplicity)

  long k() const { return static_cast<long>(distinct.size()); }
  static PosteriorState from_values(const std::vector<double>& values);
  void validate() const;
};

// Law of the latent variable U conditioning a generalized gamma posterior:
// unnormalized density u^{n-1} (1+u)^{k sigma - n} exp(-(alpha/sigma)(1+u)^sigma).
// The transform x = (1+u)^sigma has log-concave density exp(-f(x)) on (1,inf).
struct LatentLaw {
  double alpha = 1.0;
  double sigma = 0.5;
  long n = 1;
  long k = 1;

  void validate() const;

  double logdensity_u(double u) const;

  // f(x) = -(k-1) log x + (alpha/sigma) x - (n-1) log(1 - x^{-1/sigma})
  double f_x(double x) const;
  double f_x_prime(double x) const;
  double f_x_second(double x) const;
};

// Mode of the transformed density, i.e. the root of f_x_prime on (1, inf);
// returns 1 for n = 1 where the density is a restricted exponential.
double latent_mode_x(const LatentLaw& law);

// i.i.d. draws of U by rejection sampling of x = (1+U)^sigma from a
// piecewise-exponential envelope built from tangents of -f at the mode and
// at one point on each side. Envelope validity follows from convexity of f;
// a violation beyond roundoff slack raises instead of degrading silently.
std::vector<double> latent_sample(const LatentLaw& law, Rng& rng,
                                  std::size_t count,
                                  double* acceptance_rate = nullptr);

// Posterior base measure of a gamma prior: alpha/(alpha+n) P0 plus atoms of
// weight n_i/(alpha+n) at the distinct observations.
Mixture1D posterior_base_dp(double alpha, const Mixture1D& base,
                            const PosteriorState& data);

// Posterior of a gamma CRM: a homogeneous scaled intensity with jump family
// Gamma(alpha+n) and the mixed posterior base above.
ScaledLevyIntensity posterior_gamma(double alpha, const Mixture1D& base,
                                    const PosteriorState& data);

// Posterior of a generalized gamma CRM given a latent draw u. With
// c = alpha (1+u)^sigma + n - k sigma, the diffuse part is
// GenGamma(c, sigma) with weight alpha(1+u)^sigma / c and each distinct
// observation carries a Gamma(c) jump family with weight (n_i - sigma)/c.
ScaledLevyIntensity posterior_gengamma(double alpha, double sigma,
                                       const Mixture1D& base,
                                       const PosteriorState& data, double u);

// Distance between the posteriors of two gamma priors sharing the data:
// jump part J(alpha1 + n, alpha2 + n), atom part W1 of the posterior bases.
DistanceReport dw_posterior_dp(double alpha1, const Mixture1D& base1,
                               double alpha2, const Mixture1D& base2,
                               const PosteriorState& data);

// Monte Carlo distance between the posterior of a generalized gamma prior
// and the posterior of a gamma prior with the same total mass and base.
// Averages J1 + J2 + A over latent draws; reports the standard error.
// With no data the value is the deterministic prior distance J(sigma).
DistanceReport dw_posterior_gengamma_vs_dp(double alpha, double sigma,
                                           const Mixture1D& base,
                                           const PosteriorState& data,
                                           std::size_t mc_draws, Rng& rng);

}  // namespace crmt
