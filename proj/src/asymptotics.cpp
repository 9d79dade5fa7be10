#include "crmt/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include "crmt/numerics.hpp"
#include "crmt/transport.hpp"

namespace crmt {

double latent_rate(double alpha, double sigma, const RegimeSpec& regime,
                   long n, long k) {
  if (!(alpha > 0.0) || !(sigma > 0.0 && sigma < 1.0) || n < 1)
    throw std::invalid_argument("latent_rate: invalid parameters");
  double p = sigma / (1.0 + sigma);
  switch (regime.kind) {
    case RegimeSpec::Kind::SubCritical:
      return std::pow(alpha, -p) * std::pow(static_cast<double>(n), p);
    case RegimeSpec::Kind::Critical: {
      if (!(regime.lambda > 0.0))
        throw std::invalid_argument("latent_rate: Critical regime needs lambda");
      // s lambda / x + x^{-(1+s)/s} = alpha; left side strictly decreasing
      auto g = [&](double x) {
        return sigma * regime.lambda / x +
               std::pow(x, -(1.0 + sigma) / sigma) - alpha;
      };
      double lo = 1e-9;
      double hi = 1.0;
      while (g(hi) > 0.0) hi *= 2.0;
      double gamma_root = bisect(g, lo, hi, 1e-14);
      return gamma_root * std::pow(static_cast<double>(n), p);
    }
    case RegimeSpec::Kind::SuperCritical:
      if (k < 1)
        throw std::invalid_argument(
            "latent_rate: SuperCritical regime needs the k sequence value");
      return sigma / alpha * static_cast<double>(k);
  }
  throw std::logic_error("latent_rate: unreachable");
}

double latent_mode(double alpha, double sigma, long n, long k) {
  LatentLaw law{alpha, sigma, n, k};
  return latent_mode_x(law);
}

double expected_latent_scale(const LatentLaw& law) {
  law.validate();
  if (law.n == 1) {
    // density e^{-(alpha/sigma) x} on (1, inf)
    return 1.0 + law.sigma / law.alpha;
  }
  double xm = latent_mode_x(law);
  double fm = law.f_x(xm);
  auto weight = [&](double x) { return std::exp(fm - law.f_x(x)); };

  // cut where the density has fallen by e^{-60}
  double lo = 1.0 + 1e-12;
  if (law.f_x(lo) - fm > 60.0)
    lo = bisect([&](double x) { return law.f_x(x) - fm - 60.0; }, lo, xm, 1e-12);
  double hi = xm + 1.0;
  while (law.f_x(hi) - fm < 60.0) hi += std::max(1.0, 0.5 * (hi - 1.0));
  hi = bisect([&](double x) { return law.f_x(x) - fm - 60.0; }, xm, hi, 1e-10);

  QuadOptions opt;
  opt.rel_tol = 1e-10;
  double mass = integrate(weight, lo, xm, opt) + integrate(weight, xm, hi, opt);
  double first = integrate([&](double x) { return x * weight(x); }, lo, xm, opt) +
                 integrate([&](double x) { return x * weight(x); }, xm, hi, opt);
  return first / mass;
}

double dp_atom_prefactor(double alpha1, double alpha2, long n) {
  if (!(alpha1 > 0.0) || !(alpha2 >= alpha1))
    throw std::invalid_argument("dp_atom_prefactor: need 0 < alpha1 <= alpha2");
  double nn = static_cast<double>(n);
  return (alpha2 - alpha1) * nn / ((alpha1 + nn) * (alpha2 + nn));
}

long dp_atom_prefactor_maximizer(double alpha1, double alpha2) {
  if (!(alpha1 > 0.0) || !(alpha2 >= alpha1))
    throw std::invalid_argument("dp_atom_prefactor_maximizer: invalid alphas");
  double s = std::sqrt(alpha1 * alpha2);
  long lo = std::max(1L, static_cast<long>(std::floor(s)));
  long hi = lo + 1;
  return dp_atom_prefactor(alpha1, alpha2, lo) >=
                 dp_atom_prefactor(alpha1, alpha2, hi)
             ? lo
             : hi;
}

double gengamma_merge_rate(double sigma, long n, long k) {
  if (!(sigma > 0.0 && sigma < 1.0) || n < 1 || k < 1 || k > n)
    throw std::invalid_argument("gengamma_merge_rate: invalid parameters");
  double nn = static_cast<double>(n);
  return std::max(std::pow(nn, -1.0 / (1.0 + sigma)),
                  static_cast<double>(k) / nn);
}

double continuous_data_limit(double sigma, const Mixture1D& base,
                             const Mixture1D& data_law) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::invalid_argument("continuous_data_limit: sigma outside (0,1)");
  return sigma * (jump_gengamma_gamma(sigma) + w1_mixture(base, data_law));
}

}  // namespace crmt
