#include "crmt/specfun.hpp"

#include <cmath>
#include <stdexcept>

#include "crmt/numerics.hpp"

namespace crmt {
namespace {

// Legendre continued fraction, evaluated with the modified Lentz scheme.
// Reliable for t >= 1 over the whole order range handled here.
double upper_cf(double z, double t) {
  const double tiny = 1e-300;
  double b = t + 1.0 - z;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (i - z);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-t + z * std::log(t)) * h;
}

// Power series for small t:
//   Gamma(z,t) = (Gamma(1+z) - t^z)/z - t^z sum_{k>=1} (-t)^k / (k! (z+k)).
// The leading term is evaluated through expm1 so the z -> 0 limit (E1) is
// reached without cancellation. Valid for z > -1, 0 < t <= 1.
double upper_series(double z, double t) {
  double logt = std::log(t);
  double lead;
  if (z == 0.0) {
    lead = -kEulerGamma - logt;
  } else {
    lead = (std::expm1(std::lgamma(1.0 + z)) - std::expm1(z * logt)) / z;
  }
  double tz = std::exp(z * logt);
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 300; ++k) {
    term *= -t / k;
    double add = term / (z + k);
    sum += add;
    if (std::abs(add) <= 1e-18 * (std::abs(sum) + 1e-30)) break;
  }
  return lead - tz * sum;
}

}  // namespace

double gamma_fn(double z) {
  if (!(z > 0.0)) throw std::domain_error("gamma_fn: requires z > 0");
  return std::tgamma(z);
}

double gamma_upper(double z, double t) {
  if (!(t > 0.0)) throw std::domain_error("gamma_upper: requires t > 0");
  if (z < -1.0 || z > 1.0)
    throw std::domain_error("gamma_upper: order outside [-1, 1]");
  if (z == 1.0) return std::exp(-t);
  if (t > 1.0) return upper_cf(z, t);
  if (z <= -0.9) {
    // series term k=1 degenerates as z -> -1; one recurrence step from z+1
    // keeps the denominator away from zero
    double above = upper_series(z + 1.0, t);
    return (above - std::exp(z * std::log(t) - t)) / z;
  }
  return upper_series(z, t);
}

double gamma_upper_dz(double z, double t) {
  if (!(t > 0.0)) throw std::domain_error("gamma_upper_dz: requires t > 0");
  if (z > 0.0) throw std::domain_error("gamma_upper_dz: requires z <= 0");
  double hi = std::max(t, 1.0) + 45.0;
  double total = 0.0;
  if (t < 1.0) {
    // x = e^v below 1 turns the power singularity into a smooth integrand
    total += integrate(
        [z](double v) { return v * std::exp(z * v - std::exp(v)); },
        std::log(t), 0.0);
    total += integrate(
        [z](double x) {
          return std::log(x) * std::pow(x, z - 1.0) * std::exp(-x);
        },
        1.0, hi);
  } else {
    total += integrate(
        [z](double x) {
          return std::log(x) * std::pow(x, z - 1.0) * std::exp(-x);
        },
        t, hi);
  }
  return total;
}

}  // namespace crmt
