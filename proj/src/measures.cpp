#include "crmt/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "crmt/specfun.hpp"

namespace crmt {

namespace {

double gaussian_cdf(double mean, double var, double x) {
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * var));
}

double gaussian_pdf(double mean, double var, double x) {
  double z = (x - mean) / std::sqrt(var);
  return std::exp(-0.5 * z * z) / std::sqrt(6.2831853071795864769 * var);
}

double poisson_pmf(double mean, long j) {
  return std::exp(j * std::log(mean) - mean - std::lgamma(j + 1.0));
}

}  // namespace

JumpFamily JumpFamily::gamma(double rate) {
  if (!(rate > 0.0)) throw std::domain_error("JumpFamily: rate must be > 0");
  return JumpFamily{Kind::Gamma, rate, 0.0};
}

JumpFamily JumpFamily::gen_gamma(double rate, double sigma) {
  if (!(rate > 0.0)) throw std::domain_error("JumpFamily: rate must be > 0");
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::domain_error("JumpFamily: sigma must lie in (0,1)");
  return JumpFamily{Kind::GenGamma, rate, sigma};
}

double JumpFamily::density(double s) const {
  if (!(s > 0.0)) throw std::domain_error("JumpFamily::density: s must be > 0");
  if (kind == Kind::Gamma) return rate * std::exp(-rate * s) / s;
  return std::pow(rate, 1.0 - sigma) / gamma_fn(1.0 - sigma) *
         std::exp(-rate * s) * std::pow(s, -1.0 - sigma);
}

double JumpFamily::tail(double u) const {
  if (!(u > 0.0)) throw std::domain_error("JumpFamily::tail: u must be > 0");
  if (kind == Kind::Gamma) return rate * gamma_upper(0.0, rate * u);
  return rate / gamma_fn(1.0 - sigma) * gamma_upper(-sigma, rate * u);
}

double JumpFamily::tail_primitive(double u) const {
  if (u <= 0.0) return 1.0;
  double t = rate * u;
  if (kind == Kind::Gamma) {
    // int_T^inf Gamma(0,t) dt = e^{-T} - T Gamma(0,T)
    return std::exp(-t) - t * gamma_upper(0.0, t);
  }
  // int_T^inf Gamma(-sigma,t) dt = Gamma(1-sigma,T) - T Gamma(-sigma,T)
  return (gamma_upper(1.0 - sigma, t) - t * gamma_upper(-sigma, t)) /
         gamma_fn(1.0 - sigma);
}

Mixture1D Mixture1D::atom(double x) {
  Mixture1D m;
  m.add(1.0, Atom{x});
  return m;
}

Mixture1D Mixture1D::gaussian(double mean, double var) {
  Mixture1D m;
  m.add(1.0, Gaussian{mean, var});
  return m;
}

Mixture1D Mixture1D::poisson(double mean) {
  Mixture1D m;
  m.add(1.0, PoissonLaw{mean});
  return m;
}

Mixture1D Mixture1D::empirical(std::vector<double> points) {
  Mixture1D m;
  m.add(1.0, Empirical{std::move(points)});
  return m;
}

Mixture1D& Mixture1D::add(double weight, Part part) {
  components.push_back(Component{weight, std::move(part)});
  return *this;
}

void Mixture1D::validate() const {
  double total = 0.0;
  for (const auto& c : components) {
    if (c.weight < 0.0)
      throw std::invalid_argument("Mixture1D: negative component weight");
    total += c.weight;
    if (const auto* g = std::get_if<Gaussian>(&c.part)) {
      if (!(g->var > 0.0))
        throw std::invalid_argument("Mixture1D: Gaussian variance must be > 0");
    } else if (const auto* p = std::get_if<PoissonLaw>(&c.part)) {
      if (!(p->mean > 0.0))
        throw std::invalid_argument("Mixture1D: Poisson mean must be > 0");
    } else if (const auto* e = std::get_if<Empirical>(&c.part)) {
      if (e->points.empty())
        throw std::invalid_argument("Mixture1D: empty empirical component");
    }
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("Mixture1D: weights must sum to 1");
}

double Mixture1D::cdf(double x) const {
  double value = 0.0;
  for (const auto& c : components) {
    if (const auto* a = std::get_if<Atom>(&c.part)) {
      if (x >= a->x) value += c.weight;
    } else if (const auto* g = std::get_if<Gaussian>(&c.part)) {
      value += c.weight * gaussian_cdf(g->mean, g->var, x);
    } else if (const auto* p = std::get_if<PoissonLaw>(&c.part)) {
      if (x >= 0.0) {
        long jmax = static_cast<long>(std::floor(x));
        double cum = 0.0, pj = std::exp(-p->mean);
        for (long j = 0; j <= jmax; ++j) {
          cum += pj;
          pj *= p->mean / (j + 1.0);
          if (cum >= 1.0 - 1e-17 && j > 2 * p->mean) break;
        }
        value += c.weight * std::min(cum, 1.0);
      }
    } else {
      const auto& pts = std::get<Empirical>(c.part).points;
      std::size_t below = 0;
      for (double p : pts)
        if (p <= x) ++below;
      value += c.weight * static_cast<double>(below) / pts.size();
    }
  }
  return value;
}

double Mixture1D::first_moment() const {
  double value = 0.0;
  for (const auto& c : components) {
    if (const auto* a = std::get_if<Atom>(&c.part)) {
      value += c.weight * a->x;
    } else if (const auto* g = std::get_if<Gaussian>(&c.part)) {
      value += c.weight * g->mean;
    } else if (const auto* p = std::get_if<PoissonLaw>(&c.part)) {
      value += c.weight * p->mean;
    } else {
      const auto& pts = std::get<Empirical>(c.part).points;
      value += c.weight * std::accumulate(pts.begin(), pts.end(), 0.0) /
               pts.size();
    }
  }
  return value;
}

double Mixture1D::upper_partial(double r) const {
  double value = 0.0;
  for (const auto& c : components) {
    if (const auto* a = std::get_if<Atom>(&c.part)) {
      value += c.weight * std::max(a->x - r, 0.0);
    } else if (const auto* g = std::get_if<Gaussian>(&c.part)) {
      double sd = std::sqrt(g->var);
      double z = (r - g->mean) / sd;
      value += c.weight *
               (sd * gaussian_pdf(0.0, 1.0, z) + (g->mean - r) * 0.5 * std::erfc(z / std::sqrt(2.0)));
    } else if (const auto* p = std::get_if<PoissonLaw>(&c.part)) {
      long j0 = std::max(0L, static_cast<long>(std::floor(r)) + 1);
      double sum = 0.0;
      long jmax = static_cast<long>(p->mean + 12.0 * std::sqrt(p->mean) + 60.0);
      for (long j = j0; j <= jmax; ++j) sum += (j - r) * poisson_pmf(p->mean, j);
      value += c.weight * std::max(sum, 0.0);
    } else {
      const auto& pts = std::get<Empirical>(c.part).points;
      double sum = 0.0;
      for (double p : pts) sum += std::max(p - r, 0.0);
      value += c.weight * sum / pts.size();
    }
  }
  return value;
}

double Mixture1D::lower_partial(double l) const {
  double value = 0.0;
  for (const auto& c : components) {
    if (const auto* a = std::get_if<Atom>(&c.part)) {
      value += c.weight * std::max(l - a->x, 0.0);
    } else if (const auto* g = std::get_if<Gaussian>(&c.part)) {
      double sd = std::sqrt(g->var);
      double z = (l - g->mean) / sd;
      value += c.weight *
               (sd * gaussian_pdf(0.0, 1.0, z) + (l - g->mean) * 0.5 * std::erfc(-z / std::sqrt(2.0)));
    } else if (const auto* p = std::get_if<PoissonLaw>(&c.part)) {
      double sum = 0.0;
      long jmax = static_cast<long>(std::floor(l));
      for (long j = 0; j <= jmax; ++j) sum += (l - j) * poisson_pmf(p->mean, j);
      if (l > 0.0) value += c.weight * sum;
    } else {
      const auto& pts = std::get<Empirical>(c.part).points;
      double sum = 0.0;
      for (double p : pts) sum += std::max(l - p, 0.0);
      value += c.weight * sum / pts.size();
    }
  }
  return value;
}

bool Mixture1D::has_point_mass() const {
  for (const auto& c : components) {
    if (c.weight == 0.0) continue;
    if (std::holds_alternative<Atom>(c.part) ||
        std::holds_alternative<Empirical>(c.part))
      return true;
  }
  return false;
}

double Mixture1D::sample(Rng& rng) const {
  double u = rng.uniform();
  double cum = 0.0;
  const Component* chosen = &components.back();
  for (const auto& c : components) {
    cum += c.weight;
    if (u <= cum) {
      chosen = &c;
      break;
    }
  }
  if (const auto* a = std::get_if<Atom>(&chosen->part)) return a->x;
  if (const auto* g = std::get_if<Gaussian>(&chosen->part))
    return g->mean + std::sqrt(g->var) * rng.normal();
  if (const auto* p = std::get_if<PoissonLaw>(&chosen->part))
    return static_cast<double>(rng.poisson(p->mean));
  const auto& pts = std::get<Empirical>(chosen->part).points;
  auto idx = static_cast<std::size_t>(rng.uniform() * pts.size());
  if (idx >= pts.size()) idx = pts.size() - 1;
  return pts[idx];
}

void ScaledLevyIntensity::validate() const {
  base.validate();
  double total = base_weight;
  if (base_weight < 0.0)
    throw std::invalid_argument("ScaledLevyIntensity: negative base weight");
  for (const auto& a : fixed_atoms) {
    if (a.weight < 0.0)
      throw std::invalid_argument("ScaledLevyIntensity: negative atom weight");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument(
        "ScaledLevyIntensity: mean measure must be a probability");
}

ScaledLevyIntensity scale_to_unit_mean(const GammaPrior& prior,
                                       Mixture1D base) {
  double mean = prior.total_mass / prior.scale;
  if (!(std::isfinite(mean) && mean > 0.0))
    throw std::invalid_argument("scale_to_unit_mean: mean must be finite and > 0");
  ScaledLevyIntensity out;
  out.base_jump = JumpFamily::gamma(prior.total_mass);
  out.base = std::move(base);
  out.base_weight = 1.0;
  out.base.validate();
  return out;
}

ScaledLevyIntensity scale_to_unit_mean(const GenGammaPrior& prior,
                                       Mixture1D base) {
  double mean = prior.total_mass;
  if (!(std::isfinite(mean) && mean > 0.0))
    throw std::invalid_argument("scale_to_unit_mean: mean must be finite and > 0");
  ScaledLevyIntensity out;
  out.base_jump = JumpFamily::gen_gamma(prior.total_mass, prior.sigma);
  out.base = std::move(base);
  out.base_weight = 1.0;
  out.base.validate();
  return out;
}

}  // namespace crmt
