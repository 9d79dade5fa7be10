#include "crmt/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "crmt/numerics.hpp"
#include "crmt/specfun.hpp"

namespace crmt {

namespace {

// Locate every zero of U1 - U2 on (0, inf). Two scaled gamma tails cross
// exactly once, inside [tbar/a2, tbar/a1] by the bracketing of the crossing
// between t Gamma(0,t) evaluated at the two rates. Other pairs are scanned
// on a geometric grid; a gen-gamma vs gamma pair with distinct rates can
// cross twice (the second crossing sits far out in the tail).
std::vector<double> find_tail_crossings(const JumpFamily& j1,
                                        const JumpFamily& j2) {
  auto diff = [&](double u) { return j1.tail(u) - j2.tail(u); };

  if (j1.kind == JumpFamily::Kind::Gamma &&
      j2.kind == JumpFamily::Kind::Gamma) {
    double a_lo = std::min(j1.rate, j2.rate);
    double a_hi = std::max(j1.rate, j2.rate);
    double tb = intersection_tbar();
    double lo = tb / a_hi;
    double hi = tb / a_lo;
    double flo = diff(lo), fhi = diff(hi);
    // widen slightly if roundoff puts a bracket endpoint past the root
    for (int i = 0; i < 8 && (flo > 0.0) == (fhi > 0.0); ++i) {
      lo *= 0.9;
      hi *= 1.1;
      flo = diff(lo);
      fhi = diff(hi);
    }
    if ((flo > 0.0) == (fhi > 0.0))
      throw std::runtime_error(
          "w1_extended: gamma tails do not cross in the expected bracket");
    return {bisect(diff, lo, hi)};
  }

  double r_min = std::min(j1.rate, j2.rate);
  double r_max = std::max(j1.rate, j2.rate);
  double lo = 1e-8 / r_max;
  double hi = 80.0 / r_min;
  const int n_scan = 1000;
  double ratio = std::pow(hi / lo, 1.0 / n_scan);
  std::vector<double> roots;
  double prev_u = lo;
  double prev_f = diff(lo);
  double u = lo;
  for (int i = 1; i <= n_scan; ++i) {
    u *= ratio;
    double f = diff(u);
    if (f == 0.0) {
      roots.push_back(u);
    } else if ((f > 0.0) != (prev_f > 0.0)) {
      roots.push_back(bisect(diff, prev_u, u));
    }
    prev_u = u;
    prev_f = f;
  }
  if (roots.empty())
    throw std::runtime_error("w1_extended: no tail crossing found");
  if (roots.size() > 4)
    throw std::runtime_error(
        "w1_extended: unexpected tail crossing structure (more than 4 zeros)");
  return roots;
}

double piecewise_quadrature_abs(const JumpFamily& j1, const JumpFamily& j2,
                                double a, double b) {
  auto diff = [&](double u) { return j1.tail(u) - j2.tail(u); };
  double value = (b / a > 50.0) ? integrate_log(diff, a, b)
                                : integrate(diff, a, b);
  return std::abs(value);
}

}  // namespace

double intersection_tbar() {
  static const double tbar = bisect(
      [](double t) { return gamma_upper(0.0, t) - std::exp(-t); }, 1e-8, 1.0,
      1e-14);
  return tbar;
}

double constant_C() {
  static const double C = [] {
    double tb = intersection_tbar();
    const double delta = 1e-8;
    const double cap = 60.0;
    // int_0^d (Gamma(0,t) - e^{-t}) dt = d Gamma(0,d), and the symmetric
    // closed form T Gamma(0,T) covers the upper tail
    double head = delta * gamma_upper(0.0, delta);
    double mid1 = integrate(
        [](double t) { return gamma_upper(0.0, t) - std::exp(-t); }, delta, tb);
    double mid2 = integrate(
        [](double t) { return std::exp(-t) - gamma_upper(0.0, t); }, tb, cap);
    double tail = cap * gamma_upper(0.0, cap);
    return head + mid1 + mid2 + tail;
  }();
  return C;
}

double w1_extended(const JumpFamily& j1, const JumpFamily& j2) {
  if (j1 == j2) return 0.0;
  std::vector<double> cross = find_tail_crossings(j1, j2);

  double r_min = std::min(j1.rate, j2.rate);
  double r_max = std::max(j1.rate, j2.rate);
  double head_end = std::min(0.5 * cross.front(), 0.05 / r_max);
  double tail_start = 1.5 * cross.back() + 25.0 / r_min;

  // improper ends in closed form through the tail primitives
  double head = std::abs(j2.tail_primitive(head_end) - j1.tail_primitive(head_end));
  double tail = std::abs(j1.tail_primitive(tail_start) - j2.tail_primitive(tail_start));

  std::vector<double> pts;
  pts.push_back(head_end);
  for (double c : cross) pts.push_back(c);
  pts.push_back(tail_start);

  double total = head + tail;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += piecewise_quadrature_abs(j1, j2, pts[i], pts[i + 1]);
  return total;
}

double jump_gamma_gamma(double a1, double a2) {
  if (!(a1 > 0.0 && a2 > 0.0))
    throw std::domain_error("jump_gamma_gamma: rates must be > 0");
  if (a1 == a2) return 0.0;
  return w1_extended(JumpFamily::gamma(a1), JumpFamily::gamma(a2));
}

double jump_gengamma_gamma(double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::domain_error("jump_gengamma_gamma: sigma must lie in (0,1)");
  // after t = rate * s the rate drops out; integrate the reduced form
  double gam = gamma_fn(1.0 - sigma);
  auto h = [&](double t) {
    return gamma_upper(-sigma, t) / gam - gamma_upper(0.0, t);
  };
  // unique zero: h -> +inf at 0, first increasing then decreasing to 0-
  double t_lo = 1e-10, t_hi = 10.0;
  while (h(t_hi) >= 0.0) t_hi *= 2.0;
  double t0 = bisect(h, t_lo, t_hi);

  const double delta = 1e-9;
  const double cap = std::max(4.0 * t0, 60.0);
  // int_0^d Gamma(-s,t) dt = Gamma(1-s) - Gamma(1-s,d) + d Gamma(-s,d)
  double head = (gam - gamma_upper(1.0 - sigma, delta) +
                 delta * gamma_upper(-sigma, delta)) /
                    gam -
                (1.0 - std::exp(-delta) + delta * gamma_upper(0.0, delta));
  double mid1 = integrate_log(h, delta, t0);
  double mid2 = integrate([&](double t) { return -h(t); }, t0, cap);
  // int_T^inf (-h) = T Gamma(0,T) - (Gamma(1-s,T) - T Gamma(-s,T))/Gamma(1-s)
  double tail = cap * gamma_upper(0.0, cap) -
                (gamma_upper(1.0 - sigma, cap) -
                 cap * gamma_upper(-sigma, cap)) /
                    gam;
  return head + mid1 + mid2 + tail;
}

namespace {

// Flattened view of a mixture for fast repeated CDF evaluation: point masses
// sorted with cumulative weights, continuous parts kept analytic.
struct Profile {
  std::vector<double> step_x;
  std::vector<double> step_cum;  // cumulative point mass up to and including x
  std::vector<std::pair<double, Mixture1D::Gaussian>> gaussians;
  std::vector<std::pair<double, Mixture1D::PoissonLaw>> poissons;

  double point_mass_upto(double x, bool inclusive) const {
    if (step_x.empty()) return 0.0;
    auto it = inclusive
                  ? std::upper_bound(step_x.begin(), step_x.end(), x)
                  : std::lower_bound(step_x.begin(), step_x.end(), x);
    if (it == step_x.begin()) return 0.0;
    return step_cum[static_cast<std::size_t>(it - step_x.begin()) - 1];
  }

  double continuous_cdf(double x) const {
    double v = 0.0;
    for (const auto& [w, g] : gaussians)
      v += w * 0.5 * std::erfc(-(x - g.mean) / std::sqrt(2.0 * g.var));
    for (const auto& [w, p] : poissons) {
      if (x < 0.0) continue;
      long jmax = static_cast<long>(std::floor(x));
      double cum = 0.0, pj = std::exp(-p.mean);
      for (long j = 0; j <= jmax; ++j) {
        cum += pj;
        pj *= p.mean / (j + 1.0);
        if (cum >= 1.0 - 1e-17 && j > 2 * p.mean) break;
      }
      v += w * std::min(cum, 1.0);
    }
    return v;
  }

  double cdf(double x) const { return continuous_cdf(x) + point_mass_upto(x, true); }
  double cdf_left(double x) const {
    return continuous_cdf(x) + point_mass_upto(x, false);
  }
};

Profile build_profile(const Mixture1D& m) {
  std::vector<std::pair<double, double>> masses;  // (x, weight)
  Profile p;
  for (const auto& c : m.components) {
    if (c.weight == 0.0) continue;
    if (const auto* a = std::get_if<Mixture1D::Atom>(&c.part)) {
      masses.emplace_back(a->x, c.weight);
    } else if (const auto* g = std::get_if<Mixture1D::Gaussian>(&c.part)) {
      p.gaussians.emplace_back(c.weight, *g);
    } else if (const auto* pl = std::get_if<Mixture1D::PoissonLaw>(&c.part)) {
      p.poissons.emplace_back(c.weight, *pl);
    } else {
      const auto& pts = std::get<Mixture1D::Empirical>(c.part).points;
      double w = c.weight / pts.size();
      for (double x : pts) masses.emplace_back(x, w);
    }
  }
  std::sort(masses.begin(), masses.end());
  double cum = 0.0;
  for (const auto& [x, w] : masses) {
    cum += w;
    if (!p.step_x.empty() && p.step_x.back() == x) {
      p.step_cum.back() = cum;
    } else {
      p.step_x.push_back(x);
      p.step_cum.push_back(cum);
    }
  }
  return p;
}

void append_poisson_integers(const Mixture1D& m, double lo, double hi,
                             std::vector<double>& pts) {
  for (const auto& c : m.components) {
    if (const auto* p = std::get_if<Mixture1D::PoissonLaw>(&c.part)) {
      long jhi = static_cast<long>(
          std::min(hi, p->mean + 12.0 * std::sqrt(p->mean) + 60.0));
      for (long j = std::max(0L, static_cast<long>(std::ceil(lo))); j <= jhi;
           ++j)
        pts.push_back(static_cast<double>(j));
    } else if (const auto* g = std::get_if<Mixture1D::Gaussian>(&c.part)) {
      if (g->mean > lo && g->mean < hi) pts.push_back(g->mean);
    }
  }
}

}  // namespace

double w1_mixture(const Mixture1D& m1, const Mixture1D& m2) {
  m1.validate();
  m2.validate();
  Profile p1 = build_profile(m1);
  Profile p2 = build_profile(m2);

  // truncation certified by the partial first moments
  double lo = -1.0, hi = 1.0;
  for (const Profile* p : {&p1, &p2}) {
    if (!p->step_x.empty()) {
      lo = std::min(lo, p->step_x.front() - 1.0);
      hi = std::max(hi, p->step_x.back() + 1.0);
    }
    for (const auto& [w, g] : p->gaussians) {
      lo = std::min(lo, g.mean - 9.0 * std::sqrt(g.var));
      hi = std::max(hi, g.mean + 9.0 * std::sqrt(g.var));
    }
    for (const auto& [w, pl] : p->poissons) {
      lo = std::min(lo, -1.0);
      hi = std::max(hi, pl.mean + 12.0 * std::sqrt(pl.mean) + 40.0);
    }
  }
  while (m1.lower_partial(lo) + m2.lower_partial(lo) > 1e-13) lo -= 0.5 * (hi - lo);
  while (m1.upper_partial(hi) + m2.upper_partial(hi) > 1e-13) hi += 0.5 * (hi - lo);

  std::vector<double> pts;
  pts.push_back(lo);
  pts.push_back(hi);
  for (const Profile* p : {&p1, &p2})
    for (double x : p->step_x)
      if (x > lo && x < hi) pts.push_back(x);
  append_poisson_integers(m1, lo, hi, pts);
  append_poisson_integers(m2, lo, hi, pts);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto diff = [&](double x) { return std::abs(p1.cdf(x) - p2.cdf(x)); };
  double total = 0.0;
  QuadOptions opt;
  opt.rel_tol = 1e-9;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double a = pts[i], b = pts[i + 1];
    if (!(b > a)) continue;
    opt.abs_tol = std::max(1e-15, 1e-13 * (b - a) / (hi - lo));
    // endpoint values use one-sided limits so point masses at the segment
    // ends do not leak into the open interval
    double fa = std::abs(p1.cdf(a) - p2.cdf(a));
    double fb = std::abs(p1.cdf_left(b) - p2.cdf_left(b));
    total += integrate_with_endpoints(diff, a, fa, b, fb, opt);
  }
  return total;
}

DistanceReport dw_homogeneous(const ScaledLevyIntensity& i1,
                              const ScaledLevyIntensity& i2) {
  if (!i1.homogeneous() || !i2.homogeneous())
    throw std::invalid_argument(
        "dw_homogeneous: intensities with fixed atoms need the posterior "
        "distance routines");
  DistanceReport r;
  r.jump_part = w1_extended(i1.base_jump, i2.base_jump);
  r.atom_part = w1_mixture(i1.base, i2.base);
  r.total = r.jump_part + r.atom_part;
  r.method = DistanceMethod::closed_form_quadrature;
  return r;
}

}  // namespace crmt
