#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <utility>

namespace crmt {

// Bisection on a bracketing interval. Requires a sign change between lo and
// hi; converges to absolute tolerance xtol (or the floating-point floor of
// the bracket, whichever comes first).
template <class F>
double bisect(F&& f, double lo, double hi, double xtol = 1e-12) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::runtime_error("bisect: bracket does not change sign");
  while (hi - lo > xtol) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct QuadOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-14;
  int max_depth = 48;
};

namespace quad_detail {

template <class F>
double adapt(F& f, double a, double fa, double b, double fb, double m,
             double fm, double whole, double eps, int depth) {
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * eps, depth - 1) +
         adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * eps, depth - 1);
}

}  // namespace quad_detail

// Adaptive Simpson quadrature with explicit endpoint values, so callers can
// substitute one-sided limits at jump discontinuities of the integrand.
template <class F>
double integrate_with_endpoints(F&& f, double a, double fa, double b,
                                double fb, QuadOptions opt = {}) {
  if (!(b > a)) return 0.0;
  double m = 0.5 * (a + b);
  double fm = f(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double eps = std::max(opt.abs_tol, opt.rel_tol * std::abs(whole));
  return quad_detail::adapt(f, a, fa, b, fb, m, fm, whole, eps,
                            opt.max_depth);
}

template <class F>
double integrate(F&& f, double a, double b, QuadOptions opt = {}) {
  if (!(b > a)) return 0.0;
  return integrate_with_endpoints(f, a, f(a), b, f(b), opt);
}

// Same integral after the substitution x = e^v; spreads wide positive
// domains (b/a large) over a log scale so power-law behaviour near the left
// endpoint stays polynomially resolved.
template <class F>
double integrate_log(F&& f, double a, double b, QuadOptions opt = {}) {
  if (!(b > a)) return 0.0;
  auto g = [&f](double v) {
    double x = std::exp(v);
    return f(x) * x;
  };
  return integrate(g, std::log(a), std::log(b), opt);
}

}  // namespace crmt
