#pragma once

namespace crmt {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240;

// Gamma(z) for z > 0.
double gamma_fn(double z);

// Upper incomplete gamma Gamma(z,t) = int_t^inf x^{z-1} e^{-x} dx for
// z in [-1, 1] and t > 0. Gamma(0,t) is the exponential integral E1(t).
double gamma_upper(double z, double t);

// Order derivative d/dz Gamma(z,t) = int_t^inf log(x) x^{z-1} e^{-x} dx,
// for z <= 0, t > 0.
double gamma_upper_dz(double z, double t);

}  // namespace crmt
