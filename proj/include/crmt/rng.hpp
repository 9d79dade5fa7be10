#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace crmt {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random stream. Streams are addressed by (seed, index):
// substream(i) depends only on the constructor seed and i, never on how much
// of the parent stream was consumed, so per-task substreams give results
// that do not depend on scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix(seed, 0xc3a5u)) {}

  Rng substream(std::uint64_t index) const {
    return Rng(mix(seed_, 0x517cc1b727220a95ULL ^ index));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  // uniform on (0,1), 53-bit resolution, never exactly 0 or 1
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; two uniforms per draw keeps the stream layout fixed
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.2831853071795864769 * u2);
  }

  double exponential() { return -std::log(uniform()); }

  long poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    if (mean > 30.0) {
      // Poisson additivity keeps the multiplication method exact
      double half = 0.5 * mean;
      return poisson(half) + poisson(mean - half);
    }
    double limit = std::exp(-mean);
    double prod = uniform();
    long k = 0;
    while (prod > limit) {
      prod *= uniform();
      ++k;
    }
    return k;
  }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t state = a ^ (b * 0xff51afd7ed558ccdULL);
    std::uint64_t r = splitmix64(state);
    return r ^ splitmix64(state);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace crmt
