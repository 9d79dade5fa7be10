#include "crmt/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "crmt/numerics.hpp"
#include "crmt/transport.hpp"

namespace crmt {

PosteriorState DataSequence::summary(std::size_t n) const {
  if (n > values.size())
    throw std::invalid_argument("DataSequence::summary: prefix too long");
  return PosteriorState::from_values(
      std::vector<double>(values.begin(), values.begin() + n));
}

void DataSequence::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("DataSequence: cannot open " + path);
  out.precision(17);
  for (double v : values) out << v << "\n";
}

DataSequence DataSequence::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("DataSequence: cannot open " + path);
  DataSequence seq;
  double v;
  while (in >> v) seq.values.push_back(v);
  return seq;
}

DataSequence gen_iid(const Mixture1D& law, std::size_t n, Rng& rng) {
  law.validate();
  DataSequence seq;
  seq.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) seq.values.push_back(law.sample(rng));
  return seq;
}

DataSequence gen_crp(double alpha_bar, const Mixture1D& base, std::size_t n,
                     Rng& rng) {
  if (!(alpha_bar > 0.0))
    throw std::invalid_argument("gen_crp: alpha_bar must be > 0");
  base.validate();
  DataSequence seq;
  seq.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double p_new = alpha_bar / (alpha_bar + i);
    if (i == 0 || rng.uniform() < p_new) {
      seq.values.push_back(base.sample(rng));
    } else {
      auto idx = static_cast<std::size_t>(rng.uniform() * i);
      if (idx >= i) idx = i - 1;
      seq.values.push_back(seq.values[idx]);
    }
  }
  return seq;
}

DataSequence gen_pitman_yor(double alpha_bar, double sigma_bar,
                            const Mixture1D& base, std::size_t n, Rng& rng) {
  if (!(alpha_bar > 0.0))
    throw std::invalid_argument("gen_pitman_yor: alpha_bar must be > 0");
  if (!(sigma_bar >= 0.0 && sigma_bar < 1.0))
    throw std::invalid_argument("gen_pitman_yor: sigma_bar must lie in [0,1)");
  base.validate();
  DataSequence seq;
  seq.values.reserve(n);
  std::vector<double> cluster_value;
  std::vector<long> cluster_count;
  for (std::size_t i = 0; i < n; ++i) {
    double k = static_cast<double>(cluster_value.size());
    double denom = alpha_bar + static_cast<double>(i);
    double u = rng.uniform() * denom;
    if (i == 0 || u < alpha_bar + k * sigma_bar) {
      double v = base.sample(rng);
      cluster_value.push_back(v);
      cluster_count.push_back(1);
      seq.values.push_back(v);
    } else {
      double acc = alpha_bar + k * sigma_bar;
      std::size_t pick = cluster_value.size() - 1;
      for (std::size_t j = 0; j < cluster_value.size(); ++j) {
        acc += cluster_count[j] - sigma_bar;
        if (u < acc) {
          pick = j;
          break;
        }
      }
      ++cluster_count[pick];
      seq.values.push_back(cluster_value[pick]);
    }
  }
  return seq;
}

double TruncatedCRM::total_mass() const {
  double s = 0.0;
  for (const auto& j : jumps) s += j.size;
  return s;
}

double TruncatedCRM::integrate(const TestFunction& f) const {
  double s = 0.0;
  for (const auto& j : jumps) s += j.size * f(j.location);
  return s;
}

namespace {

double inverse_tail(const JumpFamily& jump, double epsilon, double target) {
  // solve U(s) = target for s >= epsilon; U decreasing
  double hi = epsilon;
  while (jump.tail(hi) > target) hi += std::max(hi, 1.0 / jump.rate);
  if (hi == epsilon) return epsilon;
  double lo = std::max(epsilon, 0.5 * hi);
  while (jump.tail(lo) < target && lo > epsilon) lo = std::max(epsilon, 0.5 * lo);
  return bisect([&](double s) { return jump.tail(s) - target; }, lo, hi,
                1e-12 * std::max(1.0, hi));
}

}  // namespace

TruncatedCRM sample_crm_truncated(const ScaledLevyIntensity& intensity,
                                  double epsilon, Rng& rng) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("sample_crm_truncated: epsilon must be > 0");
  intensity.validate();

  std::vector<double> mass;  // jump mass above epsilon per component
  mass.push_back(intensity.base_weight * intensity.base_jump.tail(epsilon));
  for (const auto& a : intensity.fixed_atoms)
    mass.push_back(a.weight * a.jump.tail(epsilon));
  double rate = 0.0;
  for (double m : mass) rate += m;

  TruncatedCRM crm;
  crm.epsilon = epsilon;
  crm.rate = rate;
  if (rate <= 0.0) return crm;  // truncated everything away: empty measure

  long count = rng.poisson(rate);
  crm.jumps.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    double pick = rng.uniform() * rate;
    std::size_t comp = 0;
    double acc = 0.0;
    for (std::size_t j = 0; j < mass.size(); ++j) {
      acc += mass[j];
      if (pick <= acc) {
        comp = j;
        break;
      }
    }
    const JumpFamily& jump =
        comp == 0 ? intensity.base_jump : intensity.fixed_atoms[comp - 1].jump;
    double tail_at_eps = jump.tail(epsilon);
    double size = inverse_tail(jump, epsilon, rng.uniform() * tail_at_eps);
    double loc = comp == 0 ? intensity.base.sample(rng)
                           : intensity.fixed_atoms[comp - 1].location;
    crm.jumps.push_back({size, loc});
  }
  return crm;
}

double TestFunction::operator()(double x) const {
  switch (kind) {
    case Kind::ClampedLinear:
      return std::clamp(x, -1.0, 1.0);
    case Kind::TanhLike:
      return std::tanh(x);
  }
  return 0.0;
}

TestFunction TestFunction::clamped_linear() {
  return {Kind::ClampedLinear, 1.0, 1.0};
}

TestFunction TestFunction::tanh_like() { return {Kind::TanhLike, 1.0, 1.0}; }

BoundCheckResult check_integral_bound(const ScaledLevyIntensity& i1,
                                      const ScaledLevyIntensity& i2,
                                      const TestFunction& f, double epsilon,
                                      std::size_t mc_budget, Rng& rng) {
  const std::size_t batches = 10;
  std::size_t per_batch = std::max<std::size_t>(20, mc_budget / (2 * batches));

  Rng streams(rng.next_u64());
  std::vector<double> batch_w1;
  batch_w1.reserve(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    Rng sub = streams.substream(b);
    std::vector<double> xs, ys;
    xs.reserve(per_batch);
    ys.reserve(per_batch);
    for (std::size_t i = 0; i < per_batch; ++i)
      xs.push_back(sample_crm_truncated(i1, epsilon, sub).integrate(f));
    for (std::size_t i = 0; i < per_batch; ++i)
      ys.push_back(sample_crm_truncated(i2, epsilon, sub).integrate(f));
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double w = 0.0;
    for (std::size_t i = 0; i < per_batch; ++i) w += std::abs(xs[i] - ys[i]);
    batch_w1.push_back(w / per_batch);
  }
  double mean = 0.0;
  for (double w : batch_w1) mean += w;
  mean /= batches;
  double var = 0.0;
  for (double w : batch_w1) var += (w - mean) * (w - mean);
  var /= (batches - 1.0);

  BoundCheckResult out;
  out.lhs_estimate = mean;
  out.lhs_std_error = std::sqrt(var / batches);
  out.rhs = std::max(f.sup_bound, f.lip) * dw_homogeneous(i1, i2).total;
  return out;
}

}  // namespace crmt
