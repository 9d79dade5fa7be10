#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "crmt/asymptotics.hpp"
#include "crmt/measures.hpp"
#include "crmt/posterior.hpp"
#include "crmt/rng.hpp"
#include "crmt/simulate.hpp"
#include "crmt/transport.hpp"
#include "oracles.hpp"

using crmt::JumpFamily;
using crmt::LatentLaw;
using crmt::Mixture1D;
using crmt::PosteriorState;
using crmt::Rng;

TEST_CASE("posterior state from raw values") {
  auto ps = PosteriorState::from_values({1.0, 2.0, 1.0, 3.0, 1.0, 2.0});
  CHECK(ps.n == 6);
  CHECK(ps.k() == 3);
  CHECK(ps.distinct[0] == std::pair<double, long>{1.0, 3});
  CHECK(ps.distinct[1] == std::pair<double, long>{2.0, 2});
  CHECK(ps.distinct[2] == std::pair<double, long>{3.0, 1});
  ps.validate();

  PosteriorState bad;
  bad.n = 3;
  bad.distinct = {{1.0, 1}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("gamma posterior structure") {
  auto base = Mixture1D::gaussian(0.0, 1.0);

  // no data: the prior itself
  auto prior = crmt::posterior_gamma(2.0, base, PosteriorState{});
  CHECK(prior.base_jump.rate == 2.0);
  CHECK(prior.base.components.size() == 1);

  // one observation: weights 2/3 base, 1/3 atom
  auto ps = PosteriorState::from_values({0.7});
  auto post = crmt::posterior_gamma(2.0, base, ps);
  CHECK(post.base_jump.kind == JumpFamily::Kind::Gamma);
  CHECK(post.base_jump.rate == 3.0);
  CHECK(post.base.components[0].weight == doctest::Approx(2.0 / 3.0));
  CHECK(post.base.components[1].weight == doctest::Approx(1.0 / 3.0));
  post.base.validate();  // weights sum to 1
  post.validate();

  auto atom_base = Mixture1D::atom(0.0);
  CHECK_THROWS_AS(crmt::posterior_gamma(2.0, atom_base, ps),
                  std::invalid_argument);
}

TEST_CASE("generalized gamma posterior structure") {
  auto base = Mixture1D::gaussian(0.0, 1.0);
  auto ps = PosteriorState::from_values({0.5, 0.5, 1.5});
  double alpha = 2.0, sigma = 0.4, u = 1.3;
  auto post = crmt::posterior_gengamma(alpha, sigma, base, ps, u);

  double lift = std::pow(1.0 + u, sigma);
  double c = alpha * lift + 3.0 - 2.0 * sigma;
  CHECK(post.base_jump.kind == JumpFamily::Kind::GenGamma);
  CHECK(post.base_jump.rate == doctest::Approx(c).epsilon(1e-14));
  CHECK(post.base_jump.sigma == sigma);
  CHECK(post.base_weight == doctest::Approx(alpha * lift / c));
  REQUIRE(post.fixed_atoms.size() == 2);
  CHECK(post.fixed_atoms[0].weight == doctest::Approx((2.0 - sigma) / c));
  CHECK(post.fixed_atoms[1].weight == doctest::Approx((1.0 - sigma) / c));
  CHECK(post.fixed_atoms[0].jump.kind == JumpFamily::Kind::Gamma);
  CHECK(post.fixed_atoms[0].jump.rate == doctest::Approx(c));
  post.validate();  // weights sum to one by the definition of c

  // no data reduces to the prior structure
  auto prior = crmt::posterior_gengamma(alpha, sigma, base, PosteriorState{}, u);
  CHECK(prior.fixed_atoms.empty());
  CHECK(prior.base_weight == doctest::Approx(1.0));
  CHECK(prior.base_jump.rate == doctest::Approx(alpha * lift));
}

TEST_CASE("latent log-density and mode") {
  LatentLaw law{2.0, 0.4, 50, 7};
  law.validate();
  CHECK(std::isfinite(law.logdensity_u(0.01)));
  CHECK(std::isfinite(law.logdensity_u(100.0)));
  CHECK_THROWS_AS(law.logdensity_u(0.0), std::domain_error);

  // the density of U integrates to something finite and positive
  double peak = -1e300;
  for (double u = 0.01; u < 200.0; u *= 1.1)
    peak = std::max(peak, law.logdensity_u(u));
  double mass = oracle::integrate(
      [&](double u) { return std::exp(law.logdensity_u(u) - peak); }, 1e-8,
      200.0, 1e-10);
  CHECK(mass > 0.0);
  CHECK(std::isfinite(mass));

  // mode: x-space derivative changes sign there, residual is tiny
  double xm = crmt::latent_mode_x(law);
  CHECK(law.f_x_prime(xm * (1.0 - 1e-6)) < 0.0);
  CHECK(law.f_x_prime(xm * (1.0 + 1e-6)) > 0.0);
  CHECK(std::abs(law.f_x_prime(xm)) < 1e-10);

  // f_x is the transform of logdensity_u: their modes must agree
  double um = std::pow(xm, 1.0 / law.sigma) - 1.0;
  double h = 1e-6 * um;
  double d_num = (law.logdensity_u(um + h) - law.logdensity_u(um - h)) / (2 * h);
  // derivative of log density of U at the pullback of the x-mode relates by
  // the chain rule through the monotone transform; check stationarity of the
  // x-density instead
  double xh = 1e-7 * xm;
  auto x_logdens = [&](double x) {
    double u = std::pow(x, 1.0 / law.sigma) - 1.0;
    // + log du/dx
    return law.logdensity_u(u) +
           std::log(1.0 / law.sigma) + (1.0 / law.sigma - 1.0) * std::log(x);
  };
  double slope = (x_logdens(xm + xh) - x_logdens(xm - xh)) / (2 * xh);
  CHECK(std::abs(slope) * xm < 1e-3);
  (void)d_num;
}

TEST_CASE("latent mode increases with k") {
  double prev = 0.0;
  for (long k : {2L, 5L, 10L, 20L, 40L}) {
    double m = crmt::latent_mode(1.5, 0.3, 100, k);
    CHECK(m > prev);
    prev = m;
  }
}

TEST_CASE("latent sampler: determinism and moments") {
  LatentLaw law{3.0, 0.5, 200, 12};
  Rng r1(42), r2(42);
  auto a = crmt::latent_sample(law, r1, 500);
  auto b = crmt::latent_sample(law, r2, 500);
  CHECK(a == b);  // bit-identical under the same seed

  double acceptance = 0.0;
  Rng r3(7);
  auto draws = crmt::latent_sample(law, r3, 20000, &acceptance);
  CHECK(acceptance > 0.2);

  // empirical mean of (1+U)^sigma against quadrature
  double xm = crmt::latent_mode_x(law);
  double fm = law.f_x(xm);
  double mass = oracle::integrate(
      [&](double x) { return std::exp(fm - law.f_x(x)); }, 1.0 + 1e-9,
      xm + 30.0, 1e-11);
  double first = oracle::integrate(
      [&](double x) { return x * std::exp(fm - law.f_x(x)); }, 1.0 + 1e-9,
      xm + 30.0, 1e-11);
  double expect = first / mass;
  double sum = 0.0, sum_sq = 0.0;
  for (double u : draws) {
    double x = std::pow(1.0 + u, law.sigma);
    sum += x;
    sum_sq += x * x;
  }
  double mean = sum / draws.size();
  double sd = std::sqrt((sum_sq / draws.size() - mean * mean) / draws.size());
  CHECK(std::abs(mean - expect) <= 3.0 * sd + 1e-6);
}

TEST_CASE("latent sampler boundary case n = 1") {
  LatentLaw law{2.0, 0.5, 1, 1};
  Rng rng(5);
  double acceptance = 0.0;
  auto draws = crmt::latent_sample(law, rng, 5000, &acceptance);
  CHECK(acceptance == 1.0);
  // x = (1+u)^sigma is 1 + Exp(alpha/sigma): mean 1 + sigma/alpha
  double mean_x = 0.0;
  for (double u : draws) mean_x += std::pow(1.0 + u, law.sigma);
  mean_x /= draws.size();
  CHECK(mean_x == doctest::Approx(1.0 + 0.25).epsilon(0.05));
}

TEST_CASE("dw_posterior_dp: identities and bounds") {
  auto base1 = Mixture1D::gaussian(1.0, 1.0);
  auto base2 = Mixture1D::gaussian(2.0, 1.0);
  Rng rng(11);
  auto data = crmt::gen_iid(Mixture1D::poisson(1.0), 100, rng);
  double C = crmt::constant_C();
  double w_bases = crmt::w1_mixture(base1, base2);

  // identical priors: zero
  auto same = crmt::dw_posterior_dp(2.0, base1, 2.0, base1, data.summary(30));
  CHECK(same.total <= 1e-12);

  // equal alphas: exact atom formula
  for (std::size_t n : {0u, 10u, 100u}) {
    auto rep = crmt::dw_posterior_dp(3.0, base1, 3.0, base2, data.summary(n));
    CHECK(rep.jump_part == 0.0);
    CHECK(rep.atom_part ==
          doctest::Approx(3.0 / (3.0 + n) * w_bases).epsilon(1e-8));
  }

  // jump bound and monotone decrease in n
  double prev = 1e300;
  for (std::size_t n : {0u, 5u, 20u, 60u, 100u}) {
    auto rep = crmt::dw_posterior_dp(1.0, base1, 5.0, base2, data.summary(n));
    CHECK(rep.jump_part <= C * std::log((5.0 + n) / (1.0 + n)) + 1e-12);
    CHECK(rep.jump_part < prev);
    prev = rep.jump_part;
    CHECK(rep.total ==
          doctest::Approx(rep.jump_part + rep.atom_part).epsilon(1e-10));
  }
}

TEST_CASE("posterior jump asymptotics n J -> C (a2 - a1)") {
  double C = crmt::constant_C();
  double a1 = 1.0, a2 = 5.0;
  double prev_dev = 1e300;
  for (long n : {100L, 1000L, 10000L}) {
    double J = crmt::jump_gamma_gamma(a1 + n, a2 + n);
    double dev = std::abs(n * J / (C * (a2 - a1)) - 1.0);
    CHECK(dev < prev_dev);
    prev_dev = dev;
  }
  CHECK(prev_dev < 5e-4);
}

TEST_CASE("atom component upper bound of the convex split") {
  auto base1 = Mixture1D::gaussian(0.0, 1.0);
  auto base2 = Mixture1D::gaussian(1.5, 0.5);
  Rng rng(17);
  auto data = crmt::gen_iid(Mixture1D::poisson(1.0), 60, rng);
  double a1 = 2.0;
  for (double a2 : {2.0, 8.0}) {
    std::size_t n = 60;
    auto ps = data.summary(n);
    auto rep = crmt::dw_posterior_dp(a1, base1, a2, base2, ps);
    std::vector<double> pts(data.values.begin(), data.values.begin() + n);
    double w_emp = crmt::w1_mixture(Mixture1D::empirical(pts), base2);
    double bound = a1 / (a1 + n) * crmt::w1_mixture(base1, base2) +
                   (a2 - a1) * n / ((a1 + n) * (a2 + n)) * w_emp;
    CHECK(rep.atom_part <= bound + 1e-8);
    if (a2 == a1)
      CHECK(rep.atom_part == doctest::Approx(bound).epsilon(1e-8));
  }
}

TEST_CASE("dw_posterior_gengamma_vs_dp") {
  auto base = Mixture1D::gaussian(0.0, 1.0);

  // no data: deterministic prior jump component
  Rng rng(3);
  auto prior = crmt::dw_posterior_gengamma_vs_dp(2.0, 0.4, base,
                                                 PosteriorState{}, 100, rng);
  CHECK(prior.total ==
        doctest::Approx(crmt::jump_gengamma_gamma(0.4)).epsilon(1e-10));
  CHECK(!prior.mc_std_error.has_value());

  auto data = crmt::gen_iid(Mixture1D::poisson(1.0), 40, rng);
  auto ps = data.summary(40);

  CHECK_THROWS_AS(
      crmt::dw_posterior_gengamma_vs_dp(2.0, 0.4, base, ps, 1, rng),
      std::invalid_argument);

  // same seed, bit-identical result
  Rng r1(99), r2(99);
  auto e1 = crmt::dw_posterior_gengamma_vs_dp(5.0, 0.5, base, ps, 64, r1);
  auto e2 = crmt::dw_posterior_gengamma_vs_dp(5.0, 0.5, base, ps, 64, r2);
  CHECK(e1.total == e2.total);
  CHECK(e1.mc_std_error.value() == e2.mc_std_error.value());
  CHECK(e1.total ==
        doctest::Approx(e1.jump_part + e1.atom_part).epsilon(1e-10));

  // every per-draw jump term is bounded by 2, the atom part by the moment
  // bound, so the estimate stays finite and moderate
  CHECK(e1.total < 8.0);

  // doubling the budget shrinks the standard error roughly like 1/sqrt(2)
  double ratio_sum = 0.0;
  for (int rep = 0; rep < 4; ++rep) {
    Rng ra(1000 + rep), rb(2000 + rep);
    auto small = crmt::dw_posterior_gengamma_vs_dp(5.0, 0.5, base, ps, 64, ra);
    auto big = crmt::dw_posterior_gengamma_vs_dp(5.0, 0.5, base, ps, 128, rb);
    ratio_sum += big.mc_std_error.value() / small.mc_std_error.value();
  }
  double avg_ratio = ratio_sum / 4.0;
  CHECK(avg_ratio > 0.4);
  CHECK(avg_ratio < 1.1);
}
