#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "privsim/channel.hpp"
#include "privsim/random.hpp"

using namespace privsim;

namespace {

ChannelParams small_params(double sigma) {
  ChannelParams p;
  p.n_nodes = 3;
  p.main_gain_means = {25.0, 30.0, 40.0};
  p.cross_gain_means = {0.5, 0.7, 0.9, 1.1, 1.3, 1.5};
  p.estimation_sigma = sigma;
  p.rng_seed = 42;
  return p;
}

}  // namespace

TEST_CASE("rate: closed-form values and zero boundaries") {
  CHECK(rate(1.0, 0.0) == 0.0);
  CHECK(rate(0.0, 123.0) == 0.0);
  CHECK(rate(3.0, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rate(0.5, 30.0) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("rate: monotone in power and gain") {
  RandomStream rng(7);
  for (int i = 0; i < 200; ++i) {
    const double p = 10.0 * rng.uniform();
    const double h = 50.0 * rng.uniform();
    const double dp = rng.uniform();
    const double dh = rng.uniform();
    CHECK(rate(p + dp, h) >= rate(p, h));
    CHECK(rate(p, h + dh) >= rate(p, h));
  }
}

TEST_CASE("sample_block: sigma=0 gives exact estimates") {
  ChannelParams p = small_params(0.0);
  RandomStream rng(p.rng_seed);
  const ChannelBlockState s = sample_block(p, rng);
  for (std::size_t j = 0; j < p.n_nodes; ++j)
    CHECK(s.h_main_est[j] == s.h_main[j]);
}

TEST_CASE("sample_block: exponential sampler hits its mean within 1%") {
  ChannelParams p;
  p.n_nodes = 1;
  p.main_gain_means = {25.0};
  p.cross_gain_means = {};
  p.estimation_sigma = 0.0;
  p.rng_seed = 11;
  RandomStream rng(p.rng_seed);
  double sum = 0.0;
  const std::size_t n = 1000000;
  for (std::size_t i = 0; i < n; ++i)
    sum += sample_block(p, rng).h_main[0];
  const double mean = sum / static_cast<double>(n);
  CHECK(mean == doctest::Approx(25.0).epsilon(0.01));
}

TEST_CASE("sample_block: estimation error variance is sigma^2 at sigma=1") {
  ChannelParams p = small_params(1.0);
  RandomStream rng(5);
  double sum = 0.0, sumsq = 0.0;
  const std::size_t n = 1000000;
  for (std::size_t i = 0; i < n; ++i) {
    const ChannelBlockState s = sample_block(p, rng);
    const double e = s.h_main_est[0] - s.h_main[0];
    sum += e;
    sumsq += e * e;
  }
  const double mean = sum / static_cast<double>(n);
  const double var = sumsq / static_cast<double>(n) - mean * mean;
  CHECK(var == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::fabs(mean) < 0.01);
}

TEST_CASE("sample_block: identical seeds give bit-identical sequences") {
  ChannelParams p = small_params(1.0);
  RandomStream a(p.rng_seed), b(p.rng_seed);
  for (int k = 0; k < 100; ++k) {
    const ChannelBlockState sa = sample_block(p, a, k);
    const ChannelBlockState sb = sample_block(p, b, k);
    CHECK(sa.h_main == sb.h_main);
    CHECK(sa.h_main_est == sb.h_main_est);
    CHECK(sa.h_cross == sb.h_cross);
  }
}

TEST_CASE("expected_main_rate: sigma=0 degenerates to the plain rate") {
  CHECK(expected_main_rate(2.0, 5.0, 0.0) == rate(2.0, 5.0));
  CHECK(expected_main_rate(2.0, -5.0, 0.0) == 0.0);
}

TEST_CASE("expected_main_rate: matches Monte Carlo within 3 standard errors") {
  const double power = 1.0, est = 10.0, sigma = 1.0;
  const double got = expected_main_rate(power, est, sigma, 32);

  std::mt19937_64 eng(123);
  std::normal_distribution<double> noise(0.0, sigma);
  const auto mc = oracles::monte_carlo(
      [&]() { return noise(eng); },
      [&](double e) {
        const double g = est - e;
        return g > 0.0 ? std::log2(1.0 + power * g) : 0.0;
      },
      10000000);
  CHECK(std::fabs(got - mc.mean) < 3.0 * mc.stderr_);
}

TEST_CASE("expected_main_rate: deeply negative estimate truncates to zero") {
  CHECK(expected_main_rate(1.0, -100.0, 1.0, 32) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(expected_main_rate(1.0, -100.0, 1.0, 32) >= 0.0);
}

TEST_CASE("expected_main_rate: monotone and bounded by a 6-sigma gain") {
  RandomStream rng(17);
  for (int i = 0; i < 100; ++i) {
    const double p = 0.1 + 10.0 * rng.uniform();
    const double est = 50.0 * rng.uniform();
    const double sigma = 0.2 + 2.0 * rng.uniform();
    const double base = expected_main_rate(p, est, sigma);
    CHECK(expected_main_rate(p + 0.5, est, sigma) >= base);
    CHECK(expected_main_rate(p, est + 0.5, sigma) >= base);
    CHECK(base <= rate(p, est + 6.0 * sigma));
  }
}

TEST_CASE("expected_cross_rate: zero power transmits nothing") {
  CHECK(expected_cross_rate(0.0, 1.0) == 0.0);
}

TEST_CASE("expected_cross_rate: matches adaptive quadrature at (1,1)") {
  const double got = expected_cross_rate(1.0, 1.0);
  const double want = oracles::expected_cross_rate_quadrature(1.0, 1.0);
  CHECK(std::fabs(got - want) < 1e-8);
}

TEST_CASE("expected_cross_rate: matches Monte Carlo at (2, 0.5)") {
  const double got = expected_cross_rate(2.0, 0.5);
  std::mt19937_64 eng(321);
  std::exponential_distribution<double> h(1.0 / 0.5);
  const auto mc = oracles::monte_carlo(
      [&]() { return h(eng); },
      [](double g) { return std::log2(1.0 + 2.0 * g); }, 10000000);
  CHECK(std::fabs(got - mc.mean) < 3.0 * mc.stderr_);
}

TEST_CASE("expected_cross_rate: quadrature oracle across random (P,m) pairs") {
  RandomStream rng(99);
  for (int i = 0; i < 20; ++i) {
    const double p = 0.1 + 9.9 * rng.uniform();
    const double m = 0.1 + 9.9 * rng.uniform();
    const double got = expected_cross_rate(p, m);
    const double want = oracles::expected_cross_rate_quadrature(p, m);
    CHECK(got == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("exp_integral_e1: frozen value at x=1") {
  CHECK(std::fabs(exp_integral_e1(1.0) - 0.21938393439552) < 1e-10);
}

TEST_CASE("exp_integral_e1: asymptotic behaviour at x=50") {
  const double approx = std::exp(-50.0) / 50.0;
  CHECK(exp_integral_e1(50.0) == doctest::Approx(approx).epsilon(0.02));
}

TEST_CASE("exp_integral_e1: series limit near zero") {
  const double x = 1e-6;
  const double want = -0.57721566490153286 - std::log(x);
  CHECK(std::fabs(exp_integral_e1(x) - want) < 1e-5);
}

TEST_CASE("exp_integral_e1: domain error for nonpositive arguments") {
  CHECK_THROWS_AS(exp_integral_e1(0.0), std::domain_error);
  CHECK_THROWS_AS(exp_integral_e1(-1.0), std::domain_error);
}

TEST_CASE("exp_integral_e1: 1e-10 relative agreement with GSL at 50 points") {
  RandomStream rng(3);
  for (int i = 0; i < 50; ++i) {
    // log-uniform over [1e-6, 100]
    const double x = std::pow(10.0, -6.0 + 8.0 * rng.uniform());
    const double want = oracles::e1_reference(x);
    const double got = exp_integral_e1(x);
    CHECK(std::fabs(got - want) <= 1e-10 * std::fabs(want));
  }
}

TEST_CASE("gauss_hermite_rule: weights normalized, nodes symmetric") {
  for (std::size_t order : {2u, 8u, 16u, 32u, 61u}) {
    const GaussHermiteRule& rule = gauss_hermite_rule(order);
    REQUIRE(rule.nodes.size() == order);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < order; ++i)
      CHECK(rule.nodes[i] == doctest::Approx(-rule.nodes[order - 1 - i]).epsilon(1e-12));
    // E[e^2] = sum w (sqrt(2) t)^2 should equal 1 for a unit normal
    double second = 0.0;
    for (std::size_t i = 0; i < order; ++i)
      second += rule.weights[i] * 2.0 * rule.nodes[i] * rule.nodes[i];
    CHECK(second == doctest::Approx(1.0).epsilon(1e-10));
  }
}
