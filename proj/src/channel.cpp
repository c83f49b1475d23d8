#include "privsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace privsim {

namespace {

constexpr double kInvLn2 = 1.4426950408889634074;  // 1/ln(2)
constexpr double kEulerGamma = 0.57721566490153286060651209008240;

// Series expansion, valid for 0 < x <= 1:
//   E1(x) = -gamma - ln x + sum_{n>=1} (-1)^{n+1} x^n / (n * n!)
double e1_series(double x) {
  double sum = 0.0;
  double term = 1.0;  // x^n / n!
  for (int n = 1; n <= 40; ++n) {
    term *= x / n;
    const double contrib = term / n;
    sum += (n % 2 == 1) ? contrib : -contrib;
    if (contrib < 1e-17 * std::max(sum, 1e-300)) break;
  }
  return -kEulerGamma - std::log(x) + sum;
}

// Modified Lentz evaluation of the continued fraction
//   exp(x) * E1(x) = 1 / (x + 1 - 1^2/(x + 3 - 2^2/(x + 5 - ...)))
// Convergent for x > 1.
double e1_scaled_cf(double x) {
  const double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double f = d;
  for (int n = 1; n <= 200; ++n) {
    const double a = -static_cast<double>(n) * n;
    b += 2.0;
    d = b + a * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + a / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  return f;
}

}  // namespace

std::vector<std::string> validate_channel_params(const ChannelParams& p) {
  std::vector<std::string> errs;
  if (p.n_nodes == 0) errs.push_back("channel: n_nodes must be >= 1");
  if (p.main_gain_means.size() != p.n_nodes)
    errs.push_back("channel: main_gain_means must have n_nodes entries");
  const std::size_t n_pairs = p.n_nodes * (p.n_nodes > 0 ? p.n_nodes - 1 : 0);
  if (p.cross_gain_means.size() != n_pairs)
    errs.push_back("channel: cross_gain_means must have n_nodes*(n_nodes-1) entries");
  for (double m : p.main_gain_means)
    if (!(m > 0.0)) {
      errs.push_back("channel: main_gain_means entries must be > 0");
      break;
    }
  for (double m : p.cross_gain_means)
    if (!(m > 0.0)) {
      errs.push_back("channel: cross_gain_means entries must be > 0");
      break;
    }
  if (p.estimation_sigma < 0.0)
    errs.push_back("channel: estimation_sigma must be >= 0");
  return errs;
}

ChannelBlockState sample_block(const ChannelParams& params, RandomStream& rng,
                               std::size_t block_index) {
  ChannelBlockState s;
  s.block_index = block_index;
  const std::size_t n = params.n_nodes;
  s.h_main.resize(n);
  s.h_main_est.resize(n);
  s.h_cross.resize(params.cross_gain_means.size());
  for (std::size_t j = 0; j < n; ++j)
    s.h_main[j] = rng.exponential(params.main_gain_means[j]);
  for (std::size_t p = 0; p < s.h_cross.size(); ++p)
    s.h_cross[p] = rng.exponential(params.cross_gain_means[p]);
  for (std::size_t j = 0; j < n; ++j)
    s.h_main_est[j] = s.h_main[j] + rng.normal(params.estimation_sigma);
  return s;
}

double rate(double power, double gain) {
  return std::log1p(power * gain) * kInvLn2;
}

double expected_main_rate(double power, double gain_estimate, double sigma,
                          std::size_t quadrature_order) {
  if (sigma == 0.0) return rate(power, std::max(gain_estimate, 0.0));
  const GaussHermiteRule& rule = gauss_hermite_rule(quadrature_order);
  const double scale = std::sqrt(2.0) * sigma;
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double gain = gain_estimate - scale * rule.nodes[i];
    if (gain > 0.0) acc += rule.weights[i] * std::log1p(power * gain);
  }
  return acc * kInvLn2;
}

double expected_cross_rate(double power, double cross_mean) {
  if (power == 0.0) return 0.0;
  const double x = 1.0 / (power * cross_mean);
  return exp_scaled_e1(x) * kInvLn2;
}

double exp_integral_e1(double x) {
  if (!(x > 0.0)) throw std::domain_error("exp_integral_e1: x must be > 0");
  if (x <= 1.0) return e1_series(x);
  return std::exp(-x) * e1_scaled_cf(x);
}

double exp_scaled_e1(double x) {
  if (!(x > 0.0)) throw std::domain_error("exp_scaled_e1: x must be > 0");
  if (x <= 1.0) return std::exp(x) * e1_series(x);
  return e1_scaled_cf(x);
}

namespace {

// Nodes of the order-n Hermite polynomial by Newton iteration (largest
// roots first, symmetric pair filled from each), weights normalized so
// they sum to 1.
GaussHermiteRule build_gauss_hermite(std::size_t n) {
  GaussHermiteRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const std::size_t m = (n + 1) / 2;
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    // Initial guesses (Numerical Recipes ordering, largest root first).
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Recurrence for orthonormal Hermite functions.
      double p1 = 0.7511255444649424828587;  // pi^{-1/4}
      double p2 = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (k + 1.0)) * p2 -
             std::sqrt(static_cast<double>(k) / (k + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    const double w = 2.0 / (pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  // Normalize: raw weights sum to sqrt(pi).
  double wsum = 0.0;
  for (double w : rule.weights) wsum += w;
  for (double& w : rule.weights) w /= wsum;
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite_rule(std::size_t order) {
  if (order < 2) throw std::invalid_argument("gauss_hermite_rule: order >= 2");
  static std::mutex mu;
  static std::map<std::size_t, GaussHermiteRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end())
    it = cache.emplace(order, build_gauss_hermite(order)).first;
  return it->second;
}

}  // namespace privsim
