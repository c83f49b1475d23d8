#ifndef PRIVSIM_CHANNEL_HPP
#define PRIVSIM_CHANNEL_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "privsim/random.hpp"

namespace privsim {

// Block-fading uplink channel: every node has a main (node -> base station)
// link plus one cross link to each other node over which its transmissions
// are overheard. Gains are noise-normalized power gains, exponentially
// distributed and redrawn independently every block. The transmitter sees a
// noisy estimate of its own main gain and only the mean of each cross gain.

struct ChannelParams {
  std::size_t n_nodes = 0;
  std::vector<double> main_gain_means;   // size n_nodes
  std::vector<double> cross_gain_means;  // size n_nodes*(n_nodes-1), pair order
  double estimation_sigma = 0.0;
  std::uint64_t rng_seed = 0;
};

// Index of ordered pair (from, to), from != to, in the packed cross arrays.
inline std::size_t cross_pair_index(std::size_t from, std::size_t to,
                                    std::size_t n_nodes) {
  return from * (n_nodes - 1) + (to < from ? to : to - 1);
}

struct ChannelBlockState {
  std::vector<double> h_main;      // true main gains, >= 0
  std::vector<double> h_main_est;  // noisy estimates, stored raw (may be < 0)
  std::vector<double> h_cross;     // true cross gains, pair order, >= 0
  std::size_t block_index = 0;
};

// Validates means/sizes; returns one message per violated invariant.
std::vector<std::string> validate_channel_params(const ChannelParams& params);

// Draws one block of fading state. Draw order is mains, crosses, estimate
// noise, so a fixed seed pins the whole sequence bit-for-bit.
ChannelBlockState sample_block(const ChannelParams& params, RandomStream& rng,
                               std::size_t block_index = 0);

// Instantaneous achievable rate log2(1 + power * gain) in bits/channel use.
double rate(double power, double gain);

// E[ log2(1 + power * max(estimate - e, 0)) ], e ~ N(0, sigma^2), by
// Gauss-Hermite quadrature. The truncation keeps the scheduler's belief
// nonnegative when the estimate is poor.
double expected_main_rate(double power, double gain_estimate, double sigma,
                          std::size_t quadrature_order = 32);

// E[ log2(1 + power * h) ] for h ~ Exponential(mean = cross_mean), via the
// closed form (1/ln 2) * exp(1/(P m)) * E1(1/(P m)).
double expected_cross_rate(double power, double cross_mean);

// Exponential integral E1(x) = int_x^inf e^-t / t dt, x > 0.
// Series expansion for x <= 1, continued fraction for x > 1.
// Throws std::domain_error for x <= 0.
double exp_integral_e1(double x);

// exp(x) * E1(x); stays finite for large x where E1 itself underflows.
double exp_scaled_e1(double x);

// Gauss-Hermite rule with weights pre-divided by sqrt(pi), so that
// E[f(e)] = sum_i weight[i] * f(sqrt(2) * sigma * node[i]) for e ~ N(0,s^2).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussHermiteRule& gauss_hermite_rule(std::size_t order);

}  // namespace privsim

#endif  // PRIVSIM_CHANNEL_HPP
