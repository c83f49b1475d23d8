#ifndef PRIVSIM_CONTROL_HPP
#define PRIVSIM_CONTROL_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "privsim/channel.hpp"
#include "privsim/harq.hpp"
#include "privsim/queues.hpp"

namespace privsim {

struct ControlParams {
  double penalty_weight = 50.0;         // V
  double private_utility_scale = 5.0;   // utility of private vs open traffic
  double admission_cap = 5.0;           // per-block cap on each admission
  std::vector<double> power_grid;       // candidate powers, must include 0
  std::size_t admission_grid_resolution = 8;
  std::vector<double> gamma;            // per-node outage tolerance, in [0,1]
  std::vector<double> alpha;            // per-node average power budget
  bool flow_control_literal = false;    // drop the Qpe admission charge
  std::size_t quadrature_order = 32;
};

std::vector<double> make_power_grid(double max_power, std::size_t points);

std::vector<std::string> validate_control_params(const ControlParams& params,
                                                 std::size_t n_nodes);

// Admission decision of one node for one block.
struct Admission {
  double a_private = 0.0;
  double a_private_effective = 0.0;
  double a_open = 0.0;
};

struct ScheduleChoice {
  std::size_t node = 0;
  Traffic mode = Traffic::kPrivate;
  double power = 0.0;
  std::size_t power_index = 0;
};

struct ControlDecision {
  std::vector<Admission> admissions;
  std::optional<ScheduleChoice> scheduled;
};

// Utility of admitting x bits: log2(1 + x).
double admission_utility(double x);

// The per-node flow-control objective maximized each block:
//   V * [kappa * u(A_pe) + u(A_p - A_pe + A_o)]
//     - Qp*A_p - Qo*A_o - Qpe*A_pe - Z*((1-gamma)*A_p - A_pe)
// subject to 0 <= A_pe <= A_p and all three within [0, cap].
// flow_control_literal drops the Qpe*A_pe charge.
double flow_control_objective(const NodeQueues& q, const ControlParams& params,
                              double gamma, double a_private,
                              double a_private_effective, double a_open);

// Maximizes the objective by a coarse lattice pass followed by one
// refinement pass around the best coarse cell.
Admission flow_control(const NodeQueues& q, const ControlParams& params,
                       std::size_t node);

// Expected service rates of one (node, power) candidate, as seen by the
// scheduler: main-channel expectation over the estimation error, cross
// leakage from the gain distributions.
struct ExpectedRates {
  double r_private = 0.0;            // private payload fraction of the main rate
  double r_private_effective = 0.0;  // Markov-corrected; may be negative
  double r_open = 0.0;               // full main rate
};

// Scheduler weight of transmitting with the given mode and power. The
// effective-private term is clamped at zero so a candidate is never
// rewarded for negative effective rate.
double evaluate_weight(Traffic mode, const NodeQueues& q,
                       const ExpectedRates& rates, double power);

// Precomputed per-run scheduler tables: quadrature rule, per-(node, power)
// expected eavesdropper leakage, code-rate fractions.
class SchedulerContext {
 public:
  SchedulerContext(const ControlParams& control, const ChannelParams& channel,
                   const std::vector<CodeRates>& rates);

  const std::vector<double>& power_grid() const { return power_grid_; }
  double leak_sum(std::size_t node, std::size_t power_index) const {
    return leak_sums_[node * power_grid_.size() + power_index];
  }
  const CodeRates& rates(std::size_t node) const { return rates_[node]; }
  double estimation_sigma() const { return sigma_; }
  std::size_t quadrature_order() const { return order_; }

  // Expected main rate for every grid power of one node, given the block's
  // gain estimate; out must have power_grid().size() entries.
  void expected_main_rates(double gain_estimate, std::vector<double>& out) const;

 private:
  std::vector<double> power_grid_;
  std::vector<double> leak_sums_;
  std::vector<CodeRates> rates_;
  double sigma_ = 0.0;
  std::size_t order_ = 32;
};

// Picks the (node, mode, power) triple with the largest weight, breaking
// ties toward the lowest node index, private before open, and the lowest
// power. Returns nullopt when no candidate has positive weight.
std::optional<ScheduleChoice> schedule(const SchedulerContext& ctx,
                                       const std::vector<NodeQueues>& queues,
                                       const ChannelBlockState& block);

// Convenience overload building the context on the fly.
std::optional<ScheduleChoice> schedule(const std::vector<NodeQueues>& queues,
                                       const ChannelBlockState& block,
                                       const ControlParams& params,
                                       const ChannelParams& channel,
                                       const std::vector<CodeRates>& rates);

}  // namespace privsim

#endif  // PRIVSIM_CONTROL_HPP
