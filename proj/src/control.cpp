#include "privsim/control.hpp"

#include <algorithm>
#include <cmath>

namespace privsim {

namespace {
constexpr double kInvLn2 = 1.4426950408889634074;
}

double admission_utility(double x) { return std::log1p(x) * kInvLn2; }

std::vector<double> make_power_grid(double max_power, std::size_t points) {
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = max_power * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

std::vector<std::string> validate_control_params(const ControlParams& p,
                                                 std::size_t n_nodes) {
  std::vector<std::string> errs;
  if (!(p.penalty_weight > 0.0)) errs.push_back("control: V must be > 0");
  if (!(p.admission_cap > 0.0))
    errs.push_back("control: admission_cap must be > 0");
  if (p.power_grid.empty() ||
      std::find(p.power_grid.begin(), p.power_grid.end(), 0.0) ==
          p.power_grid.end())
    errs.push_back("control: power_grid must be nonempty and include 0");
  if (p.admission_grid_resolution < 2)
    errs.push_back("control: admission_grid_resolution must be >= 2");
  if (p.quadrature_order < 2 || p.quadrature_order > 64)
    errs.push_back("control: quadrature_order must be in [2, 64]");
  if (p.gamma.size() != n_nodes)
    errs.push_back("control: gamma must have one entry per node");
  if (p.alpha.size() != n_nodes)
    errs.push_back("control: alpha must have one entry per node");
  for (double g : p.gamma)
    if (!(g >= 0.0 && g <= 1.0)) {
      errs.push_back("control: gamma entries must lie in [0,1]");
      break;
    }
  for (double a : p.alpha)
    if (!(a > 0.0)) {
      errs.push_back("control: alpha entries must be > 0");
      break;
    }
  return errs;
}

double flow_control_objective(const NodeQueues& q, const ControlParams& params,
                              double gamma, double a_private,
                              double a_private_effective, double a_open) {
  const double open_equivalent = a_private - a_private_effective + a_open;
  double obj = params.penalty_weight *
                   (params.private_utility_scale *
                        admission_utility(a_private_effective) +
                    admission_utility(open_equivalent)) -
               q.q_private * a_private - q.q_open * a_open -
               q.z_outage * (a_private * (1.0 - gamma) - a_private_effective);
  if (!params.flow_control_literal)
    obj -= q.q_private_effective * a_private_effective;
  return obj;
}

namespace {

// Scans a box of admission triples with (res+1) points per axis, keeping
// the best objective under the A_pe <= A_p constraint.
void scan_admission_box(const NodeQueues& q, const ControlParams& params,
                        double gamma, double lo_p, double hi_p, double lo_pe,
                        double hi_pe, double lo_o, double hi_o, Admission& best,
                        double& best_value) {
  const std::size_t res = params.admission_grid_resolution;
  for (std::size_t i = 0; i <= res; ++i) {
    const double a_p = lo_p + (hi_p - lo_p) * static_cast<double>(i) / res;
    for (std::size_t j = 0; j <= res; ++j) {
      const double a_pe = lo_pe + (hi_pe - lo_pe) * static_cast<double>(j) / res;
      if (a_pe > a_p) break;
      for (std::size_t o = 0; o <= res; ++o) {
        const double a_o = lo_o + (hi_o - lo_o) * static_cast<double>(o) / res;
        const double v =
            flow_control_objective(q, params, gamma, a_p, a_pe, a_o);
        if (v > best_value) {
          best_value = v;
          best = {a_p, a_pe, a_o};
        }
      }
    }
  }
}

}  // namespace

Admission flow_control(const NodeQueues& q, const ControlParams& params,
                       std::size_t node) {
  const double gamma = params.gamma[node];
  const double cap = params.admission_cap;
  const std::size_t res = params.admission_grid_resolution;
  const double cell = cap / static_cast<double>(res);

  Admission best;
  double best_value = flow_control_objective(q, params, gamma, 0.0, 0.0, 0.0);

  // Coarse pass on the shared lattice (A_pe <= A_p becomes j <= i), with
  // the two utility terms table-driven since their arguments live on the
  // same lattice.
  std::vector<double> u_single(res + 1), u_combined(2 * res + 1);
  for (std::size_t t = 0; t <= res; ++t)
    u_single[t] = admission_utility(cell * static_cast<double>(t));
  for (std::size_t t = 0; t <= 2 * res; ++t)
    u_combined[t] = admission_utility(cell * static_cast<double>(t));

  const double v = params.penalty_weight;
  const double kappa = params.private_utility_scale;
  const double charge_pe =
      params.flow_control_literal ? 0.0 : q.q_private_effective;
  for (std::size_t i = 0; i <= res; ++i) {
    const double a_p = cell * static_cast<double>(i);
    const double cost_p =
        q.q_private * a_p + q.z_outage * (1.0 - gamma) * a_p;
    for (std::size_t j = 0; j <= i; ++j) {
      const double a_pe = cell * static_cast<double>(j);
      const double part = v * kappa * u_single[j] - cost_p -
                          charge_pe * a_pe + q.z_outage * a_pe;
      for (std::size_t o = 0; o <= res; ++o) {
        const double a_o = cell * static_cast<double>(o);
        const double value =
            part + v * u_combined[i - j + o] - q.q_open * a_o;
        if (value > best_value) {
          best_value = value;
          best = {a_p, a_pe, a_o};
        }
      }
    }
  }

  // One refinement pass over the +/- one-cell box around the coarse best.
  const auto clamp01 = [cap](double x) { return std::clamp(x, 0.0, cap); };
  scan_admission_box(q, params, gamma, clamp01(best.a_private - cell),
                     clamp01(best.a_private + cell),
                     clamp01(best.a_private_effective - cell),
                     clamp01(best.a_private_effective + cell),
                     clamp01(best.a_open - cell), clamp01(best.a_open + cell),
                     best, best_value);
  return best;
}

double evaluate_weight(Traffic mode, const NodeQueues& q,
                       const ExpectedRates& rates, double power) {
  if (mode == Traffic::kPrivate) {
    return q.q_private_effective * std::max(rates.r_private_effective, 0.0) +
           q.q_private * rates.r_private - q.y_power * power;
  }
  return q.q_open * rates.r_open - q.y_power * power;
}

SchedulerContext::SchedulerContext(const ControlParams& control,
                                   const ChannelParams& channel,
                                   const std::vector<CodeRates>& rates)
    : power_grid_(control.power_grid),
      rates_(rates),
      sigma_(channel.estimation_sigma),
      order_(control.quadrature_order) {
  gauss_hermite_rule(order_);  // build the cached rule up front
  const std::size_t n = channel.n_nodes;
  leak_sums_.assign(n * power_grid_.size(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t p = 0; p < power_grid_.size(); ++p) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == j) continue;
        sum += expected_cross_rate(
            power_grid_[p], channel.cross_gain_means[cross_pair_index(j, i, n)]);
      }
      leak_sums_[j * power_grid_.size() + p] = sum;
    }
  }
}

void SchedulerContext::expected_main_rates(double gain_estimate,
                                           std::vector<double>& out) const {
  if (sigma_ == 0.0) {
    const double g = std::max(gain_estimate, 0.0);
    for (std::size_t p = 0; p < power_grid_.size(); ++p)
      out[p] = rate(power_grid_[p], g);
    return;
  }
  const GaussHermiteRule& rule = gauss_hermite_rule(order_);
  const double scale = std::sqrt(2.0) * sigma_;
  // Truncated effective gains at the quadrature nodes, shared by all powers.
  double gains[64];
  double weights[64];
  std::size_t m = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double g = gain_estimate - scale * rule.nodes[i];
    if (g > 0.0) {
      gains[m] = g;
      weights[m] = rule.weights[i];
      ++m;
    }
  }
  for (std::size_t p = 0; p < power_grid_.size(); ++p) {
    const double power = power_grid_[p];
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      acc += weights[i] * std::log1p(power * gains[i]);
    out[p] = acc * kInvLn2;
  }
}

std::optional<ScheduleChoice> schedule(const SchedulerContext& ctx,
                                       const std::vector<NodeQueues>& queues,
                                       const ChannelBlockState& block) {
  const std::vector<double>& grid = ctx.power_grid();
  std::optional<ScheduleChoice> best;
  double best_weight = 0.0;
  std::vector<double> main_rates(grid.size());
  // Tie-break order is (node, mode, power) lexicographic: candidates are
  // visited in exactly that order and replaced only on strict improvement.
  for (std::size_t j = 0; j < queues.size(); ++j) {
    ctx.expected_main_rates(block.h_main_est[j], main_rates);
    const CodeRates& cr = ctx.rates(j);
    for (Traffic mode : {Traffic::kPrivate, Traffic::kOpen}) {
      for (std::size_t p = 0; p < grid.size(); ++p) {
        ExpectedRates er;
        er.r_open = main_rates[p];
        er.r_private = cr.private_fraction() * main_rates[p];
        er.r_private_effective = effective_rate_markov_from_leak(
            main_rates[p], ctx.leak_sum(j, p), cr);
        const double w = evaluate_weight(mode, queues[j], er, grid[p]);
        if (w > best_weight) {
          best_weight = w;
          best = ScheduleChoice{j, mode, grid[p], p};
        }
      }
    }
  }
  return best;
}

std::optional<ScheduleChoice> schedule(const std::vector<NodeQueues>& queues,
                                       const ChannelBlockState& block,
                                       const ControlParams& params,
                                       const ChannelParams& channel,
                                       const std::vector<CodeRates>& rates) {
  SchedulerContext ctx(params, channel, rates);
  return schedule(ctx, queues, block);
}

}  // namespace privsim
