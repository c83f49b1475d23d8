#include "privsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace privsim {

namespace {

std::string join_messages(const std::vector<std::string>& messages) {
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& m : messages) os << "\n  - " << m;
  return os.str();
}

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& messages)
    : std::runtime_error(join_messages(messages)), messages_(messages) {}

void validate_config(const SimConfig& config) {
  std::vector<std::string> errs = validate_channel_params(config.channel);
  auto harq_errs = validate_harq_config(config.harq);
  errs.insert(errs.end(), harq_errs.begin(), harq_errs.end());
  if (config.harq.rates.size() != config.channel.n_nodes)
    errs.push_back("harq: rates must have one entry per node");
  auto ctrl_errs = validate_control_params(config.control, config.channel.n_nodes);
  errs.insert(errs.end(), ctrl_errs.begin(), ctrl_errs.end());
  const bool empty_run = config.n_blocks == 0 && config.warmup_blocks == 0;
  if (!empty_run && config.n_blocks <= config.warmup_blocks)
    errs.push_back("sim: n_blocks must exceed warmup_blocks");
  if (errs.empty() && !config.control.power_grid.empty() &&
      config.harq.rates.size() == config.channel.n_nodes) {
    const double max_power = *std::max_element(config.control.power_grid.begin(),
                                               config.control.power_grid.end());
    auto premise = validate_markov_premise(config.harq, config.channel, max_power);
    errs.insert(errs.end(), premise.begin(), premise.end());
  }
  if (!errs.empty()) throw ConfigError(errs);
}

Simulation::Simulation(const SimConfig& config)
    : config_(config),
      rng_(config.seed),
      ctx_(config.control, config.channel, config.harq.rates),
      queues_(config.channel.n_nodes),
      pool_private_(config.channel.n_nodes, 0.0),
      pool_open_(config.channel.n_nodes, 0.0),
      active_private_(config.channel.n_nodes),
      active_open_(config.channel.n_nodes),
      last_service_(config.channel.n_nodes),
      window_(config.channel.n_nodes),
      packets_(config.channel.n_nodes),
      totals_(config.channel.n_nodes) {
  last_decision_.admissions.resize(config.channel.n_nodes);
}

void Simulation::serve_packet_plane(const ScheduleChoice& choice,
                                    const ChannelBlockState& block) {
  const std::size_t j = choice.node;
  const std::size_t n = config_.channel.n_nodes;
  const CodeRates& cr = config_.harq.rates[j];
  const bool is_private = choice.mode == Traffic::kPrivate;
  auto& slot = is_private ? active_private_[j] : active_open_[j];
  PacketTallies& tally = packets_[j];

  if (!slot.has_value()) {
    const double size = is_private ? cr.private_bits : cr.open_bits;
    double& pool = is_private ? pool_private_[j] : pool_open_[j];
    const double real = std::min(pool, size);
    pool -= real;
    slot = start_packet(j, choice.mode, next_packet_id_++, n, block_);
    slot->real_payload_bits = real;
    tally.payload_bits_total += size;
    tally.dummy_bits_total += size - real;
  }

  HarqPacket& packet = *slot;
  accumulate(packet, choice.power, block);
  if (is_private) {
    packet.markov_bound_sum +=
        markov_bound_increment(ctx_.leak_sum(j, choice.power_index), cr);
    if (!packet.outage_flagged && check_privacy_outage(packet, cr))
      packet.outage_flagged = true;
  }

  if (check_decode(packet, cr)) {
    if (is_private) {
      tally.decoded_private += 1;
      tally.markov_bound_total += packet.markov_bound_sum;
      if (packet.outage_flagged)
        tally.outaged_private += 1;
      else
        tally.effective_private_bits += packet.real_payload_bits;
    } else {
      tally.decoded_open += 1;
    }
    slot.reset();
  } else if (packet.retransmission_count >= config_.harq.max_retransmissions) {
    tally.failures += 1;
    slot.reset();
  }
}

void Simulation::step_block() {
  const std::size_t n = config_.channel.n_nodes;
  const ChannelBlockState block = sample_block(config_.channel, rng_, block_);

  for (std::size_t j = 0; j < n; ++j)
    last_decision_.admissions[j] = flow_control(queues_[j], config_.control, j);
  last_decision_.scheduled = schedule(ctx_, queues_, block);

  std::fill(last_service_.begin(), last_service_.end(), BlockService{});
  if (last_decision_.scheduled.has_value()) {
    const ScheduleChoice& choice = *last_decision_.scheduled;
    serve_packet_plane(choice, block);

    // Realized fluid service from the true gain, as fed back by the base
    // station; the leakage side stays an expectation since realized cross
    // rates are never observed.
    const std::size_t j = choice.node;
    const double r_main = rate(choice.power, block.h_main[j]);
    BlockService& sv = last_service_[j];
    sv.power_used = choice.power;
    if (choice.mode == Traffic::kPrivate) {
      const CodeRates& cr = config_.harq.rates[j];
      sv.r_private = cr.private_fraction() * r_main;
      sv.r_private_effective = std::max(
          effective_rate_markov_from_leak(
              r_main, ctx_.leak_sum(j, choice.power_index), cr),
          0.0);
    } else {
      sv.r_open = r_main;
    }
  }

  const bool in_window = block_ >= config_.warmup_blocks;
  for (std::size_t j = 0; j < n; ++j) {
    const Admission& adm = last_decision_.admissions[j];
    const BlockService& sv = last_service_[j];
    const double drained_p = std::min(queues_[j].q_private, sv.r_private);
    const double drained_o = std::min(queues_[j].q_open, sv.r_open);

    update_data_queues(queues_[j], sv, adm.a_private, adm.a_open);
    update_virtual_queues(queues_[j], sv, adm.a_private,
                          adm.a_private_effective, config_.control.gamma[j],
                          config_.control.alpha[j]);
    pool_private_[j] += adm.a_private;
    pool_open_[j] += adm.a_open;

    Accumulators& tot = totals_[j];
    tot.x_p += adm.a_private;
    tot.x_o += adm.a_open;
    tot.x_pe += adm.a_private_effective;
    tot.drained_p += drained_p;
    tot.drained_o += drained_o;
    tot.power += sv.power_used;

    if (in_window) {
      Accumulators& acc = window_[j];
      acc.x_p += adm.a_private;
      acc.x_o += adm.a_open;
      acc.x_pe += adm.a_private_effective;
      acc.drained_p += drained_p;
      acc.drained_o += drained_o;
      acc.offered_pe += sv.r_private_effective;
      acc.power += sv.power_used;
      acc.q_p += queues_[j].q_private;
      acc.q_o += queues_[j].q_open;
      acc.q_pe += queues_[j].q_private_effective;
      acc.z += queues_[j].z_outage;
      acc.y += queues_[j].y_power;
      acc.utility +=
          config_.control.private_utility_scale *
              admission_utility(adm.a_private_effective) +
          admission_utility(adm.a_private - adm.a_private_effective +
                            adm.a_open);
    }
  }

  if (trace_ && config_.metrics == MetricsGranularity::kPerBlock) {
    BlockTrace t;
    t.block = block_;
    t.queues = &queues_;
    t.decision = &last_decision_;
    trace_(t);
  }
  block_ += 1;
}

RunSummary Simulation::finalize() const {
  const std::size_t n = config_.channel.n_nodes;
  RunSummary s;
  s.node.resize(n);
  s.n_blocks = block_;
  s.n_blocks_measured =
      block_ > config_.warmup_blocks ? block_ - config_.warmup_blocks : 0;
  const double denom =
      s.n_blocks_measured > 0 ? static_cast<double>(s.n_blocks_measured) : 1.0;
  // Packet tallies cover the whole run (lifetimes straddle the warmup cut).
  const double full_denom = block_ > 0 ? static_cast<double>(block_) : 1.0;

  std::size_t pooled_decoded = 0;
  std::size_t pooled_outaged = 0;
  double pooled_bound = 0.0;

  for (std::size_t j = 0; j < n; ++j) {
    NodeStats& ns = s.node[j];
    const Accumulators& acc = window_[j];
    const PacketTallies& pt = packets_[j];
    ns.x_private = acc.x_p / denom;
    ns.x_open = acc.x_o / denom;
    ns.x_private_effective = acc.x_pe / denom;
    ns.mu_private = acc.drained_p / denom;
    ns.mu_open = acc.drained_o / denom;
    ns.mu_private_effective_fluid = acc.offered_pe / denom;
    ns.mu_private_effective_empirical = pt.effective_private_bits / full_denom;
    ns.decoded_private_packets = pt.decoded_private;
    ns.outaged_private_packets = pt.outaged_private;
    ns.decoded_open_packets = pt.decoded_open;
    ns.decode_failures = pt.failures;
    ns.empirical_outage_fraction =
        pt.decoded_private > 0
            ? static_cast<double>(pt.outaged_private) / pt.decoded_private
            : 0.0;
    ns.markov_bound_avg =
        pt.decoded_private > 0 ? pt.markov_bound_total / pt.decoded_private
                               : 0.0;
    ns.dummy_fraction = pt.payload_bits_total > 0.0
                            ? pt.dummy_bits_total / pt.payload_bits_total
                            : 0.0;
    ns.avg_power = acc.power / denom;
    ns.avg_q_private = acc.q_p / denom;
    ns.avg_q_open = acc.q_o / denom;
    ns.avg_q_private_effective = acc.q_pe / denom;
    ns.avg_z = acc.z / denom;
    ns.avg_y = acc.y / denom;
    ns.utility_avg = acc.utility / denom;

    const Accumulators& tot = totals_[j];
    ns.admitted_private_total = tot.x_p;
    ns.admitted_open_total = tot.x_o;
    ns.admitted_private_effective_total = tot.x_pe;
    ns.drained_private_total = tot.drained_p;
    ns.drained_open_total = tot.drained_o;
    ns.power_total = tot.power;
    ns.final_q_private = queues_[j].q_private;
    ns.final_q_open = queues_[j].q_open;
    ns.final_q_private_effective = queues_[j].q_private_effective;
    ns.final_z = queues_[j].z_outage;
    ns.final_y = queues_[j].y_power;

    pooled_decoded += pt.decoded_private;
    pooled_outaged += pt.outaged_private;
    pooled_bound += pt.markov_bound_total;
    s.decode_failures += pt.failures;
  }

  const double n_inv = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  for (const NodeStats& ns : s.node) {
    s.x_private += ns.x_private * n_inv;
    s.x_open += ns.x_open * n_inv;
    s.x_private_effective += ns.x_private_effective * n_inv;
    s.mu_private += ns.mu_private * n_inv;
    s.mu_open += ns.mu_open * n_inv;
    s.mu_private_effective_fluid += ns.mu_private_effective_fluid * n_inv;
    s.mu_private_effective_empirical +=
        ns.mu_private_effective_empirical * n_inv;
    s.avg_power += ns.avg_power * n_inv;
    s.avg_q_private += ns.avg_q_private * n_inv;
    s.avg_q_open += ns.avg_q_open * n_inv;
    s.avg_q_private_effective += ns.avg_q_private_effective * n_inv;
    s.avg_z += ns.avg_z * n_inv;
    s.avg_y += ns.avg_y * n_inv;
    s.utility_avg += ns.utility_avg * n_inv;
  }
  s.empirical_outage_fraction =
      pooled_decoded > 0 ? static_cast<double>(pooled_outaged) / pooled_decoded
                         : 0.0;
  s.markov_bound_avg =
      pooled_decoded > 0 ? pooled_bound / pooled_decoded : 0.0;
  return s;
}

RunSummary run(const SimConfig& config) { return run(config, BlockTraceFn{}); }

RunSummary run(const SimConfig& config, BlockTraceFn trace) {
  validate_config(config);
  Simulation sim(config);
  if (trace) sim.set_trace(std::move(trace));
  for (std::size_t k = 0; k < config.n_blocks; ++k) sim.step_block();
  return sim.finalize();
}

}  // namespace privsim
