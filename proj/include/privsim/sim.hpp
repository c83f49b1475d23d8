#ifndef PRIVSIM_SIM_HPP
#define PRIVSIM_SIM_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "privsim/channel.hpp"
#include "privsim/control.hpp"
#include "privsim/harq.hpp"
#include "privsim/queues.hpp"

namespace privsim {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::vector<std::string>& messages);
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
};

enum class MetricsGranularity { kSummary, kPerBlock };

struct SimConfig {
  ChannelParams channel;
  HarqConfig harq;
  ControlParams control;
  std::size_t n_blocks = 100000;
  std::size_t warmup_blocks = 10000;
  std::uint64_t seed = 1;
  MetricsGranularity metrics = MetricsGranularity::kSummary;
};

// Throws ConfigError listing every violated invariant.
void validate_config(const SimConfig& config);

// Per-node results. Rates are bits per block (one block = one channel-use
// normalized slot). Fluid quantities come from the queue recursions over
// the post-warmup window; packet (empirical) quantities count decode events
// whose completion falls in that window. Totals used by exact accounting
// identities cover the whole run.
struct NodeStats {
  // admitted rates (time averages of the admission decisions)
  double x_private = 0.0;
  double x_open = 0.0;
  double x_private_effective = 0.0;
  // fluid service rates (bits actually drained from the data queues; the
  // effective-private rate is the offered Markov-corrected service)
  double mu_private = 0.0;
  double mu_open = 0.0;
  double mu_private_effective_fluid = 0.0;
  // packet-plane measurements
  double mu_private_effective_empirical = 0.0;
  double empirical_outage_fraction = 0.0;
  double markov_bound_avg = 0.0;
  std::size_t decoded_private_packets = 0;
  std::size_t outaged_private_packets = 0;
  std::size_t decoded_open_packets = 0;
  std::size_t decode_failures = 0;
  double dummy_fraction = 0.0;
  // averages over the measurement window
  double avg_power = 0.0;
  double avg_q_private = 0.0;
  double avg_q_open = 0.0;
  double avg_q_private_effective = 0.0;
  double avg_z = 0.0;
  double avg_y = 0.0;
  double utility_avg = 0.0;
  // whole-run totals and final state, for conservation/telescoping checks
  double admitted_private_total = 0.0;
  double admitted_open_total = 0.0;
  double admitted_private_effective_total = 0.0;
  double drained_private_total = 0.0;
  double drained_open_total = 0.0;
  double power_total = 0.0;
  double final_q_private = 0.0;
  double final_q_open = 0.0;
  double final_q_private_effective = 0.0;
  double final_z = 0.0;
  double final_y = 0.0;
};

struct RunSummary {
  std::vector<NodeStats> node;
  std::size_t n_blocks = 0;
  std::size_t n_blocks_measured = 0;
  // per-node means
  double x_private = 0.0;
  double x_open = 0.0;
  double x_private_effective = 0.0;
  double mu_private = 0.0;
  double mu_open = 0.0;
  double mu_private_effective_fluid = 0.0;
  double mu_private_effective_empirical = 0.0;
  double avg_power = 0.0;
  double avg_q_private = 0.0;
  double avg_q_open = 0.0;
  double avg_q_private_effective = 0.0;
  double avg_z = 0.0;
  double avg_y = 0.0;
  double utility_avg = 0.0;
  // pooled over all private packets decoded in the window
  double empirical_outage_fraction = 0.0;
  double markov_bound_avg = 0.0;
  // summed over nodes
  std::size_t decode_failures = 0;
};

// Per-block trace record, emitted when metrics granularity is per-block.
struct BlockTrace {
  std::size_t block = 0;
  const std::vector<NodeQueues>* queues = nullptr;  // state after updates
  const ControlDecision* decision = nullptr;
};

using BlockTraceFn = std::function<void(const BlockTrace&)>;

// Full simulation state; step_block advances one block in the order:
// sample fading, flow control, scheduling, HARQ accumulation and decode
// bookkeeping, realized service from true gains, queue updates, metrics.
class Simulation {
 public:
  explicit Simulation(const SimConfig& config);

  void step_block();
  RunSummary finalize() const;

  std::size_t current_block() const { return block_; }
  const std::vector<NodeQueues>& queues() const { return queues_; }
  const ControlDecision& last_decision() const { return last_decision_; }
  void set_trace(BlockTraceFn fn) { trace_ = std::move(fn); }

 private:
  struct PacketTallies {
    std::size_t decoded_private = 0;
    std::size_t outaged_private = 0;
    std::size_t decoded_open = 0;
    std::size_t failures = 0;
    double effective_private_bits = 0.0;  // outage-free decoded payload
    double markov_bound_total = 0.0;      // summed over decoded packets
    double payload_bits_total = 0.0;      // all packetized payload
    double dummy_bits_total = 0.0;
  };

  struct Accumulators {
    double x_p = 0, x_o = 0, x_pe = 0;
    double drained_p = 0, drained_o = 0, offered_pe = 0;
    double power = 0;
    double q_p = 0, q_o = 0, q_pe = 0, z = 0, y = 0;
    double utility = 0;
  };

  void serve_packet_plane(const ScheduleChoice& choice,
                          const ChannelBlockState& block);

  SimConfig config_;
  RandomStream rng_;
  SchedulerContext ctx_;
  std::vector<NodeQueues> queues_;
  std::vector<double> pool_private_;  // packet-plane backlogs
  std::vector<double> pool_open_;
  std::vector<std::optional<HarqPacket>> active_private_;
  std::vector<std::optional<HarqPacket>> active_open_;
  std::uint64_t next_packet_id_ = 0;
  std::size_t block_ = 0;
  ControlDecision last_decision_;
  std::vector<BlockService> last_service_;

  // metrics
  std::vector<Accumulators> window_;       // post-warmup sums
  std::vector<PacketTallies> packets_;     // completion in window
  std::vector<Accumulators> totals_;       // whole-run sums
  BlockTraceFn trace_;
};

RunSummary run(const SimConfig& config);
RunSummary run(const SimConfig& config, BlockTraceFn trace);

}  // namespace privsim

#endif  // PRIVSIM_SIM_HPP
