#include "privsim/harq.hpp"

#include <algorithm>
#include <cmath>

namespace privsim {

HarqPacket start_packet(std::size_t owner, Traffic kind, std::uint64_t id,
                        std::size_t n_nodes, std::size_t block_index) {
  HarqPacket p;
  p.owner = owner;
  p.kind = kind;
  p.packet_id = id;
  p.start_block = block_index;
  if (kind == Traffic::kPrivate) p.acc_eaves.assign(n_nodes, 0.0);
  return p;
}

void accumulate(HarqPacket& packet, double power,
                const ChannelBlockState& block) {
  packet.acc_main += rate(power, block.h_main[packet.owner]);
  if (packet.kind == Traffic::kPrivate) {
    const std::size_t n = block.h_main.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (i == packet.owner) continue;
      packet.acc_eaves[i] +=
          rate(power, block.h_cross[cross_pair_index(packet.owner, i, n)]);
    }
  }
  packet.retransmission_count += 1;
}

bool check_decode(const HarqPacket& packet, const CodeRates& rates) {
  const double threshold =
      packet.kind == Traffic::kPrivate ? rates.codeword_bits : rates.open_bits;
  return packet.acc_main > threshold;
}

bool check_privacy_outage(const HarqPacket& packet, const CodeRates& rates) {
  double worst = 0.0;
  for (std::size_t i = 0; i < packet.acc_eaves.size(); ++i) {
    if (i == packet.owner) continue;
    worst = std::max(worst, packet.acc_eaves[i]);
  }
  return worst > rates.secrecy_margin();
}

double effective_rate_markov_from_leak(double r_main, double expected_leak_sum,
                                       const CodeRates& rates) {
  const double r_private = rates.private_fraction() * r_main;
  return r_private -
         (rates.private_bits / rates.secrecy_margin()) * expected_leak_sum;
}

double effective_rate_markov(double r_main, double power,
                             const std::vector<double>& owner_cross_means,
                             const CodeRates& rates) {
  double leak = 0.0;
  for (double m : owner_cross_means) leak += expected_cross_rate(power, m);
  return effective_rate_markov_from_leak(r_main, leak, rates);
}

double markov_bound_increment(double expected_leak_sum,
                              const CodeRates& rates) {
  return expected_leak_sum / rates.secrecy_margin();
}

std::vector<std::string> validate_harq_config(const HarqConfig& config) {
  std::vector<std::string> errs;
  if (config.max_retransmissions < 1)
    errs.push_back("harq: max_retransmissions must be >= 1");
  for (std::size_t j = 0; j < config.rates.size(); ++j) {
    const CodeRates& r = config.rates[j];
    if (!(r.private_bits > 0.0 && r.private_bits < r.codeword_bits))
      errs.push_back("harq: node " + std::to_string(j) +
                     ": need 0 < private_bits < codeword_bits");
    if (!(r.open_bits > 0.0))
      errs.push_back("harq: node " + std::to_string(j) +
                     ": open_bits must be > 0");
  }
  return errs;
}

std::vector<std::string> validate_markov_premise(const HarqConfig& config,
                                                 const ChannelParams& channel,
                                                 double max_power) {
  std::vector<std::string> errs;
  const std::size_t n = channel.n_nodes;
  if (config.rates.size() != n) return errs;  // size mismatch reported elsewhere
  for (std::size_t j = 0; j < n; ++j) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      worst = std::max(worst,
                       expected_cross_rate(
                           max_power,
                           channel.cross_gain_means[cross_pair_index(j, i, n)]));
    }
    if (!(worst < config.rates[j].secrecy_margin()))
      errs.push_back(
          "harq: node " + std::to_string(j) +
          ": expected per-block eavesdropper rate at max power (" +
          std::to_string(worst) + ") reaches the secrecy margin (" +
          std::to_string(config.rates[j].secrecy_margin()) +
          "); pick a larger codeword/private rate gap");
  }
  return errs;
}

}  // namespace privsim
