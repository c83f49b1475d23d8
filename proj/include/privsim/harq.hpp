#ifndef PRIVSIM_HARQ_HPP
#define PRIVSIM_HARQ_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "privsim/channel.hpp"

namespace privsim {

enum class Traffic { kPrivate, kOpen };

// Per-node code rates of the incremental-redundancy scheme. A private
// packet carries private_bits of payload inside codeword_bits of coded
// data; the secrecy margin codeword_bits - private_bits is what an
// overhearing node must accumulate before the payload leaks. Open packets
// are plain mother-code packets of open_bits.
struct CodeRates {
  double codeword_bits = 0.0;  // total codeword rate per packet
  double private_bits = 0.0;   // private payload per packet
  double open_bits = 0.0;      // open packet size

  double secrecy_margin() const { return codeword_bits - private_bits; }
  double private_fraction() const { return private_bits / codeword_bits; }

  bool operator==(const CodeRates&) const = default;
};

struct HarqConfig {
  std::size_t max_retransmissions = 50;
  std::vector<CodeRates> rates;  // one entry per node
};

// One in-flight packet. Mutual information accumulates at the base station
// (acc_main) and, for private packets, at every other node (acc_eaves);
// decoding and privacy outage are threshold crossings on these counters.
struct HarqPacket {
  std::size_t owner = 0;
  Traffic kind = Traffic::kPrivate;
  std::uint64_t packet_id = 0;
  double acc_main = 0.0;
  std::vector<double> acc_eaves;  // indexed by node id; entry [owner] unused
  std::size_t start_block = 0;
  std::size_t retransmission_count = 0;

  // Bookkeeping for metrics, not part of the decode rules.
  double real_payload_bits = 0.0;   // payload bits taken from the queue
  double markov_bound_sum = 0.0;    // accumulated per-block outage bound
  bool outage_flagged = false;      // first leak-threshold crossing seen
};

HarqPacket start_packet(std::size_t owner, Traffic kind, std::uint64_t id,
                        std::size_t n_nodes, std::size_t block_index);

// One transmission of the packet over the given block: the base station
// adds rate(power, h_main[owner]); for private packets every other node
// adds rate(power, h_cross[owner -> i]). Open traffic is not tracked at
// the eavesdroppers.
void accumulate(HarqPacket& packet, double power, const ChannelBlockState& block);

// Decoded once accumulated information strictly exceeds the packet's rate
// threshold (codeword_bits for private traffic, open_bits for open).
bool check_decode(const HarqPacket& packet, const CodeRates& rates);

// Privacy outage: the best eavesdropper strictly exceeds the secrecy
// margin. Assessed cumulatively over the packet's life.
bool check_privacy_outage(const HarqPacket& packet, const CodeRates& rates);

// Markov-corrected effective private rate for one block:
//   (private_bits/codeword_bits) * r_main
//     - (private_bits/secrecy_margin) * expected_leak_sum,
// where expected_leak_sum = sum over eavesdroppers of the expected cross
// rate at this power. May be negative; callers clamp where needed.
double effective_rate_markov_from_leak(double r_main, double expected_leak_sum,
                                       const CodeRates& rates);

// Same, computing the expected leak sum from the cross-gain means of the
// owner (entries for pairs owner -> i).
double effective_rate_markov(double r_main, double power,
                             const std::vector<double>& owner_cross_means,
                             const CodeRates& rates);

// Per-block increment of the Markov outage bound for a private packet:
// expected_leak_sum / secrecy_margin.
double markov_bound_increment(double expected_leak_sum, const CodeRates& rates);

std::vector<std::string> validate_harq_config(const HarqConfig& config);

// The Markov correction is only meaningful if the per-block expected
// leakage at the largest usable power stays below the secrecy margin;
// violations are reported per node.
std::vector<std::string> validate_markov_premise(
    const HarqConfig& config, const ChannelParams& channel, double max_power);

}  // namespace privsim

#endif  // PRIVSIM_HARQ_HPP
