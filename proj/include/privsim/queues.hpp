#ifndef PRIVSIM_QUEUES_HPP
#define PRIVSIM_QUEUES_HPP

namespace privsim {

// Per-node queue state. q_private / q_open are data backlogs in bits.
// The other three are virtual queues whose stability enforces the
// time-average constraints: q_private_effective tracks intended-private
// bits not yet covered by effective-private service, z_outage tracks the
// outage-ratio constraint, and y_power tracks the average-power budget.
struct NodeQueues {
  double q_private = 0.0;
  double q_open = 0.0;
  double q_private_effective = 0.0;
  double z_outage = 0.0;
  double y_power = 0.0;
};

// Realized service of one block for one node. At most one of the private
// pair (r_private, r_private_effective) and r_open is nonzero, because a
// single node transmits a single traffic class per block.
struct BlockService {
  double r_private = 0.0;
  double r_open = 0.0;
  double r_private_effective = 0.0;
  double power_used = 0.0;
};

inline double pos(double x) { return x > 0.0 ? x : 0.0; }

// Data backlogs: Q <- [Q - service]^+ + arrivals.
inline void update_data_queues(NodeQueues& q, const BlockService& service,
                               double arrivals_private, double arrivals_open) {
  q.q_private = pos(q.q_private - service.r_private) + arrivals_private;
  q.q_open = pos(q.q_open - service.r_open) + arrivals_open;
}

// Virtual queues:
//   Qpe <- [Qpe - r_pe]^+ + A_pe
//   Z   <- [Z - A_pe + A_p(1-gamma)]^+
//   Y   <- [Y + power - alpha]^+
inline void update_virtual_queues(NodeQueues& q, const BlockService& service,
                                  double arrivals_private,
                                  double arrivals_private_effective,
                                  double gamma, double alpha) {
  q.q_private_effective =
      pos(q.q_private_effective - service.r_private_effective) +
      arrivals_private_effective;
  q.z_outage = pos(q.z_outage - arrivals_private_effective +
                   arrivals_private * (1.0 - gamma));
  q.y_power = pos(q.y_power + service.power_used - alpha);
}

}  // namespace privsim

#endif  // PRIVSIM_QUEUES_HPP
