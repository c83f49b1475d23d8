#ifndef PRIVSIM_SWEEP_HPP
#define PRIVSIM_SWEEP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "privsim/config.hpp"
#include "privsim/sim.hpp"

namespace privsim {

// One CSV row. Run rows carry the realization index and the actual seed
// used; per-point aggregate rows (mean over the point's runs) use -1 for
// both.
struct SweepRow {
  double axis_value = 0.0;
  long long realization = 0;
  long long seed = 0;
  double private_rate = 0.0;
  double open_rate = 0.0;
  double effective_private_rate = 0.0;
  double empirical_outage = 0.0;
  double markov_bound = 0.0;
  double avg_power = 0.0;
  double avg_q_private = 0.0;
  double avg_q_open = 0.0;
  double utility = 0.0;
  double decode_failures = 0.0;
};

extern const char* const kCsvHeader;

SweepRow summary_to_row(const RunSummary& summary, double axis_value,
                        long long realization, long long seed);

// Runs every (axis value, realization, seed) combination and appends one
// aggregate row per axis value. Points execute on a worker pool sized by
// the PRIVSIM_WORKERS environment variable (default: hardware threads);
// row order and content do not depend on the worker count.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

// Writes rows with the fixed header; refuses empty input, reports IO
// failures with the path. Values are printed to 12 significant digits.
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);
std::string csv_to_string(const std::vector<SweepRow>& rows);

std::vector<SweepRow> read_csv(const std::string& path);

// Static SVG of rate vs axis value with one polyline per rate series
// (private, open, effective private), drawn from the aggregate rows (or
// all rows when no aggregates are present).
void emit_plot(const std::vector<SweepRow>& rows, const std::string& path);
std::string plot_to_string(const std::vector<SweepRow>& rows);

}  // namespace privsim

#endif  // PRIVSIM_SWEEP_HPP
