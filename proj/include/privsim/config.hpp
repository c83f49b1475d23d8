#ifndef PRIVSIM_CONFIG_HPP
#define PRIVSIM_CONFIG_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "privsim/sim.hpp"

namespace privsim {

enum class SweepAxis { kGamma, kAlpha, kV };

const char* sweep_axis_name(SweepAxis axis);

// A parameter sweep: the base config is re-run for every axis value,
// code-rate realization, and seed index. Realization 0 / seed index 0
// reuse the base config's own rates and seed, so a single-value,
// single-seed sweep reproduces a direct run.
struct SweepSpec {
  SimConfig base;
  SweepAxis axis = SweepAxis::kGamma;
  std::vector<double> values;
  std::size_t seeds_per_point = 1;
  std::size_t realizations_per_point = 1;
  std::uint64_t rate_seed = 9001;
};

using ParsedConfig = std::variant<SimConfig, SweepSpec>;

// Baseline configuration: four nodes, unit-variance estimation noise,
// log-utilities with a 5x private preference, 64-point power grid up to
// P = 10, and code rates at the midpoints of their usual draw ranges.
SimConfig default_config();

// Parses a JSON config file. Every field is optional and defaults to the
// baseline; unknown keys are rejected; all validation failures are
// reported together. Returns a SweepSpec when a "sweep" section is present.
ParsedConfig parse_config(const std::string& path);
ParsedConfig parse_config_text(const std::string& text,
                               const std::string& origin = "<string>");

// Canonical JSON for a config (always arrays for per-node fields, all keys
// present); parsing it back yields an identical config.
std::string emit_config(const SimConfig& config);
std::string emit_config(const SweepSpec& spec);

// Applies one axis value to a copy of the base config.
SimConfig apply_axis(const SimConfig& base, SweepAxis axis, double value);

// Code rates for realization r (r = 0 keeps the base rates; r >= 1 draws
// codeword/open sizes from U[15,25] and private payloads from U[5,10]).
std::vector<CodeRates> realization_rates(const SimConfig& base,
                                         std::uint64_t rate_seed,
                                         std::size_t realization);

// Seed for (realization, seed index); (0, 0) is the base seed.
std::uint64_t realization_seed(std::uint64_t base_seed, std::size_t realization,
                               std::size_t seed_index);

}  // namespace privsim

#endif  // PRIVSIM_CONFIG_HPP
