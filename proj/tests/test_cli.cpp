#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "privsim/config.hpp"
#include "privsim/sweep.hpp"

using namespace privsim;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("/tmp/privsim_test_") + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

std::size_t count_substr(const std::string& hay, const std::string& needle) {
  std::size_t count = 0, pos = 0;
  while ((pos = hay.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

}  // namespace

TEST_CASE("parse_config: empty object yields the full default config") {
  const auto parsed = parse_config_text("{}");
  REQUIRE(std::holds_alternative<SimConfig>(parsed));
  const SimConfig cfg = std::get<SimConfig>(parsed);
  CHECK(cfg.channel.n_nodes == 4);
  CHECK(cfg.channel.estimation_sigma == 1.0);
  CHECK(cfg.channel.main_gain_means.front() == 25.0);
  CHECK(cfg.channel.main_gain_means.back() == 50.0);
  CHECK(cfg.channel.cross_gain_means.size() == 12);
  CHECK(cfg.channel.cross_gain_means.front() == 0.5);
  CHECK(cfg.channel.cross_gain_means.back() == 1.5);
  CHECK(cfg.control.private_utility_scale == 5.0);
  CHECK(cfg.control.power_grid.size() == 64);
  CHECK(cfg.control.power_grid.back() == 10.0);
  CHECK(cfg.harq.rates[0].codeword_bits == 20.0);
  CHECK(cfg.harq.rates[0].private_bits == 7.5);
  CHECK(cfg.n_blocks == 100000);
  CHECK(cfg.warmup_blocks == 10000);
  CHECK(emit_config(cfg) == emit_config(default_config()));
}

TEST_CASE("parse_config: out-of-range gamma is a validation error") {
  try {
    parse_config_text(R"({"gamma": 1.5})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("gamma") != std::string::npos);
  }
}

TEST_CASE("parse_config: unknown keys are rejected") {
  try {
    parse_config_text(R"({"gama": 0.2})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("unknown key 'gama'") != std::string::npos);
  }
}

TEST_CASE("parse_config: malformed JSON reports a parse diagnostic") {
  CHECK_THROWS_AS(parse_config_text("{\"gamma\": "), ConfigError);
}

TEST_CASE("parse_config: validation failures are aggregated") {
  try {
    parse_config_text(R"({"gamma": -0.5, "alpha": 0, "V": -3})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.messages().size() >= 3);
  }
}

TEST_CASE("parse_config: emitted defaults re-parse to an identical config") {
  const std::string text = emit_config(default_config());
  const auto parsed = parse_config_text(text);
  REQUIRE(std::holds_alternative<SimConfig>(parsed));
  CHECK(emit_config(std::get<SimConfig>(parsed)) == text);
}

TEST_CASE("parse_config: sweep round-trip preserves the spec") {
  SweepSpec spec;
  spec.base = default_config();
  spec.axis = SweepAxis::kAlpha;
  spec.values = {0.25, 0.5, 1.0};
  spec.seeds_per_point = 2;
  spec.realizations_per_point = 3;
  spec.rate_seed = 77;
  const std::string text = emit_config(spec);
  const auto parsed = parse_config_text(text);
  REQUIRE(std::holds_alternative<SweepSpec>(parsed));
  CHECK(emit_config(std::get<SweepSpec>(parsed)) == text);
}

TEST_CASE("parse_config: scalar per-node fields broadcast") {
  const auto parsed =
      parse_config_text(R"({"gamma": 0.25, "main_gain_means": 30})");
  const SimConfig cfg = std::get<SimConfig>(parsed);
  for (double g : cfg.control.gamma) CHECK(g == 0.25);
  for (double m : cfg.channel.main_gain_means) CHECK(m == 30.0);
}

TEST_CASE("parse_config: sweep values must increase") {
  CHECK_THROWS_AS(
      parse_config_text(R"({"sweep": {"axis": "gamma", "values": [0.3, 0.1]}})"),
      ConfigError);
}

TEST_CASE("realization_rates: draws stay inside the documented intervals") {
  const SimConfig base = default_config();
  CHECK(realization_rates(base, 7, 0) == base.harq.rates);
  for (std::size_t r = 1; r < 6; ++r) {
    const auto rates = realization_rates(base, 7, r);
    for (const CodeRates& cr : rates) {
      CHECK(cr.codeword_bits >= 15.0);
      CHECK(cr.codeword_bits <= 25.0);
      CHECK(cr.open_bits >= 15.0);
      CHECK(cr.open_bits <= 25.0);
      CHECK(cr.private_bits >= 5.0);
      CHECK(cr.private_bits <= 10.0);
    }
  }
}

TEST_CASE("csv: golden header stays stable") {
  CHECK(std::string(kCsvHeader) ==
        "axis_value,realization,seed,private_rate,open_rate,"
        "effective_private_rate,empirical_outage,markov_bound,avg_power,"
        "avg_Qp,avg_Qo,utility,decode_failures");
}

TEST_CASE("csv: zero rows is an error and writes nothing") {
  const std::string path = temp_path("empty.csv");
  std::remove(path.c_str());
  CHECK_THROWS(emit_csv({}, path));
  std::ifstream probe(path);
  CHECK_FALSE(probe.good());
}

TEST_CASE("csv: round-trip preserves values to 12 significant digits") {
  std::vector<SweepRow> rows;
  SweepRow r;
  r.axis_value = 0.30000000000001;
  r.realization = 3;
  r.seed = 123456789012345LL;
  r.private_rate = 0.123456789012345;
  r.open_rate = 1.0 / 3.0;
  r.effective_private_rate = 2.718281828459045;
  r.empirical_outage = 0.177;
  r.markov_bound = 0.22;
  r.avg_power = 0.99999999;
  r.avg_q_private = 1234.56789;
  r.avg_q_open = 9.87654321e-5;
  r.utility = -3.14159265358979;
  r.decode_failures = 7;
  rows.push_back(r);
  const std::string path = temp_path("roundtrip.csv");
  emit_csv(rows, path);
  const auto back = read_csv(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].axis_value == doctest::Approx(r.axis_value).epsilon(1e-12));
  CHECK(back[0].realization == r.realization);
  CHECK(back[0].seed == r.seed);
  CHECK(back[0].private_rate ==
        doctest::Approx(r.private_rate).epsilon(1e-12));
  CHECK(back[0].open_rate == doctest::Approx(r.open_rate).epsilon(1e-12));
  CHECK(back[0].effective_private_rate ==
        doctest::Approx(r.effective_private_rate).epsilon(1e-12));
  CHECK(back[0].avg_q_open == doctest::Approx(r.avg_q_open).epsilon(1e-12));
  CHECK(back[0].utility == doctest::Approx(r.utility).epsilon(1e-12));
  CHECK(back[0].decode_failures == 7.0);
}

TEST_CASE("sweep: single value and seed matches a direct run") {
  SweepSpec spec;
  spec.base = default_config();
  spec.base.n_blocks = 2000;
  spec.base.warmup_blocks = 200;
  spec.axis = SweepAxis::kGamma;
  spec.values = {0.1};
  const auto rows = run_sweep(spec);
  REQUIRE(rows.size() == 2);  // one run + one aggregate

  const RunSummary direct = run(spec.base);
  CHECK(rows[0].private_rate == direct.mu_private);
  CHECK(rows[0].open_rate == direct.mu_open);
  CHECK(rows[0].utility == direct.utility_avg);
  CHECK(rows[0].seed == static_cast<long long>(spec.base.seed));
  // aggregate of one run equals the run
  CHECK(rows[1].private_rate == doctest::Approx(rows[0].private_rate));
}

TEST_CASE("sweep: row layout and worker-count invariance") {
  SweepSpec spec;
  spec.base = default_config();
  spec.base.n_blocks = 1500;
  spec.base.warmup_blocks = 150;
  spec.axis = SweepAxis::kGamma;
  spec.values = {0.1, 0.3};
  spec.realizations_per_point = 2;
  spec.seeds_per_point = 2;

  setenv("PRIVSIM_WORKERS", "1", 1);
  const auto serial = run_sweep(spec);
  setenv("PRIVSIM_WORKERS", "4", 1);
  const auto parallel = run_sweep(spec);
  unsetenv("PRIVSIM_WORKERS");

  REQUIRE(serial.size() == 10);  // (2 values) x (4 runs + 1 aggregate)
  REQUIRE(parallel.size() == serial.size());
  CHECK(csv_to_string(serial) == csv_to_string(parallel));
  // run rows precede their aggregate, ordered by axis value
  CHECK(serial[0].axis_value == 0.1);
  CHECK(serial[4].realization == -1);
  CHECK(serial[9].realization == -1);
  CHECK(serial[9].axis_value == 0.3);
}

TEST_CASE("plot: a gamma sweep renders exactly three series") {
  std::vector<SweepRow> rows;
  for (int i = 0; i < 6; ++i) {
    SweepRow agg;
    agg.axis_value = 0.05 * (i + 1);
    agg.realization = -1;
    agg.seed = -1;
    agg.private_rate = 0.1 + 0.02 * i;
    agg.open_rate = 0.9 - 0.01 * i;
    agg.effective_private_rate = 0.08 + 0.015 * i;
    rows.push_back(agg);
  }
  const std::string path = temp_path("plot.svg");
  emit_plot(rows, path);
  const std::string svg = slurp(path);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count_substr(svg, "<polyline") == 3);
  CHECK(svg.find("effective private") != std::string::npos);
}

TEST_CASE("plot: zero rows is an error") {
  CHECK_THROWS(plot_to_string({}));
}
