#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>

#include "CLI11.hpp"
#include "privsim/config.hpp"
#include "privsim/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Overrides {
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::size_t blocks = 0;
  bool has_blocks = false;
};

void apply_overrides(privsim::SimConfig& cfg, const Overrides& ov) {
  if (ov.has_seed) {
    cfg.seed = ov.seed;
    cfg.channel.rng_seed = ov.seed;
  }
  if (ov.has_blocks) {
    cfg.n_blocks = ov.blocks;
    cfg.warmup_blocks = ov.blocks / 10;
  }
}

void print_summary(const privsim::RunSummary& s) {
  std::printf("blocks: %zu (measured %zu)\n", s.n_blocks, s.n_blocks_measured);
  std::printf("per-node averages (bits/block):\n");
  std::printf("  admitted   private %.4f  open %.4f  effective-private %.4f\n",
              s.x_private, s.x_open, s.x_private_effective);
  std::printf("  served     private %.4f  open %.4f  effective-private %.4f\n",
              s.mu_private, s.mu_open, s.mu_private_effective_fluid);
  std::printf("  decoded effective-private (packet plane): %.4f\n",
              s.mu_private_effective_empirical);
  std::printf("outage: empirical %.4f  markov bound %.4f\n",
              s.empirical_outage_fraction, s.markov_bound_avg);
  std::printf("avg power %.4f  utility %.4f  decode failures %zu\n",
              s.avg_power, s.utility_avg, s.decode_failures);
  std::printf("avg queues: Qp %.2f  Qo %.2f  Qpe %.2f  Z %.2f  Y %.2f\n",
              s.avg_q_private, s.avg_q_open, s.avg_q_private_effective,
              s.avg_z, s.avg_y);
}

int cmd_run(const std::string& config_path, const Overrides& ov,
            const std::string& out_path, const std::string& trace_path) {
  auto parsed = privsim::parse_config(config_path);
  if (std::holds_alternative<privsim::SweepSpec>(parsed)) {
    std::cerr << "config contains a sweep section; use the sweep command\n";
    return kExitValidation;
  }
  privsim::SimConfig cfg = std::get<privsim::SimConfig>(parsed);
  apply_overrides(cfg, ov);
  privsim::validate_config(cfg);

  std::ofstream trace_out;
  privsim::BlockTraceFn trace_fn;
  if (!trace_path.empty()) {
    cfg.metrics = privsim::MetricsGranularity::kPerBlock;
    trace_out.open(trace_path, std::ios::binary);
    if (!trace_out) throw std::runtime_error("cannot open " + trace_path);
    trace_out << "block,node,Qp,Qo,Qpe,Z,Y,scheduled,mode,power\n";
    trace_fn = [&trace_out](const privsim::BlockTrace& t) {
      const auto& qs = *t.queues;
      for (std::size_t j = 0; j < qs.size(); ++j) {
        const bool sched = t.decision->scheduled.has_value() &&
                           t.decision->scheduled->node == j;
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "%zu,%zu,%.6g,%.6g,%.6g,%.6g,%.6g,%d,%s,%.6g\n", t.block,
                      j, qs[j].q_private, qs[j].q_open,
                      qs[j].q_private_effective, qs[j].z_outage,
                      qs[j].y_power, sched ? 1 : 0,
                      sched ? (t.decision->scheduled->mode ==
                                       privsim::Traffic::kPrivate
                                   ? "private"
                                   : "open")
                            : "-",
                      sched ? t.decision->scheduled->power : 0.0);
        trace_out << buf;
      }
    };
  }

  const privsim::RunSummary summary =
      trace_fn ? privsim::run(cfg, trace_fn) : privsim::run(cfg);
  print_summary(summary);
  if (!out_path.empty()) {
    const privsim::SweepRow row = privsim::summary_to_row(
        summary, 0.0, 0, static_cast<long long>(cfg.seed));
    privsim::emit_csv({row}, out_path);
    std::printf("wrote %s\n", out_path.c_str());
  }
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const Overrides& ov,
              const std::string& out_path) {
  auto parsed = privsim::parse_config(config_path);
  privsim::SweepSpec spec;
  if (std::holds_alternative<privsim::SweepSpec>(parsed)) {
    spec = std::get<privsim::SweepSpec>(parsed);
  } else {
    std::cerr << "config has no sweep section\n";
    return kExitValidation;
  }
  apply_overrides(spec.base, ov);

  const auto rows = privsim::run_sweep(spec);
  privsim::emit_csv(rows, out_path);
  std::printf("wrote %s (%zu rows)\n", out_path.c_str(), rows.size());
  return kExitOk;
}

int cmd_plot(const std::string& csv_path, const std::string& svg_path) {
  const auto rows = privsim::read_csv(csv_path);
  privsim::emit_plot(rows, svg_path);
  std::printf("wrote %s\n", svg_path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "privsim: uplink scheduling simulator with privacy-constrained HARQ"};
  app.require_subcommand(1);

  Overrides ov;
  std::string config_path, out_path, trace_path, csv_path, svg_path;

  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("--seed", ov.seed, "override the base RNG seed")
        ->each([&](const std::string&) { ov.has_seed = true; });
    cmd->add_option("--blocks", ov.blocks,
                    "override the number of blocks (warmup becomes 10%)")
        ->each([&](const std::string&) { ov.has_blocks = true; });
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run a single simulation");
  run_cmd->add_option("config", config_path, "JSON config file")->required();
  run_cmd->add_option("--out", out_path, "write the run summary as CSV");
  run_cmd->add_option("--trace", trace_path, "write a per-block queue trace");
  add_overrides(run_cmd);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  sweep_cmd->add_option("config", config_path, "JSON config file with a sweep section")
      ->required();
  sweep_cmd->add_option("--out", out_path, "output CSV path")->required();
  add_overrides(sweep_cmd);

  CLI::App* plot_cmd =
      app.add_subcommand("plot", "render a sweep CSV as a static SVG");
  plot_cmd->add_option("csv", csv_path, "input CSV")->required();
  plot_cmd->add_option("svg", svg_path, "output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, ov, out_path, trace_path);
    if (sweep_cmd->parsed()) return cmd_sweep(config_path, ov, out_path);
    if (plot_cmd->parsed()) return cmd_plot(csv_path, svg_path);
  } catch (const privsim::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
