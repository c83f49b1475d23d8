#include "privsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace privsim {

const char* const kCsvHeader =
    "axis_value,realization,seed,private_rate,open_rate,"
    "effective_private_rate,empirical_outage,markov_bound,avg_power,"
    "avg_Qp,avg_Qo,utility,decode_failures";

SweepRow summary_to_row(const RunSummary& s, double axis_value,
                        long long realization, long long seed) {
  SweepRow r;
  r.axis_value = axis_value;
  r.realization = realization;
  r.seed = seed;
  r.private_rate = s.mu_private;
  r.open_rate = s.mu_open;
  r.effective_private_rate = s.mu_private_effective_fluid;
  r.empirical_outage = s.empirical_outage_fraction;
  r.markov_bound = s.markov_bound_avg;
  r.avg_power = s.avg_power;
  r.avg_q_private = s.avg_q_private;
  r.avg_q_open = s.avg_q_open;
  r.utility = s.utility_avg;
  r.decode_failures = static_cast<double>(s.decode_failures);
  return r;
}

namespace {

std::size_t worker_count() {
  if (const char* env = std::getenv("PRIVSIM_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

SweepRow aggregate_rows(const std::vector<SweepRow>& rows, std::size_t begin,
                        std::size_t end) {
  SweepRow agg;
  agg.axis_value = rows[begin].axis_value;
  agg.realization = -1;
  agg.seed = -1;
  const double inv = 1.0 / static_cast<double>(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    agg.private_rate += rows[i].private_rate * inv;
    agg.open_rate += rows[i].open_rate * inv;
    agg.effective_private_rate += rows[i].effective_private_rate * inv;
    agg.empirical_outage += rows[i].empirical_outage * inv;
    agg.markov_bound += rows[i].markov_bound * inv;
    agg.avg_power += rows[i].avg_power * inv;
    agg.avg_q_private += rows[i].avg_q_private * inv;
    agg.avg_q_open += rows[i].avg_q_open * inv;
    agg.utility += rows[i].utility * inv;
    agg.decode_failures += rows[i].decode_failures * inv;
  }
  return agg;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  struct Job {
    std::size_t axis_index, realization, seed_index, row_slot;
  };
  const std::size_t runs_per_point =
      spec.realizations_per_point * spec.seeds_per_point;
  std::vector<Job> jobs;
  jobs.reserve(spec.values.size() * runs_per_point);
  for (std::size_t a = 0; a < spec.values.size(); ++a)
    for (std::size_t r = 0; r < spec.realizations_per_point; ++r)
      for (std::size_t s = 0; s < spec.seeds_per_point; ++s)
        jobs.push_back({a, r, s,
                        a * runs_per_point + r * spec.seeds_per_point + s});

  std::vector<SweepRow> run_rows(jobs.size());
  std::vector<std::string> failures(jobs.size());
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      try {
        SimConfig cfg =
            apply_axis(spec.base, spec.axis, spec.values[job.axis_index]);
        cfg.harq.rates =
            realization_rates(spec.base, spec.rate_seed, job.realization);
        cfg.seed =
            realization_seed(spec.base.seed, job.realization, job.seed_index);
        cfg.channel.rng_seed = cfg.seed;
        const RunSummary summary = run(cfg);
        run_rows[job.row_slot] = summary_to_row(
            summary, spec.values[job.axis_index],
            static_cast<long long>(job.realization),
            static_cast<long long>(cfg.seed));
      } catch (const std::exception& e) {
        failures[job.row_slot] = e.what();
      }
    }
  };

  const std::size_t n_workers = std::min(worker_count(), jobs.size());
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!failures[jobs[i].row_slot].empty()) {
      std::ostringstream os;
      os << "sweep point failed (" << sweep_axis_name(spec.axis) << "="
         << spec.values[jobs[i].axis_index]
         << ", realization=" << jobs[i].realization
         << ", seed_index=" << jobs[i].seed_index
         << "): " << failures[jobs[i].row_slot];
      throw std::runtime_error(os.str());
    }
  }

  std::vector<SweepRow> rows;
  rows.reserve(run_rows.size() + spec.values.size());
  for (std::size_t a = 0; a < spec.values.size(); ++a) {
    const std::size_t begin = a * runs_per_point;
    for (std::size_t i = 0; i < runs_per_point; ++i)
      rows.push_back(run_rows[begin + i]);
    rows.push_back(aggregate_rows(run_rows, begin, begin + runs_per_point));
  }
  return rows;
}

namespace {

void append_value(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  out += buf;
}

}  // namespace

std::string csv_to_string(const std::vector<SweepRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const SweepRow& r : rows) {
    append_value(out, r.axis_value);
    out += ',';
    out += std::to_string(r.realization);
    out += ',';
    out += std::to_string(r.seed);
    for (double v : {r.private_rate, r.open_rate, r.effective_private_rate,
                     r.empirical_outage, r.markov_bound, r.avg_power,
                     r.avg_q_private, r.avg_q_open, r.utility,
                     r.decode_failures}) {
      out += ',';
      append_value(out, v);
    }
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  if (rows.empty())
    throw std::runtime_error("emit_csv: no rows to write (" + path + ")");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
  out << csv_to_string(rows);
  out.flush();
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

std::vector<SweepRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_csv: empty file " + path);
  if (line == std::string(kCsvHeader) + "\r") line.pop_back();
  if (line != kCsvHeader)
    throw std::runtime_error("read_csv: unexpected header in " + path);
  std::vector<SweepRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> fields;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell =
          line.substr(pos, comma == std::string::npos ? comma : comma - pos);
      fields.push_back(std::strtod(cell.c_str(), nullptr));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (fields.size() != 13)
      throw std::runtime_error("read_csv: line " + std::to_string(line_no) +
                               " of " + path + " has " +
                               std::to_string(fields.size()) + " fields");
    SweepRow r;
    r.axis_value = fields[0];
    r.realization = static_cast<long long>(fields[1]);
    r.seed = static_cast<long long>(fields[2]);
    r.private_rate = fields[3];
    r.open_rate = fields[4];
    r.effective_private_rate = fields[5];
    r.empirical_outage = fields[6];
    r.markov_bound = fields[7];
    r.avg_power = fields[8];
    r.avg_q_private = fields[9];
    r.avg_q_open = fields[10];
    r.utility = fields[11];
    r.decode_failures = fields[12];
    rows.push_back(r);
  }
  return rows;
}

namespace {

struct Series {
  const char* label;
  const char* color;
  std::vector<double> y;
};

std::string format_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

std::string plot_to_string(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw std::runtime_error("emit_plot: no rows to plot");

  // Prefer per-point aggregates; fall back to averaging whatever is there.
  std::map<double, std::pair<SweepRow, std::size_t>> points;
  bool have_agg = false;
  for (const SweepRow& r : rows)
    if (r.realization < 0) have_agg = true;
  for (const SweepRow& r : rows) {
    if (have_agg && r.realization >= 0) continue;
    auto& slot = points[r.axis_value];
    slot.first.private_rate += r.private_rate;
    slot.first.open_rate += r.open_rate;
    slot.first.effective_private_rate += r.effective_private_rate;
    slot.second += 1;
  }

  std::vector<double> xs;
  Series series[3] = {{"private", "#c02424", {}},
                      {"open", "#2450c0", {}},
                      {"effective private", "#208040", {}}};
  for (const auto& [x, slot] : points) {
    const double inv = 1.0 / static_cast<double>(slot.second);
    xs.push_back(x);
    series[0].y.push_back(slot.first.private_rate * inv);
    series[1].y.push_back(slot.first.open_rate * inv);
    series[2].y.push_back(slot.first.effective_private_rate * inv);
  }

  const double width = 640, height = 440;
  const double ml = 70, mr = 20, mt = 20, mb = 50;
  double x_lo = xs.front(), x_hi = xs.back();
  if (x_hi == x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  double y_hi = 0.0;
  for (const Series& s : series)
    for (double v : s.y) y_hi = std::max(y_hi, v);
  if (y_hi <= 0.0) y_hi = 1.0;
  y_hi *= 1.08;

  const auto px = [&](double x) {
    return ml + (x - x_lo) / (x_hi - x_lo) * (width - ml - mr);
  };
  const auto py = [&](double y) {
    return height - mb - y / y_hi * (height - mt - mb);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  svg << "  <rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  // axes
  svg << "  <line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\""
      << width - mr << "\" y2=\"" << height - mb
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "  <line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << height - mb
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  // ticks
  for (int t = 0; t <= 4; ++t) {
    const double xv = x_lo + (x_hi - x_lo) * t / 4.0;
    const double yv = y_hi * t / 4.0;
    svg << "  <text x=\"" << px(xv) << "\" y=\"" << height - mb + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << format_tick(xv)
        << "</text>\n";
    svg << "  <text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << format_tick(yv)
        << "</text>\n";
  }
  svg << "  <text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
      << "\" font-size=\"12\" text-anchor=\"middle\">axis value</text>\n";
  svg << "  <text x=\"16\" y=\"" << (mt + height - mb) / 2
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (mt + height - mb) / 2 << ")\">rate (bits/block/node)</text>\n";

  for (int s = 0; s < 3; ++s) {
    svg << "  <polyline class=\"series\" fill=\"none\" stroke=\""
        << series[s].color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) svg << ' ';
      svg << px(xs[i]) << ',' << py(series[s].y[i]);
    }
    svg << "\"/>\n";
    const double ly = mt + 16 + 18 * s;
    svg << "  <line x1=\"" << width - mr - 150 << "\" y1=\"" << ly
        << "\" x2=\"" << width - mr - 126 << "\" y2=\"" << ly << "\" stroke=\""
        << series[s].color << "\" stroke-width=\"2\"/>\n";
    svg << "  <text x=\"" << width - mr - 120 << "\" y=\"" << ly + 4
        << "\" font-size=\"12\">" << series[s].label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const std::vector<SweepRow>& rows, const std::string& path) {
  const std::string svg = plot_to_string(rows);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_plot: cannot open " + path);
  out << svg;
  out.flush();
  if (!out) throw std::runtime_error("emit_plot: write failed for " + path);
}

}  // namespace privsim
