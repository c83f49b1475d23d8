#include "privsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "privsim/random.hpp"

namespace privsim {

using nlohmann::json;

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

const std::set<std::string> kTopLevelKeys = {
    "n_nodes",          "main_gain_means",
    "cross_gain_means", "estimation_sigma",
    "seed",             "n_blocks",
    "warmup_blocks",    "metrics",
    "codeword_bits",    "private_bits",
    "open_bits",        "max_retransmissions",
    "V",                "kappa",
    "admission_cap",    "max_power",
    "power_grid_points", "admission_grid_resolution",
    "quadrature_order", "gamma",
    "alpha",            "flow_control_literal",
    "sweep"};

const std::set<std::string> kSweepKeys = {"axis", "values", "seeds_per_point",
                                          "realizations_per_point",
                                          "rate_seed"};

// Scalar or per-node array.
std::vector<double> parse_per_node(const json& j, const std::string& key,
                                   std::size_t n, std::vector<std::string>& errs) {
  const json& v = j.at(key);
  if (v.is_number()) return std::vector<double>(n, v.get<double>());
  if (v.is_array()) {
    if (v.size() != n) {
      errs.push_back("config: " + key + " must be a scalar or an array of " +
                     std::to_string(n) + " values");
      return std::vector<double>(n, 1.0);
    }
    std::vector<double> out;
    out.reserve(n);
    for (const auto& x : v) {
      if (!x.is_number()) {
        errs.push_back("config: " + key + " entries must be numbers");
        return std::vector<double>(n, 1.0);
      }
      out.push_back(x.get<double>());
    }
    return out;
  }
  errs.push_back("config: " + key + " must be a number or an array");
  return std::vector<double>(n, 1.0);
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback,
         std::vector<std::string>& errs) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    errs.push_back("config: field '" + key + "' has the wrong type");
    return fallback;
  }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& scope,
                         std::vector<std::string>& errs) {
  for (const auto& item : j.items())
    if (allowed.find(item.key()) == allowed.end())
      errs.push_back("config: unknown key '" + scope + item.key() + "'");
}

SimConfig parse_sim_config(const json& j, std::vector<std::string>& errs) {
  SimConfig cfg = default_config();
  const std::size_t n =
      get_or<std::size_t>(j, "n_nodes", cfg.channel.n_nodes, errs);
  if (n == 0) {
    errs.push_back("config: n_nodes must be >= 1");
    return cfg;
  }
  if (n != cfg.channel.n_nodes) {
    // Re-derive size-dependent defaults for the requested node count.
    cfg.channel.n_nodes = n;
    cfg.channel.main_gain_means = linspace(25.0, 50.0, n);
    cfg.channel.cross_gain_means =
        n > 1 ? linspace(0.5, 1.5, n * (n - 1)) : std::vector<double>{};
    cfg.harq.rates.assign(n, CodeRates{20.0, 7.5, 20.0});
    cfg.control.gamma.assign(n, 0.1);
    cfg.control.alpha.assign(n, 1.0);
  }

  if (j.contains("main_gain_means"))
    cfg.channel.main_gain_means = parse_per_node(j, "main_gain_means", n, errs);
  if (j.contains("cross_gain_means")) {
    const json& v = j.at("cross_gain_means");
    const std::size_t n_pairs = n * (n - 1);
    if (v.is_number()) {
      cfg.channel.cross_gain_means.assign(n_pairs, v.get<double>());
    } else if (v.is_array() && v.size() == n_pairs) {
      cfg.channel.cross_gain_means.clear();
      for (const auto& x : v) cfg.channel.cross_gain_means.push_back(x.get<double>());
    } else {
      errs.push_back("config: cross_gain_means must be a scalar or an array of " +
                     std::to_string(n_pairs) + " values (ordered pairs)");
    }
  }
  cfg.channel.estimation_sigma =
      get_or<double>(j, "estimation_sigma", cfg.channel.estimation_sigma, errs);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed, errs);
  cfg.channel.rng_seed = cfg.seed;
  cfg.n_blocks = get_or<std::size_t>(j, "n_blocks", cfg.n_blocks, errs);
  if (j.contains("warmup_blocks"))
    cfg.warmup_blocks = get_or<std::size_t>(j, "warmup_blocks", 0, errs);
  else
    cfg.warmup_blocks = cfg.n_blocks / 10;

  const std::string metrics =
      get_or<std::string>(j, "metrics", "summary", errs);
  if (metrics == "summary")
    cfg.metrics = MetricsGranularity::kSummary;
  else if (metrics == "per_block")
    cfg.metrics = MetricsGranularity::kPerBlock;
  else
    errs.push_back("config: metrics must be 'summary' or 'per_block'");

  std::vector<double> codeword(n), priv(n), open(n);
  for (std::size_t i = 0; i < n; ++i) {
    codeword[i] = cfg.harq.rates[i].codeword_bits;
    priv[i] = cfg.harq.rates[i].private_bits;
    open[i] = cfg.harq.rates[i].open_bits;
  }
  if (j.contains("codeword_bits")) codeword = parse_per_node(j, "codeword_bits", n, errs);
  if (j.contains("private_bits")) priv = parse_per_node(j, "private_bits", n, errs);
  if (j.contains("open_bits")) open = parse_per_node(j, "open_bits", n, errs);
  cfg.harq.rates.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    cfg.harq.rates[i] = CodeRates{codeword[i], priv[i], open[i]};
  cfg.harq.max_retransmissions = get_or<std::size_t>(
      j, "max_retransmissions", cfg.harq.max_retransmissions, errs);

  cfg.control.penalty_weight =
      get_or<double>(j, "V", cfg.control.penalty_weight, errs);
  cfg.control.private_utility_scale =
      get_or<double>(j, "kappa", cfg.control.private_utility_scale, errs);
  cfg.control.admission_cap =
      get_or<double>(j, "admission_cap", cfg.control.admission_cap, errs);
  const double max_power = get_or<double>(j, "max_power", 10.0, errs);
  const std::size_t grid_points =
      get_or<std::size_t>(j, "power_grid_points", 64, errs);
  if (grid_points < 2)
    errs.push_back("config: power_grid_points must be >= 2");
  else
    cfg.control.power_grid = make_power_grid(max_power, grid_points);
  cfg.control.admission_grid_resolution = get_or<std::size_t>(
      j, "admission_grid_resolution", cfg.control.admission_grid_resolution,
      errs);
  cfg.control.quadrature_order = get_or<std::size_t>(
      j, "quadrature_order", cfg.control.quadrature_order, errs);
  if (j.contains("gamma")) cfg.control.gamma = parse_per_node(j, "gamma", n, errs);
  if (j.contains("alpha")) cfg.control.alpha = parse_per_node(j, "alpha", n, errs);
  cfg.control.flow_control_literal = get_or<bool>(
      j, "flow_control_literal", cfg.control.flow_control_literal, errs);
  return cfg;
}

ParsedConfig parse_json(const json& j, const std::string& origin) {
  std::vector<std::string> errs;
  if (!j.is_object()) throw ConfigError({origin + ": top level must be a JSON object"});
  reject_unknown_keys(j, kTopLevelKeys, "", errs);
  SimConfig cfg = parse_sim_config(j, errs);

  if (!j.contains("sweep")) {
    if (!errs.empty()) throw ConfigError(errs);
    validate_config(cfg);
    return cfg;
  }

  const json& sj = j.at("sweep");
  SweepSpec spec;
  spec.base = cfg;
  if (!sj.is_object()) {
    errs.push_back("config: sweep must be an object");
    throw ConfigError(errs);
  }
  reject_unknown_keys(sj, kSweepKeys, "sweep.", errs);
  const std::string axis = get_or<std::string>(sj, "axis", "gamma", errs);
  if (axis == "gamma")
    spec.axis = SweepAxis::kGamma;
  else if (axis == "alpha")
    spec.axis = SweepAxis::kAlpha;
  else if (axis == "V")
    spec.axis = SweepAxis::kV;
  else
    errs.push_back("config: sweep.axis must be one of gamma, alpha, V");
  if (sj.contains("values")) {
    try {
      spec.values = sj.at("values").get<std::vector<double>>();
    } catch (const json::exception&) {
      errs.push_back("config: sweep.values must be an array of numbers");
    }
  }
  spec.seeds_per_point =
      get_or<std::size_t>(sj, "seeds_per_point", spec.seeds_per_point, errs);
  spec.realizations_per_point = get_or<std::size_t>(
      sj, "realizations_per_point", spec.realizations_per_point, errs);
  spec.rate_seed = get_or<std::uint64_t>(sj, "rate_seed", spec.rate_seed, errs);

  if (spec.values.empty())
    errs.push_back("config: sweep.values must be nonempty");
  for (std::size_t i = 1; i < spec.values.size(); ++i)
    if (!(spec.values[i] > spec.values[i - 1])) {
      errs.push_back("config: sweep.values must be strictly increasing");
      break;
    }
  if (spec.seeds_per_point < 1)
    errs.push_back("config: sweep.seeds_per_point must be >= 1");
  if (spec.realizations_per_point < 1)
    errs.push_back("config: sweep.realizations_per_point must be >= 1");

  if (!errs.empty()) throw ConfigError(errs);
  // Every point must itself be a valid config.
  for (double v : spec.values) validate_config(apply_axis(spec.base, spec.axis, v));
  return spec;
}

json config_to_json(const SimConfig& cfg) {
  json j;
  j["n_nodes"] = cfg.channel.n_nodes;
  j["main_gain_means"] = cfg.channel.main_gain_means;
  j["cross_gain_means"] = cfg.channel.cross_gain_means;
  j["estimation_sigma"] = cfg.channel.estimation_sigma;
  j["seed"] = cfg.seed;
  j["n_blocks"] = cfg.n_blocks;
  j["warmup_blocks"] = cfg.warmup_blocks;
  j["metrics"] =
      cfg.metrics == MetricsGranularity::kSummary ? "summary" : "per_block";
  std::vector<double> codeword, priv, open;
  for (const CodeRates& r : cfg.harq.rates) {
    codeword.push_back(r.codeword_bits);
    priv.push_back(r.private_bits);
    open.push_back(r.open_bits);
  }
  j["codeword_bits"] = codeword;
  j["private_bits"] = priv;
  j["open_bits"] = open;
  j["max_retransmissions"] = cfg.harq.max_retransmissions;
  j["V"] = cfg.control.penalty_weight;
  j["kappa"] = cfg.control.private_utility_scale;
  j["admission_cap"] = cfg.control.admission_cap;
  j["max_power"] = cfg.control.power_grid.back();
  j["power_grid_points"] = cfg.control.power_grid.size();
  j["admission_grid_resolution"] = cfg.control.admission_grid_resolution;
  j["quadrature_order"] = cfg.control.quadrature_order;
  j["gamma"] = cfg.control.gamma;
  j["alpha"] = cfg.control.alpha;
  j["flow_control_literal"] = cfg.control.flow_control_literal;
  return j;
}

}  // namespace

const char* sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kGamma: return "gamma";
    case SweepAxis::kAlpha: return "alpha";
    case SweepAxis::kV: return "V";
  }
  return "?";
}

SimConfig default_config() {
  SimConfig cfg;
  cfg.channel.n_nodes = 4;
  cfg.channel.main_gain_means = linspace(25.0, 50.0, 4);
  cfg.channel.cross_gain_means = linspace(0.5, 1.5, 12);
  cfg.channel.estimation_sigma = 1.0;
  cfg.channel.rng_seed = 1;
  cfg.harq.max_retransmissions = 50;
  cfg.harq.rates.assign(4, CodeRates{20.0, 7.5, 20.0});
  cfg.control.penalty_weight = 50.0;
  cfg.control.private_utility_scale = 5.0;
  cfg.control.admission_cap = 5.0;
  cfg.control.power_grid = make_power_grid(10.0, 64);
  cfg.control.admission_grid_resolution = 8;
  cfg.control.quadrature_order = 32;
  cfg.control.gamma.assign(4, 0.1);
  cfg.control.alpha.assign(4, 1.0);
  cfg.n_blocks = 100000;
  cfg.warmup_blocks = 10000;
  cfg.seed = 1;
  return cfg;
}

ParsedConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file: " + path});
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

ParsedConfig parse_config_text(const std::string& text,
                               const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({origin + ": " + e.what()});
  }
  return parse_json(j, origin);
}

std::string emit_config(const SimConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

std::string emit_config(const SweepSpec& spec) {
  json j = config_to_json(spec.base);
  json sj;
  sj["axis"] = sweep_axis_name(spec.axis);
  sj["values"] = spec.values;
  sj["seeds_per_point"] = spec.seeds_per_point;
  sj["realizations_per_point"] = spec.realizations_per_point;
  sj["rate_seed"] = spec.rate_seed;
  j["sweep"] = sj;
  return j.dump(2) + "\n";
}

SimConfig apply_axis(const SimConfig& base, SweepAxis axis, double value) {
  SimConfig cfg = base;
  switch (axis) {
    case SweepAxis::kGamma:
      cfg.control.gamma.assign(cfg.channel.n_nodes, value);
      break;
    case SweepAxis::kAlpha:
      cfg.control.alpha.assign(cfg.channel.n_nodes, value);
      break;
    case SweepAxis::kV:
      cfg.control.penalty_weight = value;
      break;
  }
  return cfg;
}

std::vector<CodeRates> realization_rates(const SimConfig& base,
                                         std::uint64_t rate_seed,
                                         std::size_t realization) {
  if (realization == 0) return base.harq.rates;
  RandomStream rng(derive_seed(rate_seed, realization));
  std::vector<CodeRates> rates(base.channel.n_nodes);
  for (CodeRates& r : rates) {
    r.codeword_bits = 15.0 + 10.0 * rng.uniform();
    r.open_bits = 15.0 + 10.0 * rng.uniform();
    r.private_bits = 5.0 + 5.0 * rng.uniform();
  }
  return rates;
}

std::uint64_t realization_seed(std::uint64_t base_seed, std::size_t realization,
                               std::size_t seed_index) {
  if (realization == 0 && seed_index == 0) return base_seed;
  return derive_seed(base_seed, realization + 1, seed_index + 1);
}

}  // namespace privsim
