#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "hetnet/association.hpp"
#include "hetnet/baselines.hpp"
#include "hetnet/channel.hpp"
#include "hetnet/config.hpp"
#include "hetnet/metrics.hpp"
#include "hetnet/phy.hpp"
#include "hetnet/topology.hpp"

namespace hetnet {

// ---------------------------------------------------------------------------
// Seeds

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of drop `drop`; depends only on the master seed and the drop index.
inline std::uint64_t drop_seed(std::uint64_t master, std::size_t drop) {
  return splitmix64(splitmix64(master) ^ splitmix64(0xD1B54A32D192ED03ULL + drop));
}

inline std::uint64_t layout_seed(std::uint64_t drop_seed_value) { return splitmix64(drop_seed_value ^ 0x1111); }
inline std::uint64_t shadowing_seed(std::uint64_t drop_seed_value) { return splitmix64(drop_seed_value ^ 0x2222); }

// ---------------------------------------------------------------------------
// One drop

struct DropInstance {
  std::size_t drop = 0;
  std::uint64_t seed = 0;
  NetworkLayout layout;
  PowerAllocation power;
  RateTable rates;
};

inline DropInstance make_drop(const ExperimentConfig& config, std::size_t drop) {
  DropInstance d;
  d.drop = drop;
  d.seed = drop_seed(config.seed, drop);
  auto scenario = config.scenario;
  scenario.rng_seed = layout_seed(d.seed);
  auto channel = config.channel;
  channel.rng_seed = shadowing_seed(d.seed);
  d.layout = generate_layout(scenario);
  const auto gains = compute_gains(d.layout, channel);
  d.power = allocate_power(d.layout, config.radio);
  d.rates = build_rate_table(d.layout, gains, d.power, config.partition, config.radio);
  return d;
}

struct SchemeOutcome {
  Scheme scheme = Scheme::MaxUtility;
  Assignment assignment;
  MetricsReport metrics;
};

struct DropResult {
  std::size_t drop = 0;
  std::uint64_t seed = 0;
  double eta = 0.0;
  std::size_t d2d_pairs = 0;
  std::vector<SchemeOutcome> outcomes;  // in config.schemes order
  std::optional<SolveResult> solve;      // present when MAX_UTILITY ran

  const SchemeOutcome* find(Scheme s) const {
    for (const auto& o : outcomes)
      if (o.scheme == s) return &o;
    return nullptr;
  }
};

/// Runs every requested scheme on one drop. MAX_UTILITY is solved first
/// whenever RATE_BIAS needs its prices.
inline DropResult run_drop(const ExperimentConfig& config, const DropInstance& inst) {
  DropResult result;
  result.drop = inst.drop;
  result.seed = inst.seed;
  result.eta = config.partition.eta;
  result.d2d_pairs = inst.rates.dims().pairs;

  if (config.wants(Scheme::MaxUtility)) {
    auto solver = config.solver;
    solver.keep_price_history = false;
    result.solve = solve_max_utility(inst.rates, solver);
  }

  for (auto scheme : config.schemes) {
    SchemeOutcome o;
    o.scheme = scheme;
    switch (scheme) {
      case Scheme::MaxUtility: o.assignment = result.solve->final_x; break;
      case Scheme::MaxRate: o.assignment = assoc_max_rate(inst.rates); break;
      case Scheme::MaxSinr: o.assignment = assoc_max_sinr(inst.rates); break;
      case Scheme::RateBias:
        if (!result.solve) throw ConfigError("RATE_BIAS requested without MAX_UTILITY");
        o.assignment = assoc_rate_bias(inst.rates, result.solve->best_mu);
        break;
      case Scheme::SinrBias: o.assignment = assoc_sinr_bias(inst.rates, inst.power); break;
    }
    o.metrics = evaluate_metrics(o.assignment, inst.rates, config.target_rates_bps);
    result.outcomes.push_back(std::move(o));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Runs and aggregates

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
};

inline MeanStderr mean_stderr(const std::vector<double>& v) {
  MeanStderr m;
  m.count = v.size();
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return m;
}

struct RunReport {
  ExperimentConfig config;
  std::vector<DropResult> drops;

  /// Per-drop values of one metric for one scheme, in drop order.
  std::vector<double> series(Scheme s, const std::function<double(const MetricsReport&)>& metric) const {
    std::vector<double> v;
    for (const auto& d : drops)
      if (const auto* o = d.find(s)) v.push_back(metric(o->metrics));
    return v;
  }

  MeanStderr aggregate(Scheme s, const std::function<double(const MetricsReport&)>& metric) const {
    return mean_stderr(series(s, metric));
  }
};

inline RunReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  RunReport report;
  report.config = config;
  for (std::size_t i = 0; i < config.drops; ++i) report.drops.push_back(run_drop(config, make_drop(config, i)));
  return report;
}

/// One run per eta with identical per-drop seeds, so drop i keeps its
/// layout and shadowing across the sweep.
inline std::vector<RunReport> sweep_eta(const ExperimentConfig& config, const std::vector<double>& etas) {
  std::vector<RunReport> points;
  for (double eta : etas) {
    auto c = config;
    c.partition.eta = eta;
    points.push_back(run_experiment(c));
  }
  return points;
}

inline std::vector<RunReport> sweep_d2d(const ExperimentConfig& config, const std::vector<std::size_t>& pairs) {
  std::vector<RunReport> points;
  for (auto n : pairs) {
    auto c = config;
    c.scenario.d2d_pairs_per_macrocell = n;
    points.push_back(run_experiment(c));
  }
  return points;
}

inline std::vector<double> default_eta_grid() { return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; }
inline std::vector<std::size_t> default_d2d_grid() { return {5, 10, 15, 20, 25}; }

// ---------------------------------------------------------------------------
// Output

/// Shortest round-trip decimal, '.' separator regardless of locale.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

/// Plain positional notation, for rates in bps where an exponent reads badly.
inline std::string format_fixed(double v) {
  char buf[400];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  return ec == std::errc{} ? std::string(buf, end) : format_number(v);
}

inline std::string coverage_column(double rho) { return "coverage_" + format_fixed(rho); }

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
  }

  template <class... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(std::string_view s) { return std::string(s); }
  template <class Int>
    requires std::is_integral_v<Int>
  static std::string cell(Int v) {
    return std::to_string(v);
  }

  std::ofstream out_;
};

inline std::vector<std::string> metrics_header(const ExperimentConfig& c) {
  std::vector<std::string> h{"drop",           "scheme",         "eta",  "d2d_pairs", "macrotier_users",
                             "picotier_users", "d2d_mode_users", "jain", "sum_utility"};
  for (double rho : c.target_rates_bps) h.push_back(coverage_column(rho));
  return h;
}

inline void append_metrics_rows(CsvWriter& csv, const RunReport& report) {
  for (const auto& d : report.drops)
    for (const auto& o : d.outcomes) {
      const auto& m = o.metrics;
      std::vector<std::string> cells{std::to_string(d.drop),
                                     std::string(to_string(o.scheme)),
                                     format_number(d.eta),
                                     std::to_string(d.d2d_pairs),
                                     std::to_string(m.tier_loads.macrotier_users),
                                     std::to_string(m.tier_loads.picotier_users),
                                     std::to_string(m.tier_loads.d2d_mode_users),
                                     format_number(m.jain),
                                     format_number(m.sum_utility)};
      for (const auto& [rho, p] : m.coverage) cells.push_back(format_number(p));
      csv.row(cells);
    }
}

inline nlohmann::json aggregates_json(const RunReport& r) {
  nlohmann::json j;
  auto pack = [](const MeanStderr& m) { return nlohmann::json{{"mean", m.mean}, {"stderr", m.stderr_}, {"n", m.count}}; };
  for (auto s : r.config.schemes) {
    nlohmann::json a;
    a["jain"] = pack(r.aggregate(s, [](const MetricsReport& m) { return m.jain; }));
    a["sum_utility"] = pack(r.aggregate(s, [](const MetricsReport& m) { return m.sum_utility; }));
    a["macrotier_users"] = pack(r.aggregate(s, [](const MetricsReport& m) { return double(m.tier_loads.macrotier_users); }));
    a["picotier_users"] = pack(r.aggregate(s, [](const MetricsReport& m) { return double(m.tier_loads.picotier_users); }));
    a["d2d_mode_users"] = pack(r.aggregate(s, [](const MetricsReport& m) { return double(m.tier_loads.d2d_mode_users); }));
    a["d2d_rx_on_bs"] = pack(r.aggregate(s, [](const MetricsReport& m) { return double(m.d2d_counts.rx_on_bs); }));
    for (std::size_t i = 0; i < r.config.target_rates_bps.size(); ++i)
      a[coverage_column(r.config.target_rates_bps[i])] =
          pack(r.aggregate(s, [i](const MetricsReport& m) { return m.coverage[i].second; }));
    j[std::string(to_string(s))] = std::move(a);
  }
  return j;
}

inline nlohmann::json drops_json(const RunReport& r) {
  auto arr = nlohmann::json::array();
  for (const auto& d : r.drops) {
    nlohmann::json jd{{"drop", d.drop}, {"seed", d.seed}, {"eta", d.eta}, {"d2d_pairs", d.d2d_pairs}};
    for (const auto& o : d.outcomes) {
      const auto& m = o.metrics;
      nlohmann::json cov = nlohmann::json::object();
      for (const auto& [rho, p] : m.coverage) cov[format_number(rho)] = p;
      jd["schemes"][std::string(to_string(o.scheme))] = {
          {"macrotier_users", m.tier_loads.macrotier_users}, {"picotier_users", m.tier_loads.picotier_users},
          {"d2d_mode_users", m.tier_loads.d2d_mode_users},   {"d2d_rx_on_bs", m.d2d_counts.rx_on_bs},
          {"d2d_rx_on_tx", m.d2d_counts.rx_on_tx},           {"jain", m.jain},
          {"jain_degenerate", m.jain_degenerate},            {"sum_utility", m.sum_utility},
          {"coverage", cov}};
    }
    if (d.solve)
      jd["max_utility_solver"] = {{"converged", d.solve->converged},
                                  {"iterations_used", d.solve->iterations_used},
                                  {"best_iteration", d.solve->best_iteration}};
    arr.push_back(std::move(jd));
  }
  return arr;
}

inline nlohmann::json run_report_json(const RunReport& r) {
  nlohmann::json j;
  j["config"] = to_json(r.config);
  auto seeds = nlohmann::json::array();
  for (const auto& d : r.drops) seeds.push_back({{"drop", d.drop}, {"seed", d.seed}});
  j["seed_ledger"] = seeds;
  j["aggregates"] = aggregates_json(r);
  j["drops"] = drops_json(r);
  return j;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

/// metrics.csv, convergence.csv, rates.csv and report.json under `dir`.
inline void write_run_outputs(const RunReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    CsvWriter csv(dir / "metrics.csv");
    csv.row(metrics_header(report.config));
    append_metrics_rows(csv, report);
  }
  {
    CsvWriter csv(dir / "convergence.csv");
    csv.row("drop", "iteration", "G", "I", "max_price_residual");
    for (const auto& d : report.drops)
      if (d.solve)
        for (const auto& t : d.solve->trace)
          csv.row(d.drop, t.iteration, t.sum_utility, t.dual_value, t.max_price_residual);
  }
  {
    CsvWriter csv(dir / "rates.csv");
    csv.row("drop", "scheme", "receiver_role", "rate_bps", "serving_tier");
    for (const auto& d : report.drops)
      for (const auto& o : d.outcomes)
        for (const auto& s : o.metrics.effective_rate_samples)
          csv.row(d.drop, to_string(o.scheme), to_string(s.role), s.rate_bps, to_string(s.tier));
  }
  write_json(dir / "report.json", run_report_json(report));
}

inline void write_eta_sweep_outputs(const std::vector<RunReport>& points, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (points.empty()) return;
  {
    CsvWriter csv(dir / "metrics.csv");
    csv.row(metrics_header(points.front().config));
    for (const auto& p : points) append_metrics_rows(csv, p);
  }
  {
    CsvWriter csv(dir / "coverage_vs_eta.csv");
    csv.row("scheme", "eta", "rho_bps", "coverage_mean", "coverage_stderr");
    for (const auto& p : points)
      for (auto s : p.config.schemes)
        for (std::size_t i = 0; i < p.config.target_rates_bps.size(); ++i) {
          const auto m = p.aggregate(s, [i](const MetricsReport& r) { return r.coverage[i].second; });
          csv.row(to_string(s), format_number(p.config.partition.eta),
                  format_fixed(p.config.target_rates_bps[i]), m.mean, m.stderr_);
        }
  }
  nlohmann::json j;
  j["config"] = to_json(points.front().config);
  for (const auto& p : points)
    j["points"].push_back({{"eta", p.config.partition.eta}, {"aggregates", aggregates_json(p)}});
  write_json(dir / "report.json", j);
}

inline void write_d2d_sweep_outputs(const std::vector<RunReport>& points, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (points.empty()) return;
  {
    CsvWriter csv(dir / "metrics.csv");
    csv.row(metrics_header(points.front().config));
    for (const auto& p : points) append_metrics_rows(csv, p);
  }
  {
    CsvWriter csv(dir / "d2d_counts.csv");
    csv.row("scheme", "d2d_pairs", "rx_on_bs_mean", "rx_on_bs_stderr", "rx_on_tx_mean", "rx_on_tx_stderr");
    for (const auto& p : points)
      for (auto s : p.config.schemes) {
        const auto bs = p.aggregate(s, [](const MetricsReport& r) { return double(r.d2d_counts.rx_on_bs); });
        const auto tx = p.aggregate(s, [](const MetricsReport& r) { return double(r.d2d_counts.rx_on_tx); });
        csv.row(to_string(s), p.drops.front().d2d_pairs, bs.mean, bs.stderr_, tx.mean, tx.stderr_);
      }
  }
  nlohmann::json j;
  j["config"] = to_json(points.front().config);
  for (const auto& p : points)
    j["points"].push_back({{"d2d_pairs_per_macrocell", p.config.scenario.d2d_pairs_per_macrocell},
                           {"aggregates", aggregates_json(p)}});
  write_json(dir / "report.json", j);
}

// ---------------------------------------------------------------------------
// Oracle replay on small drops

/// 2 MBSs, 2 PBSs, 4 cellular users and 2 D2D pairs: small enough for the
/// exhaustive oracle (at most 7 options per receiver).
inline ScenarioConfig small_oracle_scenario() {
  ScenarioConfig s;
  s.macro_rows = 1;
  s.macro_cols = 2;
  s.pbs_per_macrocell = 1;
  s.cellular_users_per_macrocell = 2;
  s.d2d_pairs_per_macrocell = 1;
  return s;
}

}  // namespace hetnet
