// Command-line front end: runs, sweeps, oracle replay and instance export.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hetnet/hetnet.hpp"

namespace {

using namespace hetnet;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> drops;
  std::optional<std::string> out_dir;
  std::vector<std::string> schemes;
};

ExperimentConfig resolve_config(const GlobalOptions& g) {
  ExperimentConfig c = g.config_path.empty() ? ExperimentConfig{} : load_config(g.config_path);
  if (g.seed) c.seed = *g.seed;
  if (g.drops) c.drops = *g.drops;
  if (g.out_dir) c.out_dir = *g.out_dir;
  if (!g.schemes.empty()) {
    c.schemes.clear();
    for (const auto& name : g.schemes) {
      auto s = parse_scheme(name);
      if (!s) throw ConfigError("unknown scheme '" + name + "'");
      c.schemes.push_back(*s);
    }
  }
  c.validate();
  return c;
}

void print_summary(const RunReport& r) {
  std::printf("%-12s %8s %8s %8s %8s %8s\n", "scheme", "jain", "macro", "pico", "d2d", "utility");
  for (auto s : r.config.schemes) {
    const auto jain = r.aggregate(s, [](const MetricsReport& m) { return m.jain; });
    const auto mac = r.aggregate(s, [](const MetricsReport& m) { return double(m.tier_loads.macrotier_users); });
    const auto pic = r.aggregate(s, [](const MetricsReport& m) { return double(m.tier_loads.picotier_users); });
    const auto d2d = r.aggregate(s, [](const MetricsReport& m) { return double(m.tier_loads.d2d_mode_users); });
    const auto u = r.aggregate(s, [](const MetricsReport& m) { return m.sum_utility; });
    std::printf("%-12s %8.4f %8.2f %8.2f %8.2f %8.2f\n", std::string(to_string(s)).c_str(), jain.mean, mac.mean,
                pic.mean, d2d.mean, u.mean);
  }
}

int cmd_run(const GlobalOptions& g) {
  const auto c = resolve_config(g);
  const auto report = run_experiment(c);
  write_run_outputs(report, c.out_dir);
  print_summary(report);
  std::printf("wrote %s\n", c.out_dir.c_str());
  return 0;
}

int cmd_sweep_eta(const GlobalOptions& g) {
  const auto c = resolve_config(g);
  const auto etas = c.eta_sweep.empty() ? default_eta_grid() : c.eta_sweep;
  const auto points = sweep_eta(c, etas);
  write_eta_sweep_outputs(points, c.out_dir);
  const auto& rhos = c.target_rates_bps;
  for (const auto& p : points) {
    std::printf("eta=%.2f", p.config.partition.eta);
    if (p.config.wants(Scheme::MaxUtility))
      for (std::size_t i = 0; i < rhos.size(); ++i) {
        const auto m = p.aggregate(Scheme::MaxUtility, [i](const MetricsReport& r) { return r.coverage[i].second; });
        std::printf("  P(R>%g)=%.4f", rhos[i], m.mean);
      }
    std::printf("\n");
  }
  std::printf("wrote %s\n", c.out_dir.c_str());
  return 0;
}

int cmd_sweep_d2d(const GlobalOptions& g) {
  const auto c = resolve_config(g);
  const auto pairs = c.d2d_sweep.empty() ? default_d2d_grid() : c.d2d_sweep;
  const auto points = sweep_d2d(c, pairs);
  write_d2d_sweep_outputs(points, c.out_dir);
  for (const auto& p : points) {
    std::printf("pairs=%zu", p.config.scenario.d2d_pairs_per_macrocell);
    for (auto s : p.config.schemes) {
      const auto m = p.aggregate(s, [](const MetricsReport& r) { return double(r.d2d_counts.rx_on_tx); });
      std::printf("  %s=%.2f", std::string(to_string(s)).c_str(), m.mean);
    }
    std::printf("\n");
  }
  std::printf("wrote %s\n", c.out_dir.c_str());
  return 0;
}

bool oracle_check_one(const RateTable& rates, const SolverConfig& solver, const std::string& label) {
  const auto oracle = brute_force_oracle(rates);
  const auto solved = solve_max_utility(rates, solver);
  const double gap = (oracle.utility - solved.best_utility) / std::abs(oracle.utility);
  double min_dual = std::numeric_limits<double>::infinity();
  for (const auto& t : solved.trace) min_dual = std::min(min_dual, t.dual_value);
  const bool ok = solved.best_utility <= oracle.utility + 1e-9 && min_dual >= oracle.utility - 1e-9;
  std::printf("%s G*=%.6f G=%.6f gap=%.4f%% min_I=%.6f %s\n", label.c_str(), oracle.utility, solved.best_utility,
              100.0 * gap, min_dual, ok ? "ok" : "VIOLATION");
  return ok;
}

int cmd_oracle_check(const GlobalOptions& g, std::size_t instances, const std::string& instance_path) {
  auto c = resolve_config(g);
  if (!instance_path.empty()) {
    const auto inst = import_instance(instance_path);
    return oracle_check_one(inst.rates, c.solver, instance_path) ? 0 : 1;
  }
  c.scenario = small_oracle_scenario();
  std::size_t violations = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const auto drop = make_drop(c, i);
    if (!oracle_check_one(drop.rates, c.solver, "instance " + std::to_string(i))) ++violations;
  }
  std::printf("%zu/%zu instances consistent\n", instances - violations, instances);
  return violations == 0 ? 0 : 1;
}

int cmd_export_instance(const GlobalOptions& g, std::size_t drop, const std::string& output) {
  const auto c = resolve_config(g);
  const auto d = make_drop(c, drop);
  export_instance(d.rates, d.power, &d.layout, output);
  std::printf("wrote %s (drop %zu, seed %llu)\n", output.c_str(), drop, static_cast<unsigned long long>(d.seed));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"D2D-enabled heterogeneous network association simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--drops", g.drops, "Monte Carlo drops")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--scheme", g.schemes, "scheme to run (repeatable)")->take_all();

  auto* run = app.add_subcommand("run", "run every scheme over the configured drops");
  auto* eta = app.add_subcommand("sweep-eta", "paired sweep over the subband-2 fraction");
  auto* d2d = app.add_subcommand("sweep-d2d", "sweep over the number of D2D pairs per macrocell");

  auto* oracle = app.add_subcommand("oracle-check", "compare the solver with exhaustive search on small instances");
  std::size_t instances = 10;
  std::string instance_path;
  oracle->add_option("--instances", instances, "number of random small instances");
  oracle->add_option("--instance", instance_path, "check a saved instance file instead")->check(CLI::ExistingFile);

  auto* exp = app.add_subcommand("export-instance", "save one drop's radio tables");
  std::size_t drop = 0;
  std::string output;
  exp->add_option("--drop", drop, "drop index");
  exp->add_option("--output,-o", output, "instance file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(g);
    if (*eta) return cmd_sweep_eta(g);
    if (*d2d) return cmd_sweep_d2d(g);
    if (*oracle) return cmd_oracle_check(g, instances, instance_path);
    if (*exp) return cmd_export_instance(g, drop, output);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
