#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hetnet/hetnet.hpp"

using namespace hetnet;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("hetnet_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// One macrocell with a handful of nodes: fast enough for full runs in unit tests.
ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.scenario.macro_rows = 1;
  c.scenario.macro_cols = 2;
  c.scenario.pbs_per_macrocell = 2;
  c.scenario.cellular_users_per_macrocell = 5;
  c.scenario.d2d_pairs_per_macrocell = 2;
  c.drops = 3;
  c.seed = 7;
  return c;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Config, DefaultsAndSections) {
  const auto c = parse_config(nlohmann::json::parse(R"({
    "scenario": {"pbs_per_macrocell": 2},
    "partition": {"eta": 0.3},
    "solver": {"stepsize": 0.02},
    "schemes": ["MAX_UTILITY", "RATE_BIAS"],
    "drops": 4, "seed": 9,
    "target_rates_bps": [1e6]
  })"));
  EXPECT_EQ(c.scenario.pbs_per_macrocell, 2u);
  EXPECT_EQ(c.scenario.cellular_users_per_macrocell, 30u);
  EXPECT_DOUBLE_EQ(c.partition.eta, 0.3);
  EXPECT_DOUBLE_EQ(c.solver.stepsize, 0.02);
  EXPECT_EQ(c.schemes.size(), 2u);
  EXPECT_EQ(c.drops, 4u);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.target_rates_bps, std::vector<double>{1e6});
}

TEST(Config, UnknownKeysFail) {
  EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"scenario": {"pbs": 2}})")), ConfigError);
  EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"drop": 2})")), ConfigError);
  EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"schemes": ["MAX_FOO"]})")), ConfigError);
}

TEST(Config, InvariantsEnforced) {
  EXPECT_ANY_THROW(parse_config(nlohmann::json::parse(R"({"drops": 0})")));
  EXPECT_ANY_THROW(parse_config(nlohmann::json::parse(R"({"eta_sweep": [1.5]})")));
  EXPECT_ANY_THROW(parse_config(nlohmann::json::parse(R"({"target_rates_bps": [-1]})")));
  EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"schemes": ["RATE_BIAS"]})")), ConfigError);
  EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"drops": "many"})")), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  auto c = tiny_config();
  c.eta_sweep = {0.1, 0.2};
  const auto back = parse_config(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(Config, SampleFileLoads) {
  const auto c = load_config(HETNET_TEST_DATA "/../../configs/default.json");
  EXPECT_EQ(c.scenario.macrocell_count(), 4u);
  EXPECT_THROW(load_config(HETNET_TEST_DATA "/missing.json"), ConfigError);
}

TEST(Seeds, DropSeedIsPureFunction) {
  EXPECT_EQ(drop_seed(1, 5), drop_seed(1, 5));
  EXPECT_NE(drop_seed(1, 5), drop_seed(1, 6));
  EXPECT_NE(drop_seed(1, 5), drop_seed(2, 5));
}

TEST(Seeds, DropCountDoesNotChangeOtherDrops) {
  auto c = tiny_config();
  const auto a = run_experiment(c);
  c.drops = 1;
  const auto b = run_experiment(c);
  EXPECT_EQ(b.drops[0].seed, a.drops[0].seed);
  EXPECT_EQ(b.drops[0].outcomes[0].assignment, a.drops[0].outcomes[0].assignment);
}

TEST(Experiment, SmokeSingleScheme) {
  auto c = tiny_config();
  c.drops = 1;
  c.schemes = {Scheme::MaxSinr};
  const auto dir = scratch_dir("smoke");
  const auto r = run_experiment(c);
  write_run_outputs(r, dir);
  const auto metrics = slurp(dir / "metrics.csv");
  EXPECT_EQ(line_count(metrics), 2u);
  EXPECT_EQ(metrics.substr(0, metrics.find('\n')),
            "drop,scheme,eta,d2d_pairs,macrotier_users,picotier_users,d2d_mode_users,jain,sum_utility,"
            "coverage_250000,coverage_500000,coverage_1000000,coverage_2000000");
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(report["seed_ledger"].size(), 1u);
  // convergence trace is header only without MAX_UTILITY
  EXPECT_EQ(line_count(slurp(dir / "convergence.csv")), 1u);
}

TEST(Experiment, ByteIdenticalReruns) {
  const auto c = tiny_config();
  const auto a = scratch_dir("rerun_a");
  const auto b = scratch_dir("rerun_b");
  write_run_outputs(run_experiment(c), a);
  write_run_outputs(run_experiment(c), b);
  for (auto f : {"metrics.csv", "convergence.csv", "rates.csv", "report.json"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Experiment, AggregatesRecomputableFromRows) {
  const auto r = run_experiment(tiny_config());
  for (auto s : r.config.schemes) {
    double sum = 0.0;
    for (const auto& d : r.drops) sum += d.find(s)->metrics.jain;
    EXPECT_NEAR(r.aggregate(s, [](const MetricsReport& m) { return m.jain; }).mean, sum / r.drops.size(), 1e-12);
  }
}

TEST(Experiment, RateBiasUsesSolverPrices) {
  const auto r = run_experiment(tiny_config());
  for (const auto& d : r.drops) EXPECT_EQ(d.find(Scheme::RateBias)->assignment, d.find(Scheme::MaxUtility)->assignment);
}

TEST(Sweep, EtaZeroMeansEmptySubbandTwo) {
  auto c = tiny_config();
  c.drops = 2;
  const auto points = sweep_eta(c, {0.0});
  for (const auto& d : points[0].drops) {
    const auto inst = make_drop([&] {
      auto z = c;
      z.partition.eta = 0.0;
      return z;
    }(), d.drop);
    for (std::size_t k = 0; k < inst.rates.dims().rx_count(); ++k)
      for (std::size_t i = 0; i < inst.rates.dims().pbs; ++i)
        EXPECT_DOUBLE_EQ(inst.rates.rate(inst.rates.dims().pbs_tx(i), Subband::PicoOnly, k), inst.rates.rate_floor());
  }
}

TEST(Sweep, RepeatedEtaGivesIdenticalRows) {
  auto c = tiny_config();
  c.drops = 2;
  const auto points = sweep_eta(c, {0.4, 0.4});
  const auto a = scratch_dir("eta_a");
  const auto b = scratch_dir("eta_b");
  write_run_outputs(points[0], a);
  write_run_outputs(points[1], b);
  EXPECT_EQ(slurp(a / "metrics.csv"), slurp(b / "metrics.csv"));
}

TEST(Sweep, PairedDropsShareLayout) {
  auto c = tiny_config();
  auto d = c;
  c.partition.eta = 0.1;
  d.partition.eta = 0.8;
  const auto x = make_drop(c, 2);
  const auto y = make_drop(d, 2);
  EXPECT_EQ(x.layout, y.layout);
  EXPECT_EQ(x.seed, y.seed);
}

TEST(Sweep, OutputsWritten) {
  auto c = tiny_config();
  c.drops = 2;
  const auto dir = scratch_dir("sweeps");
  write_eta_sweep_outputs(sweep_eta(c, {0.0, 0.5}), dir / "eta");
  write_d2d_sweep_outputs(sweep_d2d(c, {1, 3}), dir / "d2d");
  const auto cov = slurp(dir / "eta" / "coverage_vs_eta.csv");
  EXPECT_EQ(line_count(cov), 1u + 2u * c.schemes.size() * c.target_rates_bps.size());
  const auto counts = slurp(dir / "d2d" / "d2d_counts.csv");
  EXPECT_EQ(line_count(counts), 1u + 2u * c.schemes.size());
}

TEST(Instance, RoundTripReproducesSolver) {
  const auto c = tiny_config();
  const auto d = make_drop(c, 1);
  const auto path = scratch_dir("instance") / "drop1.json";
  export_instance(d.rates, d.power, &d.layout, path.string());
  const auto back = import_instance(path.string());
  ASSERT_TRUE(back.layout.has_value());
  EXPECT_EQ(*back.layout, d.layout);
  EXPECT_EQ(back.power, d.power);
  EXPECT_EQ(back.rates.pair_map(), d.rates.pair_map());
  const auto a = solve_max_utility(d.rates, c.solver);
  const auto b = solve_max_utility(back.rates, c.solver);
  EXPECT_EQ(a.final_x, b.final_x);
  EXPECT_NEAR(a.best_utility, b.best_utility, 1e-12 * std::abs(a.best_utility));
  EXPECT_EQ(assoc_sinr_bias(d.rates, d.power), assoc_sinr_bias(back.rates, back.power));
  EXPECT_EQ(assoc_max_sinr(d.rates), assoc_max_sinr(back.rates));
}

TEST(Instance, TruncatedFileNamesByteOffset) {
  const auto d = make_drop(tiny_config(), 0);
  const auto text = instance_to_json(d.rates, d.power, nullptr).dump();
  try {
    parse_instance(text.substr(0, text.size() / 2));
    FAIL() << "expected a parse error";
  } catch (const InstanceError& e) {
    EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
  }
}

TEST(Instance, VersionMismatchRejected) {
  const auto d = make_drop(tiny_config(), 0);
  auto j = instance_to_json(d.rates, d.power, nullptr);
  j["version"] = 99;
  EXPECT_THROW(instance_from_json(j), InstanceError);
  j = instance_to_json(d.rates, d.power, nullptr);
  j["links"].erase(0);
  EXPECT_THROW(instance_from_json(j), InstanceError);
}

TEST(Instance, HandWrittenFixture) {
  const auto inst = import_instance(HETNET_TEST_DATA "/two_users.json");
  EXPECT_FALSE(inst.layout.has_value());
  const auto r = brute_force_oracle(inst.rates);
  EXPECT_EQ(r.assignments, 9u);
  EXPECT_EQ(r.best[0], (Link{0, Subband::Shared}));
  EXPECT_EQ(r.best[1], (Link{1, Subband::PicoOnly}));
  EXPECT_NEAR(r.utility, std::log(12e6) + std::log(9.5e6), 1e-9);
  const auto s = solve_max_utility(inst.rates, SolverConfig{});
  EXPECT_NEAR(s.best_utility, r.utility, 1e-9);
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(250000.0), "250000");
  EXPECT_EQ(std::stod(format_number(0.1 + 0.2)), 0.1 + 0.2);
}
