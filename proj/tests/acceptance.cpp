// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Drop counts and seeds are fixed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hetnet/hetnet.hpp"

using namespace hetnet;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<Outcome> outcomes;

void report(const std::string& name, bool pass, const std::string& detail) {
  outcomes.push_back({name, pass, detail});
  std::printf("%s %-26s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Mean and standard error of the per-drop difference a - b.
MeanStderr paired(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return mean_stderr(d);
}

constexpr std::uint64_t kSeed = 20240601;

// Small-instance oracle checks share their runs between the gap and the
// weak-duality criteria.
void oracle_criteria() {
  const auto t0 = Clock::now();
  ExperimentConfig c;
  c.scenario = small_oracle_scenario();
  c.seed = kSeed;
  std::size_t within = 0, above = 0, dual_violations = 0, rounds = 0;
  std::uint64_t max_enum = 0;
  std::size_t max_options = 0;
  double worst_gap = 0.0;
  const std::size_t n = 100;
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = make_drop(c, i);
    for (std::size_t k = 0; k < d.rates.dims().rx_count(); ++k)
      max_options = std::max(max_options, d.rates.option_count(k));
    const auto oracle = brute_force_oracle(d.rates, 16'777'216);  // 8^8
    max_enum = std::max(max_enum, oracle.assignments);
    const auto s = solve_max_utility(d.rates, c.solver);
    const double g_star = oracle.utility;
    if (s.best_utility >= g_star - 0.05 * std::abs(g_star)) ++within;
    if (s.best_utility > g_star + 1e-9) ++above;
    worst_gap = std::max(worst_gap, (g_star - s.best_utility) / std::abs(g_star));
    for (const auto& t : s.trace) {
      ++rounds;
      if (t.dual_value < g_star - 1e-9) ++dual_violations;
    }
  }
  const double secs = seconds_since(t0);
  report("oracle_gap", within >= 90 && above == 0 && max_options <= 8 && max_enum <= 16'777'216 && secs <= 300.0,
         fmt("within 5%%: %zu/%zu, above G*: %zu, worst gap %.3f%%, max options %zu, max enumerated %llu, %.1fs",
             within, n, above, 100.0 * worst_gap, max_options, static_cast<unsigned long long>(max_enum), secs));
  report("weak_duality", dual_violations == 0,
         fmt("%zu violations over %zu traced rounds of %zu runs", dual_violations, rounds, n));
}

void subgradient_criterion() {
  ExperimentConfig c;
  c.scenario = small_oracle_scenario();
  c.seed = kSeed + 1;
  std::mt19937_64 rng(kSeed + 1);
  std::normal_distribution<double> price(0.0, 2.0);
  std::size_t violations = 0;
  double worst = 0.0;
  const std::size_t pairs = 1000;
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto d = make_drop(c, i % 50);
    const auto m = d.rates.dims().priced_count();
    Prices a(m), b(m);
    for (auto& x : a) x = price(rng);
    for (auto& x : b) x = price(rng);
    const auto g = dual_subgradient(a, d.rates);
    double inner = 0.0;
    for (std::size_t p = 0; p < m; ++p) inner += g[p] * (b[p] - a[p]);
    const double slack = dual_value(b, d.rates) - (dual_value(a, d.rates) + inner);
    worst = std::min(worst, slack);
    if (slack < -1e-9) ++violations;
  }
  report("subgradient_validity", violations == 0,
         fmt("%zu violations over %zu (mu, mu') pairs, min slack %.3g", violations, pairs, worst));
}

void rate_bias_criterion() {
  ExperimentConfig c;
  c.seed = kSeed + 2;
  c.drops = 50;
  c.schemes = {Scheme::MaxUtility, Scheme::RateBias};
  const auto r = run_experiment(c);
  std::size_t receivers = 0, matched = 0;
  for (const auto& d : r.drops) {
    const auto& mu = d.find(Scheme::MaxUtility)->assignment;
    const auto& rb = d.find(Scheme::RateBias)->assignment;
    for (std::size_t k = 0; k < mu.size(); ++k) {
      ++receivers;
      if (mu[k] == rb[k]) ++matched;
    }
  }
  report("rate_bias_equivalence", matched == receivers,
         fmt("%zu/%zu receivers identical over %zu drops", matched, receivers, r.drops.size()));
}

// One 50-drop default-scenario run at eta = 0.5 feeds the load-balancing,
// macrotier and convergence checks.
void default_scenario_criteria() {
  const auto t0 = Clock::now();
  ExperimentConfig c;
  c.seed = kSeed + 3;
  c.drops = 50;
  c.partition.eta = 0.5;
  const auto r = run_experiment(c);
  const double secs = seconds_since(t0);

  auto jain = [&](Scheme s) { return r.series(s, [](const MetricsReport& m) { return m.jain; }); };
  const auto sb = jain(Scheme::SinrBias), mu = jain(Scheme::MaxUtility), mr = jain(Scheme::MaxRate),
             ms = jain(Scheme::MaxSinr);
  const auto d1 = paired(sb, mu), d2 = paired(mu, mr), d3 = paired(mr, ms);
  const bool order = d1.mean > 2.0 * d1.stderr_ && d2.mean > 2.0 * d2.stderr_ && d3.mean > 2.0 * d3.stderr_;
  report("load_balancing_trend", order && secs <= 600.0,
         fmt("LBI SINR_BIAS %.4f, MAX_UTILITY %.4f, MAX_RATE %.4f, MAX_SINR %.4f; paired gaps "
             "%.4f (se %.4f), %.4f (se %.4f), %.4f (se %.4f); %.1fs",
             mean_stderr(sb).mean, mean_stderr(mu).mean, mean_stderr(mr).mean, mean_stderr(ms).mean, d1.mean,
             d1.stderr_, d2.mean, d2.stderr_, d3.mean, d3.stderr_, secs));

  auto macro_share = [&](Scheme s) {
    double macro = 0.0, total = 0.0;
    for (const auto& d : r.drops) {
      const auto& t = d.find(s)->metrics.tier_loads;
      macro += static_cast<double>(t.macrotier_users);
      total += static_cast<double>(t.total());
    }
    return macro / total;
  };
  const double share_ms = macro_share(Scheme::MaxSinr), share_mu = macro_share(Scheme::MaxUtility);
  report("macrotier_dominance", share_ms >= 0.70 && share_ms - share_mu >= 0.15,
         fmt("macro share MAX_SINR %.1f%% (need >= 70%%), MAX_UTILITY %.1f%%, drop %.1f points (need >= 15)",
             100.0 * share_ms, 100.0 * share_mu, 100.0 * (share_ms - share_mu)));

  // Convergence within 100 rounds: rerun the solver with the 100-round cap.
  auto solver = c.solver;
  solver.max_iterations = 100;
  solver.keep_price_history = false;
  std::size_t converged = 0;
  double used = 0.0;
  for (const auto& d : r.drops) {
    const auto inst = make_drop(c, d.drop);
    const auto s = solve_max_utility(inst.rates, solver);
    if (s.converged) ++converged;
    used += static_cast<double>(s.iterations_used);
  }
  report("convergence", converged >= 45,
         fmt("%zu/%zu drops settled within 100 rounds, mean %.1f rounds", converged, r.drops.size(),
             used / static_cast<double>(r.drops.size())));
}

void partitioning_criterion() {
  ExperimentConfig c;
  c.seed = kSeed + 4;
  c.drops = 50;
  c.schemes = {Scheme::MaxUtility};
  c.target_rates_bps = {0.5e6};
  const auto etas = default_eta_grid();
  const auto points = sweep_eta(c, etas);
  auto cov = [](const RunReport& p) {
    return p.series(Scheme::MaxUtility, [](const MetricsReport& m) { return m.coverage[0].second; });
  };
  const auto base = cov(points.front());
  std::string curve;
  double peak = -1.0;
  bool interior_gain = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto v = cov(points[i]);
    const double m = mean_stderr(v).mean;
    peak = std::max(peak, m);
    curve += fmt("%s%.1f:%.3f", i ? " " : "", etas[i], m);
    if (i > 0 && i + 1 < points.size()) {
      const auto gain = paired(v, base);
      if (gain.mean >= 2.0 * gain.stderr_ && gain.mean > 0.0) interior_gain = true;
    }
  }
  const double last = mean_stderr(cov(points.back())).mean;
  report("partitioning_gain", interior_gain && last < peak,
         fmt("coverage at 0.5 Mbps by eta [%s]", curve.c_str()));
}

void invariant_criterion() {
  std::mt19937_64 rng(kSeed + 5);
  std::size_t failures = 0, checks = 0;
  auto check = [&](bool ok) {
    ++checks;
    if (!ok) ++failures;
  };

  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> v(1 + static_cast<std::size_t>(u(rng) * 30));
    for (auto& y : v) y = 20.0 * u(rng);
    const double j = jain_index(v);
    check(j >= 1.0 / static_cast<double>(v.size()) - 1e-12 && j <= 1.0 + 1e-12);
    auto w = v;
    const double c = 0.01 + 100.0 * u(rng);
    for (auto& y : w) y *= c;
    check(std::abs(jain_index(w) - j) <= 1e-12);

    std::vector<double> s(1 + static_cast<std::size_t>(u(rng) * 60));
    for (auto& r : s) r = 1e7 * u(rng);
    std::vector<double> grid{0.0};
    for (int g = 0; g < 20; ++g) grid.push_back(1e7 * u(rng));
    grid.push_back(*std::max_element(s.begin(), s.end()));
    std::sort(grid.begin(), grid.end());
    const auto cdf = rate_cdf(s, grid);
    check(cdf.back().probability == 1.0);
    for (std::size_t i = 1; i < cdf.size(); ++i) check(cdf[i].probability >= cdf[i - 1].probability);

    PartitionConfig part;
    part.system_bandwidth_hz = 1e6 + 1e8 * u(rng);
    part.eta = u(rng);
    const double sum =
        part.bandwidth(Subband::Shared) + part.bandwidth(Subband::PicoOnly) + part.bandwidth(Subband::D2D);
    check(std::abs(sum - part.system_bandwidth_hz) <= 1e-9 * part.system_bandwidth_hz);

    RadioConfig radio;
    radio.mbs_power_dbm = 50.0 * u(rng);
    radio.pbs_power_dbm = 50.0 * u(rng);
    radio.d2d_tx_power_dbm = 50.0 * u(rng);
    const NetworkDims dims{static_cast<std::size_t>(1 + t % 3), static_cast<std::size_t>(t % 4), static_cast<std::size_t>(t % 5), 0};
    const auto p = allocate_power(dims, radio);
    for (std::size_t n = 0; n < dims.tx_count(); ++n) {
      const double nominal = dims.is_mbs(n)   ? radio.mbs_power_dbm
                             : dims.is_pbs(n) ? radio.pbs_power_dbm
                                              : radio.d2d_tx_power_dbm;
      check(std::abs(p.total(n) / dbm_to_mw(nominal) - 1.0) <= 1e-12);
    }
  }

  ExperimentConfig c;
  c.seed = kSeed + 5;
  c.scenario = small_oracle_scenario();
  c.scenario.cellular_users_per_macrocell = 8;
  c.scenario.d2d_pairs_per_macrocell = 4;
  for (std::size_t i = 0; i < 40; ++i) {
    c.partition.eta = u(rng);
    const auto d = make_drop(c, i);
    const auto r = run_drop(c, d);
    for (const auto& o : r.outcomes) {
      bool ok = true;
      try {
        check_feasible(o.assignment, d.rates);
      } catch (const std::exception&) {
        ok = false;
      }
      check(ok);
    }
  }
  report("invariant_suite", failures == 0, fmt("%zu/%zu randomized checks held", checks - failures, checks));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  oracle_criteria();
  subgradient_criterion();
  rate_bias_criterion();
  default_scenario_criteria();
  partitioning_criterion();
  invariant_criterion();
  const auto failed = std::count_if(outcomes.begin(), outcomes.end(), [](const Outcome& o) { return !o.pass; });
  std::printf("%zu/%zu criteria passed in %.1fs\n", outcomes.size() - static_cast<std::size_t>(failed),
              outcomes.size(), seconds_since(t0));
  return failed == 0 ? 0 : 1;
}
