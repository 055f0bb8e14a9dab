#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "hetnet/association.hpp"

namespace hetnet {

enum class Tier : std::uint8_t { Macro, Pico, D2D };

inline const char* to_string(Tier t) {
  switch (t) {
    case Tier::Macro: return "macro";
    case Tier::Pico: return "pico";
    case Tier::D2D: return "d2d";
  }
  return "?";
}

inline Tier serving_tier(const NetworkDims& dims, Link l) {
  if (dims.is_mbs(l.tx)) return Tier::Macro;
  if (dims.is_pbs(l.tx)) return Tier::Pico;
  return Tier::D2D;
}

struct TierLoads {
  std::size_t macrotier_users = 0;
  std::size_t picotier_users = 0;
  std::size_t d2d_mode_users = 0;

  std::size_t total() const { return macrotier_users + picotier_users + d2d_mode_users; }
};

struct D2dCounts {
  std::size_t rx_on_bs = 0;
  std::size_t rx_on_tx = 0;
};

struct RateSample {
  std::size_t receiver = 0;
  RxRole role = RxRole::Cellular;
  Tier tier = Tier::Macro;
  double rate_bps = 0.0;
};

/// Per-receiver effective rate: achievable rate over the realised load of
/// the serving (transmitter, subband). D2D links always carry load 1.
inline std::vector<RateSample> effective_rates(const Assignment& x, const RateTable& rates) {
  check_feasible(x, rates);
  const auto& dims = rates.dims();
  const auto demand = priced_demand(x, rates);
  std::vector<RateSample> samples(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto p = rates.price_index(x[k]);
    const double load = p ? demand[*p] : 1.0;
    samples[k] = {k, dims.rx_node(k).role, serving_tier(dims, x[k]), rates.rate(x[k], k) / load};
  }
  return samples;
}

/// Total receivers per BS (all subbands), MBSs then PBSs.
inline std::vector<double> bs_loads(const Assignment& x, const NetworkDims& dims) {
  std::vector<double> load(dims.bs_count(), 0.0);
  for (const auto& l : x)
    if (dims.is_bs(l.tx)) load[l.tx] += 1.0;
  return load;
}

/// Jain's fairness index over non-negative loads. An all-zero vector is
/// reported as perfectly balanced.
inline double jain_index(std::span<const double> loads) {
  if (loads.empty()) throw std::invalid_argument("jain_index: empty BS set");
  double sum = 0.0;
  double squares = 0.0;
  for (double y : loads) {
    if (y < 0.0) throw std::invalid_argument("jain_index: negative load");
    sum += y;
    squares += y * y;
  }
  if (squares == 0.0) return 1.0;
  return sum * sum / (static_cast<double>(loads.size()) * squares);
}

/// Fraction of samples strictly above `rho`.
inline double coverage_probability(std::span<const double> rates_bps, double rho) {
  if (rates_bps.empty()) throw std::invalid_argument("coverage_probability: no samples");
  const auto above = std::count_if(rates_bps.begin(), rates_bps.end(), [&](double r) { return r > rho; });
  return static_cast<double>(above) / static_cast<double>(rates_bps.size());
}

struct CdfPoint {
  double rate_bps;
  double probability;
};

/// Empirical P[R <= g] at each grid point.
inline std::vector<CdfPoint> rate_cdf(std::span<const double> rates_bps, std::span<const double> grid) {
  if (rates_bps.empty() || grid.empty()) throw std::invalid_argument("rate_cdf: empty input");
  if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("rate_cdf: grid must be sorted");
  std::vector<double> sorted(rates_bps.begin(), rates_bps.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<CdfPoint> cdf;
  cdf.reserve(grid.size());
  for (double g : grid) {
    const auto at_most = std::upper_bound(sorted.begin(), sorted.end(), g) - sorted.begin();
    cdf.push_back({g, static_cast<double>(at_most) / static_cast<double>(sorted.size())});
  }
  return cdf;
}

inline std::pair<TierLoads, D2dCounts> tier_and_d2d_counts(const Assignment& x, const NetworkDims& dims) {
  TierLoads tiers;
  D2dCounts d2d;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto tier = serving_tier(dims, x[k]);
    if (tier == Tier::Macro) ++tiers.macrotier_users;
    else if (tier == Tier::Pico) ++tiers.picotier_users;
    else ++tiers.d2d_mode_users;
    if (dims.rx_node(k).role == RxRole::D2dRx) {
      if (tier == Tier::D2D) ++d2d.rx_on_tx;
      else ++d2d.rx_on_bs;
    }
  }
  return {tiers, d2d};
}

struct MetricsReport {
  TierLoads tier_loads;
  D2dCounts d2d_counts;
  double jain = 1.0;
  bool jain_degenerate = false;  // every BS load was zero
  std::vector<RateSample> effective_rate_samples;
  std::vector<std::pair<double, double>> coverage;  // (rho bps, probability)
  double sum_utility = 0.0;
};

inline std::vector<double> sample_rates(std::span<const RateSample> samples) {
  std::vector<double> r(samples.size());
  std::transform(samples.begin(), samples.end(), r.begin(), [](const RateSample& s) { return s.rate_bps; });
  return r;
}

inline MetricsReport evaluate_metrics(const Assignment& x, const RateTable& rates,
                                      std::span<const double> target_rates) {
  MetricsReport report;
  const auto& dims = rates.dims();
  std::tie(report.tier_loads, report.d2d_counts) = tier_and_d2d_counts(x, dims);
  const auto loads = bs_loads(x, dims);
  report.jain = jain_index(loads);
  report.jain_degenerate = std::all_of(loads.begin(), loads.end(), [](double y) { return y == 0.0; });
  report.effective_rate_samples = effective_rates(x, rates);
  const auto r = sample_rates(report.effective_rate_samples);
  for (double rho : target_rates) report.coverage.emplace_back(rho, coverage_probability(r, rho));
  report.sum_utility = primal_utility(x, rates);
  return report;
}

}  // namespace hetnet
