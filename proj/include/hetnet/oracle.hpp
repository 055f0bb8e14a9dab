#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hetnet/association.hpp"

namespace hetnet {

struct OracleResult {
  Assignment best;
  double utility = -std::numeric_limits<double>::infinity();
  std::uint64_t assignments = 0;
};

/// Product of the per-receiver option counts, saturating at `cap + 1`.
inline std::uint64_t assignment_count(const RateTable& rates, std::uint64_t cap) {
  std::uint64_t product = 1;
  for (std::size_t k = 0; k < rates.dims().rx_count(); ++k) {
    product *= rates.option_count(k);
    if (product > cap) return cap + 1;
  }
  return product;
}

/// Exhaustive maximiser of the network utility for small instances.
///
/// Depth-first enumeration over receivers carrying the running log-rate sum
/// and load penalty (sum of y log y over priced pairs) by value. The first
/// maximiser in lexicographic option order wins ties.
inline OracleResult brute_force_oracle(const RateTable& rates, std::uint64_t max_assignments = 10'000'000) {
  const auto receivers = rates.dims().rx_count();
  const auto total = assignment_count(rates, max_assignments);
  if (total > max_assignments)
    throw std::length_error("brute_force_oracle: instance too large to enumerate");

  struct Option {
    Link link;
    double log_rate;
    std::ptrdiff_t price;  // -1 for D2D
  };
  std::vector<std::vector<Option>> options(receivers);
  for (std::size_t k = 0; k < receivers; ++k) {
    for (const auto& l : rates.bs_options(k))
      options[k].push_back({l, rates.log_rate(l, k), static_cast<std::ptrdiff_t>(*rates.price_index(l))});
    if (auto d2d = rates.d2d_option(k)) options[k].push_back({*d2d, rates.log_rate(*d2d, k), -1});
  }

  // y log y for integer loads
  std::vector<double> ylogy(receivers + 2, 0.0);
  for (std::size_t y = 2; y < ylogy.size(); ++y) ylogy[y] = static_cast<double>(y) * std::log(static_cast<double>(y));

  OracleResult result;
  result.assignments = total;
  std::vector<std::size_t> load(rates.dims().priced_count(), 0);
  std::vector<std::size_t> pick(receivers, 0);
  std::vector<std::size_t> best_pick;

  auto visit = [&](auto&& self, std::size_t k, double rate_sum, double penalty) -> void {
    if (k == receivers) {
      const double value = rate_sum - penalty;
      if (value > result.utility) {
        result.utility = value;
        best_pick = pick;
      }
      return;
    }
    for (std::size_t i = 0; i < options[k].size(); ++i) {
      const auto& o = options[k][i];
      pick[k] = i;
      if (o.price < 0) {
        self(self, k + 1, rate_sum + o.log_rate, penalty);
      } else {
        auto& y = load[static_cast<std::size_t>(o.price)];
        const double step = ylogy[y + 1] - ylogy[y];
        ++y;
        self(self, k + 1, rate_sum + o.log_rate, penalty + step);
        --y;
      }
    }
  };
  visit(visit, 0, 0.0, 0.0);

  result.best.resize(receivers);
  for (std::size_t k = 0; k < receivers; ++k) result.best[k] = options[k][best_pick[k]].link;
  return result;
}

}  // namespace hetnet
