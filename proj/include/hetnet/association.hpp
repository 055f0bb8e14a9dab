#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hetnet/phy.hpp"

namespace hetnet {

/// One serving link per receiver, indexed by receiver. Holding a single link
/// per receiver enforces the one-association constraint by construction.
using Assignment = std::vector<Link>;

/// Multipliers over the priced pairs of a RateTable (see RateTable::price_index).
using Prices = std::vector<double>;

struct SolverConfig {
  double stepsize = 0.01;
  std::size_t max_iterations = 500;
  double convergence_tol = 1e-3;
  std::size_t convergence_window = 10;
  double mu_init = 0.0;
  bool keep_price_history = true;  // store mu and demand in every trace record

  void validate() const {
    if (!(stepsize > 0.0)) throw std::invalid_argument("solver: stepsize must be positive");
    if (max_iterations < 1) throw std::invalid_argument("solver: max_iterations must be >= 1");
    if (!(convergence_tol >= 0.0)) throw std::invalid_argument("solver: convergence_tol must be >= 0");
    if (convergence_window < 2) throw std::invalid_argument("solver: convergence_window must be >= 2");
  }
};

/// Receiver-side selection skeleton shared by every association scheme.
///
/// Scans the BS options in (transmitter, subband) order keeping the first
/// strict maximum of `bs_score`, then for a D2D RX switches to its own TX
/// iff the best BS score is strictly below `d2d_score`.
template <class BsScore, class D2dScore>
Link select_link(const RateTable& rates, std::size_t rx, BsScore&& bs_score, D2dScore&& d2d_score) {
  const auto& options = rates.bs_options(rx);
  if (options.empty()) throw std::logic_error("select_link: receiver has no BS option");
  Link best = options.front();
  double best_score = bs_score(best);
  for (std::size_t i = 1; i < options.size(); ++i) {
    const double score = bs_score(options[i]);
    if (score > best_score) {
      best_score = score;
      best = options[i];
    }
  }
  if (auto d2d = rates.d2d_option(rx)) {
    if (best_score < d2d_score(*d2d)) best = *d2d;
  }
  return best;
}

/// Best link of receiver `rx` under prices `mu`: argmax of c - mu over BS
/// options, with the D2D link scored by its plain log-rate.
inline Link user_choice(std::size_t rx, const RateTable& rates, const Prices& mu) {
  return select_link(
      rates, rx, [&](Link l) { return rates.log_rate(l, rx) - mu[*rates.price_index(l)]; },
      [&](Link l) { return rates.log_rate(l, rx); });
}

inline Assignment user_choices(const RateTable& rates, const Prices& mu) {
  if (mu.size() != rates.dims().priced_count())
    throw std::invalid_argument("user_choices: multiplier vector has the wrong size");
  Assignment x(rates.dims().rx_count());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = user_choice(k, rates, mu);
  return x;
}

/// Load maximising y (mu - log y).
inline double bs_load_update(double mu) { return std::exp(mu - 1.0); }

/// Subgradient step on one multiplier.
inline double bs_price_update(double mu, double load, double demand, double stepsize) {
  return mu - stepsize * (load - demand);
}

/// Number of receivers on each priced pair.
inline std::vector<double> priced_demand(const Assignment& x, const RateTable& rates) {
  std::vector<double> demand(rates.dims().priced_count(), 0.0);
  for (const auto& link : x)
    if (auto p = rates.price_index(link)) demand[*p] += 1.0;
  return demand;
}

inline void check_feasible(const Assignment& x, const RateTable& rates) {
  if (x.size() != rates.dims().rx_count())
    throw std::invalid_argument("assignment does not cover every receiver");
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k].tx >= rates.dims().tx_count() || !rates.available(x[k], k))
      throw std::invalid_argument("assignment uses an unavailable link for receiver " + std::to_string(k));
  }
}

/// Network-wide log utility of an integral assignment. Each BS link
/// contributes c - log(load); a D2D link contributes its log-rate.
inline double primal_utility(const Assignment& x, const RateTable& rates) {
  check_feasible(x, rates);
  const auto demand = priced_demand(x, rates);
  double total = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    total += rates.log_rate(x[k], k);
    if (auto p = rates.price_index(x[k])) total -= std::log(demand[*p]);
  }
  return total;
}

/// Dual function value at `mu`: the receivers' best priced scores plus the
/// closed-form load term, sum of exp(mu - 1).
inline double dual_value(const Prices& mu, const RateTable& rates) {
  if (mu.size() != rates.dims().priced_count())
    throw std::invalid_argument("dual_value: multiplier vector has the wrong size");
  double value = 0.0;
  for (std::size_t k = 0; k < rates.dims().rx_count(); ++k) {
    const Link l = user_choice(k, rates, mu);
    const auto p = rates.price_index(l);
    value += rates.log_rate(l, k) - (p ? mu[*p] : 0.0);
  }
  for (double m : mu) value += bs_load_update(m);
  return value;
}

/// Subgradient of the dual function at `mu`: optimal load minus demand per
/// priced pair.
inline std::vector<double> dual_subgradient(const Prices& mu, const RateTable& rates) {
  const auto demand = priced_demand(user_choices(rates, mu), rates);
  std::vector<double> g(mu.size());
  for (std::size_t p = 0; p < mu.size(); ++p) g[p] = bs_load_update(mu[p]) - demand[p];
  return g;
}

struct IterationRecord {
  std::size_t iteration = 0;
  double sum_utility = 0.0;  // G(x^t)
  double dual_value = 0.0;   // I(mu^t)
  double max_price_residual = 0.0;  // max |y - demand|
  Prices mu;
  std::vector<double> demand;
};

struct SolveResult {
  Assignment final_x;  // best-primal iterate
  double best_utility = -std::numeric_limits<double>::infinity();
  std::size_t best_iteration = 0;
  Prices best_mu;   // prices that produced final_x
  Prices final_mu;  // prices after the last update
  std::vector<IterationRecord> trace;
  bool converged = false;
  std::size_t iterations_used = 0;
};

namespace detail {

inline bool window_settled(const std::vector<IterationRecord>& trace, std::size_t window, double tol) {
  if (trace.size() < window) return false;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (auto it = trace.end() - static_cast<std::ptrdiff_t>(window); it != trace.end(); ++it) {
    lo = std::min(lo, it->sum_utility);
    hi = std::max(hi, it->sum_utility);
  }
  const double scale = std::abs(trace.back().sum_utility);
  return hi - lo <= tol * scale;
}

inline bool single_feasible_point(const RateTable& rates) {
  for (std::size_t k = 0; k < rates.dims().rx_count(); ++k)
    if (rates.option_count(k) != 1) return false;
  return true;
}

}  // namespace detail

/// Synchronous-round dual subgradient solver for the max-utility association.
///
/// Each round the receivers answer the broadcast prices, BSs aggregate
/// demand, set their loads to exp(mu - 1) and take a constant-step price
/// step. Stops after `max_iterations` rounds or once the sum utility of the
/// last `convergence_window` rounds spans at most `convergence_tol` times
/// its magnitude. Returns the round with the highest sum utility.
inline SolveResult solve_max_utility(const RateTable& rates, const SolverConfig& cfg) {
  cfg.validate();
  const auto priced = rates.dims().priced_count();
  const auto receivers = rates.dims().rx_count();
  const bool trivial = detail::single_feasible_point(rates);

  SolveResult result;
  Prices mu(priced, cfg.mu_init);
  Assignment x(receivers);
  std::vector<double> demand(priced);

  for (std::size_t t = 0; t < cfg.max_iterations; ++t) {
    std::fill(demand.begin(), demand.end(), 0.0);
    double user_side = 0.0;
    for (std::size_t k = 0; k < receivers; ++k) {
      x[k] = user_choice(k, rates, mu);
      const auto p = rates.price_index(x[k]);
      user_side += rates.log_rate(x[k], k) - (p ? mu[*p] : 0.0);
      if (p) demand[*p] += 1.0;
    }

    double utility = 0.0;
    for (std::size_t k = 0; k < receivers; ++k) {
      utility += rates.log_rate(x[k], k);
      if (auto p = rates.price_index(x[k])) utility -= std::log(demand[*p]);
    }
    if (!std::isfinite(utility))
      throw std::runtime_error("solve_max_utility: non-finite utility (corrupt rate table)");

    if (utility > result.best_utility) {
      result.best_utility = utility;
      result.best_iteration = t;
      result.final_x = x;
      result.best_mu = mu;
    }

    IterationRecord record;
    record.iteration = t;
    record.sum_utility = utility;
    record.dual_value = user_side;
    if (cfg.keep_price_history) {
      record.mu = mu;
      record.demand = demand;
    }

    for (std::size_t p = 0; p < priced; ++p) {
      const double load = bs_load_update(mu[p]);
      record.dual_value += load;
      record.max_price_residual = std::max(record.max_price_residual, std::abs(load - demand[p]));
      mu[p] = bs_price_update(mu[p], load, demand[p], cfg.stepsize);
    }
    result.trace.push_back(std::move(record));

    if (trivial || detail::window_settled(result.trace, cfg.convergence_window, cfg.convergence_tol)) {
      result.converged = true;
      break;
    }
  }

  result.final_mu = mu;
  result.iterations_used = result.trace.size();
  return result;
}

}  // namespace hetnet
