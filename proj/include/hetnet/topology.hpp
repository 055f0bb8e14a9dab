#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetnet {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Deployment knobs for one random drop. Macrocells are squares of side
/// `inter_site_distance` centred on a regular grid of MBSs.
struct ScenarioConfig {
  std::size_t macro_rows = 2;
  std::size_t macro_cols = 2;
  double inter_site_distance = 1000.0;  // m
  std::size_t pbs_per_macrocell = 4;
  std::size_t cellular_users_per_macrocell = 30;
  std::size_t d2d_pairs_per_macrocell = 15;
  double d2d_min_distance = 10.0;  // m
  double d2d_max_distance = 50.0;  // m
  double min_user_bs_distance = 10.0;  // m
  std::uint64_t rng_seed = 1;

  void validate() const {
    if (macro_rows == 0 || macro_cols == 0)
      throw std::invalid_argument("scenario: macro grid must have at least one MBS");
    if (!(inter_site_distance > 0.0))
      throw std::invalid_argument("scenario: inter_site_distance must be positive");
    if (!(d2d_min_distance > 0.0 && d2d_min_distance < d2d_max_distance))
      throw std::invalid_argument("scenario: need 0 < d2d_min_distance < d2d_max_distance");
    if (!(min_user_bs_distance >= 0.0))
      throw std::invalid_argument("scenario: min_user_bs_distance must be non-negative");
  }

  std::size_t macrocell_count() const { return macro_rows * macro_cols; }
};

enum class TxRole : std::uint8_t { Mbs, Pbs, D2dTx };
enum class RxRole : std::uint8_t { Cellular, D2dTx, D2dRx };

inline const char* to_string(RxRole role) {
  switch (role) {
    case RxRole::Cellular: return "cellular";
    case RxRole::D2dTx: return "d2d_tx";
    case RxRole::D2dRx: return "d2d_rx";
  }
  return "?";
}

template <class Role>
struct NodeIndex {
  Role role;
  std::size_t ordinal;

  friend bool operator==(const NodeIndex&, const NodeIndex&) = default;
};

using TxIndex = NodeIndex<TxRole>;
using RxIndex = NodeIndex<RxRole>;

/// Flat index spaces shared by every table in the library.
///
/// Transmitters are ordered MBSs, PBSs, D2D TXs. Receivers are ordered
/// cellular users, D2D TXs (as receivers of BSs), D2D RXs. Priced pairs
/// (the load constraints carrying a multiplier) are subband 1 of every BS
/// followed by subband 2 of every PBS.
struct NetworkDims {
  std::size_t mbs = 0;
  std::size_t pbs = 0;
  std::size_t pairs = 0;
  std::size_t cellular = 0;

  friend bool operator==(const NetworkDims&, const NetworkDims&) = default;

  std::size_t bs_count() const { return mbs + pbs; }
  std::size_t tx_count() const { return mbs + pbs + pairs; }
  std::size_t rx_count() const { return cellular + 2 * pairs; }
  std::size_t priced_count() const { return mbs + 2 * pbs; }

  std::size_t mbs_tx(std::size_t i) const { return i; }
  std::size_t pbs_tx(std::size_t i) const { return mbs + i; }
  std::size_t d2d_tx(std::size_t i) const { return mbs + pbs + i; }
  std::size_t cellular_rx(std::size_t i) const { return i; }
  std::size_t d2d_tx_rx(std::size_t i) const { return cellular + i; }
  std::size_t d2d_rx(std::size_t i) const { return cellular + pairs + i; }

  bool is_bs(std::size_t tx) const { return tx < mbs + pbs; }
  bool is_mbs(std::size_t tx) const { return tx < mbs; }
  bool is_pbs(std::size_t tx) const { return tx >= mbs && tx < mbs + pbs; }
  bool is_d2d_tx(std::size_t tx) const { return tx >= mbs + pbs && tx < tx_count(); }

  TxIndex tx_node(std::size_t n) const {
    if (n < mbs) return {TxRole::Mbs, n};
    if (n < mbs + pbs) return {TxRole::Pbs, n - mbs};
    if (n < tx_count()) return {TxRole::D2dTx, n - mbs - pbs};
    throw std::out_of_range("transmitter index " + std::to_string(n));
  }

  RxIndex rx_node(std::size_t k) const {
    if (k < cellular) return {RxRole::Cellular, k};
    if (k < cellular + pairs) return {RxRole::D2dTx, k - cellular};
    if (k < rx_count()) return {RxRole::D2dRx, k - cellular - pairs};
    throw std::out_of_range("receiver index " + std::to_string(k));
  }
};

struct NetworkLayout {
  std::vector<Point> mbs_positions;
  std::vector<Point> pbs_positions;
  std::vector<Point> cellular_user_positions;
  std::vector<Point> d2d_tx_positions;
  std::vector<Point> d2d_rx_positions;
  /// pair_map[rx ordinal] = ordinal of the D2D TX serving that RX.
  std::vector<std::size_t> pair_map;

  // Macrocell each scattered node was drawn into (row-major grid index).
  std::vector<std::size_t> pbs_cell;
  std::vector<std::size_t> cellular_user_cell;
  std::vector<std::size_t> d2d_pair_cell;

  friend bool operator==(const NetworkLayout&, const NetworkLayout&) = default;

  NetworkDims dims() const {
    return {mbs_positions.size(), pbs_positions.size(), d2d_tx_positions.size(),
            cellular_user_positions.size()};
  }

  Point tx_position(std::size_t n) const {
    const auto node = dims().tx_node(n);
    switch (node.role) {
      case TxRole::Mbs: return mbs_positions[node.ordinal];
      case TxRole::Pbs: return pbs_positions[node.ordinal];
      case TxRole::D2dTx: return d2d_tx_positions[node.ordinal];
    }
    return {};
  }

  Point rx_position(std::size_t k) const {
    const auto node = dims().rx_node(k);
    switch (node.role) {
      case RxRole::Cellular: return cellular_user_positions[node.ordinal];
      case RxRole::D2dTx: return d2d_tx_positions[node.ordinal];
      case RxRole::D2dRx: return d2d_rx_positions[node.ordinal];
    }
    return {};
  }
};

/// Axis-aligned square macrocell `cell` (row-major) of the grid.
struct CellRegion {
  Point centre;
  double half_side;

  bool contains(Point p) const {
    return std::abs(p.x - centre.x) <= half_side && std::abs(p.y - centre.y) <= half_side;
  }
};

inline CellRegion macrocell_region(const ScenarioConfig& config, std::size_t cell) {
  const auto row = cell / config.macro_cols;
  const auto col = cell % config.macro_cols;
  return {{static_cast<double>(col) * config.inter_site_distance,
           static_cast<double>(row) * config.inter_site_distance},
          config.inter_site_distance / 2.0};
}

namespace detail {

inline constexpr int kMaxPlacementAttempts = 100000;

inline bool clear_of(Point p, const std::vector<Point>& sites, double radius) {
  for (const auto& s : sites)
    if (distance(p, s) < radius) return false;
  return true;
}

}  // namespace detail

/// Draws one random deployment. Identical configs (seed included) yield
/// identical layouts.
inline NetworkLayout generate_layout(const ScenarioConfig& config) {
  config.validate();

  std::mt19937_64 rng(config.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  NetworkLayout layout;
  const auto cells = config.macrocell_count();

  for (std::size_t c = 0; c < cells; ++c)
    layout.mbs_positions.push_back(macrocell_region(config, c).centre);

  auto uniform_in = [&](const CellRegion& region) {
    const double x = region.centre.x + (2.0 * unit(rng) - 1.0) * region.half_side;
    const double y = region.centre.y + (2.0 * unit(rng) - 1.0) * region.half_side;
    return Point{x, y};
  };

  for (std::size_t c = 0; c < cells; ++c) {
    const auto region = macrocell_region(config, c);
    for (std::size_t i = 0; i < config.pbs_per_macrocell; ++i) {
      layout.pbs_positions.push_back(uniform_in(region));
      layout.pbs_cell.push_back(c);
    }
  }

  std::vector<Point> bs_sites = layout.mbs_positions;
  bs_sites.insert(bs_sites.end(), layout.pbs_positions.begin(), layout.pbs_positions.end());
  const double exclusion = config.min_user_bs_distance;

  auto draw_user = [&](const CellRegion& region) {
    for (int attempt = 0; attempt < detail::kMaxPlacementAttempts; ++attempt) {
      const auto p = uniform_in(region);
      if (detail::clear_of(p, bs_sites, exclusion)) return p;
    }
    throw std::runtime_error("generate_layout: could not place a user clear of every BS; "
                             "min_user_bs_distance is infeasible for this cell size");
  };

  for (std::size_t c = 0; c < cells; ++c) {
    const auto region = macrocell_region(config, c);
    for (std::size_t i = 0; i < config.cellular_users_per_macrocell; ++i) {
      layout.cellular_user_positions.push_back(draw_user(region));
      layout.cellular_user_cell.push_back(c);
    }
  }

  for (std::size_t c = 0; c < cells; ++c) {
    const auto region = macrocell_region(config, c);
    for (std::size_t i = 0; i < config.d2d_pairs_per_macrocell; ++i) {
      bool placed = false;
      for (int attempt = 0; attempt < detail::kMaxPlacementAttempts && !placed; ++attempt) {
        const auto tx = draw_user(region);
        const double angle = 2.0 * std::numbers::pi * unit(rng);
        const double reach =
            config.d2d_min_distance + (config.d2d_max_distance - config.d2d_min_distance) * unit(rng);
        const Point rx{tx.x + reach * std::cos(angle), tx.y + reach * std::sin(angle)};
        if (!region.contains(rx) || !detail::clear_of(rx, bs_sites, exclusion)) continue;
        // cos/sin rounding can push the realised length a hair outside the range
        const double realised = distance(tx, rx);
        if (realised < config.d2d_min_distance || realised > config.d2d_max_distance) continue;
        layout.pair_map.push_back(layout.d2d_tx_positions.size());
        layout.d2d_tx_positions.push_back(tx);
        layout.d2d_rx_positions.push_back(rx);
        layout.d2d_pair_cell.push_back(c);
        placed = true;
      }
      if (!placed) throw std::runtime_error("generate_layout: could not place a D2D pair");
    }
  }

  return layout;
}

}  // namespace hetnet
