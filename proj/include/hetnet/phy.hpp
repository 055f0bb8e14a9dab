#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hetnet/channel.hpp"
#include "hetnet/topology.hpp"

namespace hetnet {

/// The three partitioned subbands. Subband 1 is shared by MBSs and PBSs,
/// subband 2 is PBS-only and subband 3 carries D2D links.
enum class Subband : std::uint8_t { Shared = 0, PicoOnly = 1, D2D = 2 };

inline constexpr std::size_t kSubbandCount = 3;
inline constexpr std::array<Subband, kSubbandCount> kAllSubbands{Subband::Shared, Subband::PicoOnly,
                                                                 Subband::D2D};

inline constexpr std::size_t index_of(Subband s) { return static_cast<std::size_t>(s); }
/// 1-based label used in files and reports.
inline constexpr int subband_number(Subband s) { return static_cast<int>(s) + 1; }

inline Subband subband_from_number(int number) {
  if (number < 1 || number > 3) throw std::invalid_argument("subband number out of range");
  return static_cast<Subband>(number - 1);
}

/// A (transmitter, subband) pair a receiver can be served on.
struct Link {
  std::uint32_t tx = 0;
  Subband band = Subband::Shared;

  friend bool operator==(const Link&, const Link&) = default;
};

struct PartitionConfig {
  double system_bandwidth_hz = 10e6;
  double prb_bandwidth_hz = 180e3;
  double eta = 0.5;

  void validate() const {
    if (!(prb_bandwidth_hz > 0.0 && system_bandwidth_hz > prb_bandwidth_hz))
      throw std::invalid_argument("partition: need system bandwidth > PRB bandwidth > 0");
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("partition: eta must lie in [0, 1]");
  }

  double w1() const { return system_bandwidth_hz - prb_bandwidth_hz; }
  double w2() const { return prb_bandwidth_hz; }

  double bandwidth(Subband s) const {
    switch (s) {
      case Subband::Shared: return (1.0 - eta) * w1();
      case Subband::PicoOnly: return eta * w1();
      case Subband::D2D: return w2();
    }
    return 0.0;
  }
};

struct RadioConfig {
  double mbs_power_dbm = 46.0;
  double pbs_power_dbm = 30.0;
  double d2d_tx_power_dbm = 20.0;
  double noise_psd_dbm_hz = -174.0;
  double rate_floor_bps = 1e-20;

  void validate() const {
    if (!(rate_floor_bps > 0.0)) throw std::invalid_argument("radio: rate floor must be positive");
  }
};

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

/// Transmit power in mW per (transmitter, subband).
class PowerAllocation {
 public:
  PowerAllocation() = default;
  PowerAllocation(NetworkDims dims, std::vector<double> power_mw)
      : dims_(dims), p_(std::move(power_mw)) {
    if (p_.size() != dims_.tx_count() * kSubbandCount)
      throw std::invalid_argument("PowerAllocation: table size does not match dimensions");
  }

  const NetworkDims& dims() const { return dims_; }
  double operator()(std::size_t tx, Subband s) const { return p_[tx * kSubbandCount + index_of(s)]; }
  const std::vector<double>& raw() const { return p_; }

  double total(std::size_t tx) const {
    double sum = 0.0;
    for (auto s : kAllSubbands) sum += (*this)(tx, s);
    return sum;
  }

  friend bool operator==(const PowerAllocation&, const PowerAllocation&) = default;

 private:
  NetworkDims dims_;
  std::vector<double> p_;
};

/// Equal power over the subbands each transmitter employs: MBSs use subband
/// 1, PBSs split across subbands 1 and 2, D2D TXs use subband 3.
inline PowerAllocation allocate_power(const NetworkDims& dims, const RadioConfig& radio) {
  std::vector<double> p(dims.tx_count() * kSubbandCount, 0.0);
  auto at = [&](std::size_t n, Subband s) -> double& { return p[n * kSubbandCount + index_of(s)]; };
  for (std::size_t i = 0; i < dims.mbs; ++i) at(dims.mbs_tx(i), Subband::Shared) = dbm_to_mw(radio.mbs_power_dbm);
  for (std::size_t i = 0; i < dims.pbs; ++i) {
    const double half = dbm_to_mw(radio.pbs_power_dbm) / 2.0;
    at(dims.pbs_tx(i), Subband::Shared) = half;
    at(dims.pbs_tx(i), Subband::PicoOnly) = half;
  }
  for (std::size_t i = 0; i < dims.pairs; ++i) at(dims.d2d_tx(i), Subband::D2D) = dbm_to_mw(radio.d2d_tx_power_dbm);
  return {dims, std::move(p)};
}

inline PowerAllocation allocate_power(const NetworkLayout& layout, const RadioConfig& radio) {
  return allocate_power(layout.dims(), radio);
}

/// SINR, achievable rate and log-rate over every (transmitter, subband,
/// receiver) triple, plus the availability mask and the per-receiver option
/// lists derived from it.
///
/// Unavailable triples carry sinr = 0, rate = rate floor and a NaN log-rate,
/// so any solver that reads past the mask produces a non-finite utility.
class RateTable {
 public:
  RateTable() = default;

  RateTable(NetworkDims dims, std::vector<std::size_t> pair_map, double rate_floor)
      : dims_(dims),
        pair_map_(std::move(pair_map)),
        rate_floor_(rate_floor),
        available_(size(), 0),
        sinr_(size(), 0.0),
        rate_(size(), rate_floor),
        log_rate_(size(), std::numeric_limits<double>::quiet_NaN()) {
    if (pair_map_.size() != dims_.pairs)
      throw std::invalid_argument("RateTable: pair map size does not match pair count");
    std::vector<bool> seen(dims_.pairs, false);
    for (auto tx : pair_map_) {
      if (tx >= dims_.pairs || seen[tx]) throw std::invalid_argument("RateTable: pair map is not a bijection");
      seen[tx] = true;
    }
    mark_structural_availability();
  }

  const NetworkDims& dims() const { return dims_; }
  const std::vector<std::size_t>& pair_map() const { return pair_map_; }
  double rate_floor() const { return rate_floor_; }

  std::size_t slot(std::size_t tx, Subband s, std::size_t rx) const {
    return (tx * kSubbandCount + index_of(s)) * dims_.rx_count() + rx;
  }
  std::size_t size() const { return dims_.tx_count() * kSubbandCount * dims_.rx_count(); }

  bool available(std::size_t tx, Subband s, std::size_t rx) const { return available_[slot(tx, s, rx)] != 0; }
  double sinr(std::size_t tx, Subband s, std::size_t rx) const { return sinr_[slot(tx, s, rx)]; }
  double rate(std::size_t tx, Subband s, std::size_t rx) const { return rate_[slot(tx, s, rx)]; }
  double log_rate(std::size_t tx, Subband s, std::size_t rx) const { return log_rate_[slot(tx, s, rx)]; }

  double sinr(Link l, std::size_t rx) const { return sinr(l.tx, l.band, rx); }
  double rate(Link l, std::size_t rx) const { return rate(l.tx, l.band, rx); }
  double log_rate(Link l, std::size_t rx) const { return log_rate(l.tx, l.band, rx); }
  bool available(Link l, std::size_t rx) const { return available(l.tx, l.band, rx); }

  void set_sinr(std::size_t tx, Subband s, std::size_t rx, double v) { sinr_[slot(tx, s, rx)] = v; }
  void set_rate(std::size_t tx, Subband s, std::size_t rx, double rate_bps, double log_rate) {
    rate_[slot(tx, s, rx)] = rate_bps;
    log_rate_[slot(tx, s, rx)] = log_rate;
  }

  /// BS options of receiver `rx`, ordered by transmitter then subband.
  const std::vector<Link>& bs_options(std::size_t rx) const { return bs_options_[rx]; }

  /// The D2D link of a D2D RX, empty for every other receiver.
  std::optional<Link> d2d_option(std::size_t rx) const {
    const auto node = dims_.rx_node(rx);
    if (node.role != RxRole::D2dRx) return std::nullopt;
    return Link{static_cast<std::uint32_t>(dims_.d2d_tx(pair_map_[node.ordinal])), Subband::D2D};
  }

  std::size_t option_count(std::size_t rx) const {
    return bs_options_[rx].size() + (d2d_option(rx) ? 1 : 0);
  }

  /// Index of the multiplier attached to a BS link; empty for D2D links.
  std::optional<std::size_t> price_index(Link l) const {
    if (l.band == Subband::Shared && dims_.is_bs(l.tx)) return l.tx;
    if (l.band == Subband::PicoOnly && dims_.is_pbs(l.tx)) return dims_.bs_count() + (l.tx - dims_.mbs);
    return std::nullopt;
  }

  Link priced_link(std::size_t p) const {
    if (p < dims_.bs_count()) return {static_cast<std::uint32_t>(p), Subband::Shared};
    return {static_cast<std::uint32_t>(dims_.mbs + (p - dims_.bs_count())), Subband::PicoOnly};
  }

 private:
  void mark_structural_availability() {
    bs_options_.assign(dims_.rx_count(), {});
    for (std::size_t k = 0; k < dims_.rx_count(); ++k) {
      for (std::size_t n = 0; n < dims_.bs_count(); ++n) {
        available_[slot(n, Subband::Shared, k)] = 1;
        bs_options_[k].push_back({static_cast<std::uint32_t>(n), Subband::Shared});
        if (dims_.is_pbs(n)) {
          available_[slot(n, Subband::PicoOnly, k)] = 1;
          bs_options_[k].push_back({static_cast<std::uint32_t>(n), Subband::PicoOnly});
        }
      }
      if (auto d2d = d2d_option(k)) available_[slot(d2d->tx, Subband::D2D, k)] = 1;
    }
  }

  NetworkDims dims_;
  std::vector<std::size_t> pair_map_;
  double rate_floor_ = 1e-20;
  std::vector<std::uint8_t> available_;
  std::vector<double> sinr_;
  std::vector<double> rate_;
  std::vector<double> log_rate_;
  std::vector<std::vector<Link>> bs_options_;
};

namespace detail {

inline double checked_sinr(double signal, double interference, double noise) {
  const double denominator = interference + noise;
  if (!(denominator > 0.0))
    throw std::domain_error("compute_sinr: zero noise and no interferer on a subband (degenerate partition)");
  return signal / denominator;
}

}  // namespace detail

/// Fills the availability mask and linear SINR of every available triple.
/// Every D2D TX is treated as active on subband 3.
inline RateTable compute_sinr(const ChannelGains& gains, const PowerAllocation& power,
                              const std::vector<std::size_t>& pair_map, const PartitionConfig& part,
                              const RadioConfig& radio) {
  part.validate();
  radio.validate();
  const auto dims = gains.dims();
  if (!(power.dims() == dims)) throw std::invalid_argument("compute_sinr: power and gain tables disagree");

  RateTable table(dims, pair_map, radio.rate_floor_bps);
  const double n0 = dbm_to_mw(radio.noise_psd_dbm_hz);  // mW/Hz
  const double noise1 = part.bandwidth(Subband::Shared) * n0;
  const double noise2 = part.bandwidth(Subband::PicoOnly) * n0;
  const double noise3 = part.w2() * n0;

  for (std::size_t k = 0; k < dims.rx_count(); ++k) {
    for (std::size_t n = 0; n < dims.bs_count(); ++n) {
      double interference1 = 0.0;
      double interference2 = 0.0;
      for (std::size_t j = 0; j < dims.bs_count(); ++j) {
        if (j == n) continue;
        interference1 += power(j, Subband::Shared) * gains(j, k);
        interference2 += power(j, Subband::PicoOnly) * gains(j, k);
      }
      const double s1 = power(n, Subband::Shared) * gains(n, k);
      table.set_sinr(n, Subband::Shared, k, detail::checked_sinr(s1, interference1, noise1));
      if (dims.is_pbs(n)) {
        const double s2 = power(n, Subband::PicoOnly) * gains(n, k);
        table.set_sinr(n, Subband::PicoOnly, k, detail::checked_sinr(s2, interference2, noise2));
      }
    }
  }

  for (std::size_t r = 0; r < dims.pairs; ++r) {
    const auto k = dims.d2d_rx(r);
    const auto own = dims.d2d_tx(pair_map[r]);
    double interference = 0.0;
    for (std::size_t t = 0; t < dims.pairs; ++t) {
      const auto j = dims.d2d_tx(t);
      if (j != own) interference += power(j, Subband::D2D) * gains(j, k);
    }
    const double signal = power(own, Subband::D2D) * gains(own, k);
    table.set_sinr(own, Subband::D2D, k, detail::checked_sinr(signal, interference, noise3));
  }
  return table;
}

/// Shannon rate on the triple's subband bandwidth plus the rate floor, and
/// its natural log, for every available triple.
inline RateTable compute_rates(RateTable table, const PartitionConfig& part, const RadioConfig& radio) {
  const auto& dims = table.dims();
  for (std::size_t n = 0; n < dims.tx_count(); ++n)
    for (auto s : kAllSubbands)
      for (std::size_t k = 0; k < dims.rx_count(); ++k) {
        if (!table.available(n, s, k)) continue;
        const double r = part.bandwidth(s) * std::log2(1.0 + table.sinr(n, s, k)) + radio.rate_floor_bps;
        table.set_rate(n, s, k, r, std::log(r));
      }
  return table;
}

/// Gains and layout to a finished rate table.
inline RateTable build_rate_table(const NetworkLayout& layout, const ChannelGains& gains,
                                  const PowerAllocation& power, const PartitionConfig& part,
                                  const RadioConfig& radio) {
  return compute_rates(compute_sinr(gains, power, layout.pair_map, part, radio), part, radio);
}

}  // namespace hetnet
