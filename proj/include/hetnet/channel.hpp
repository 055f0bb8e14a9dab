#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "hetnet/topology.hpp"

namespace hetnet {

struct ChannelConfig {
  double macro_shadowing_std_db = 10.0;
  double pico_shadowing_std_db = 10.0;
  double d2d_shadowing_std_db = 12.0;
  std::uint64_t rng_seed = 2;

  void validate() const {
    if (!(macro_shadowing_std_db >= 0.0 && pico_shadowing_std_db >= 0.0 &&
          d2d_shadowing_std_db >= 0.0))
      throw std::invalid_argument("channel: shadowing standard deviations must be >= 0");
  }
};

/// Macro-BS pathloss in dB, distance in km.
inline double pathloss_macro_db(double d_km) {
  if (!(d_km > 0.0)) throw std::domain_error("pathloss_macro_db: distance must be positive");
  return 128.1 + 37.6 * std::log10(d_km);
}

/// Pico-BS and D2D pathloss in dB, distance in km.
inline double pathloss_pico_d2d_db(double d_km) {
  if (!(d_km > 0.0)) throw std::domain_error("pathloss_pico_d2d_db: distance must be positive");
  return 140.7 + 36.7 * std::log10(d_km);
}

/// Linear large-scale power gain per (transmitter, receiver) link. Gains are
/// frequency-flat: one value serves every subband of a link.
class ChannelGains {
 public:
  ChannelGains() = default;
  ChannelGains(NetworkDims dims, std::vector<double> gain)
      : dims_(dims), gain_(std::move(gain)) {
    if (gain_.size() != dims_.tx_count() * dims_.rx_count())
      throw std::invalid_argument("ChannelGains: table size does not match dimensions");
  }

  const NetworkDims& dims() const { return dims_; }
  double operator()(std::size_t tx, std::size_t rx) const { return gain_[tx * dims_.rx_count() + rx]; }
  const std::vector<double>& raw() const { return gain_; }

 private:
  NetworkDims dims_;
  std::vector<double> gain_;
};

/// True when transmitter `tx` and receiver `rx` are the same physical D2D TX.
inline bool is_self_link(const NetworkDims& dims, std::size_t tx, std::size_t rx) {
  return dims.is_d2d_tx(tx) && rx >= dims.cellular && rx < dims.cellular + dims.pairs &&
         tx - dims.mbs - dims.pbs == rx - dims.cellular;
}

/// Pathloss plus one independent log-normal shadowing draw per link. The
/// shadowing deviation and pathloss model follow the transmitter's role.
inline ChannelGains compute_gains(const NetworkLayout& layout, const ChannelConfig& config) {
  config.validate();
  const auto dims = layout.dims();
  std::mt19937_64 rng(config.rng_seed);
  std::normal_distribution<double> standard(0.0, 1.0);

  std::vector<double> gain(dims.tx_count() * dims.rx_count());
  for (std::size_t n = 0; n < dims.tx_count(); ++n) {
    const auto role = dims.tx_node(n).role;
    const double sigma = role == TxRole::Mbs   ? config.macro_shadowing_std_db
                         : role == TxRole::Pbs ? config.pico_shadowing_std_db
                                               : config.d2d_shadowing_std_db;
    const Point from = layout.tx_position(n);
    for (std::size_t k = 0; k < dims.rx_count(); ++k) {
      // Draw even for the self link so the stream layout does not depend on masking.
      const double shadow_db = sigma * standard(rng);
      auto& g = gain[n * dims.rx_count() + k];
      if (is_self_link(dims, n, k)) {
        g = 1.0;  // never read
        continue;
      }
      const double d_km = distance(from, layout.rx_position(k)) / 1000.0;
      if (!(d_km > 0.0))
        throw std::domain_error("compute_gains: zero distance between distinct nodes");
      const double pl = role == TxRole::Mbs ? pathloss_macro_db(d_km) : pathloss_pico_d2d_db(d_km);
      g = std::pow(10.0, -(pl + shadow_db) / 10.0);
    }
  }
  return {dims, std::move(gain)};
}

}  // namespace hetnet
