#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "hetnet/phy.hpp"

namespace hetnet::testing {

/// Empty rate table with the identity pairing.
inline RateTable blank_table(NetworkDims dims) {
  std::vector<std::size_t> pairs(dims.pairs);
  for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i] = i;
  return RateTable(dims, pairs, 1e-20);
}

inline void put(RateTable& t, std::size_t tx, Subband s, std::size_t rx, double rate, double sinr = 1.0) {
  t.set_sinr(tx, s, rx, sinr);
  t.set_rate(tx, s, rx, rate, std::log(rate));
}

/// Every available triple gets a log-uniform rate in [1e4, 1e8] bps and a
/// log-uniform SINR in [1e-2, 1e3].
template <class Rng>
RateTable random_table(NetworkDims dims, Rng& rng) {
  auto t = blank_table(dims);
  std::uniform_real_distribution<double> lr(std::log(1e4), std::log(1e8));
  std::uniform_real_distribution<double> ls(std::log(1e-2), std::log(1e3));
  for (std::size_t k = 0; k < dims.rx_count(); ++k) {
    for (auto l : t.bs_options(k)) put(t, l.tx, l.band, k, std::exp(lr(rng)), std::exp(ls(rng)));
    if (auto d = t.d2d_option(k)) put(t, d->tx, d->band, k, std::exp(lr(rng)), std::exp(ls(rng)));
  }
  return t;
}

}  // namespace hetnet::testing
