#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "hetnet/association.hpp"

namespace hetnet {

enum class Scheme : std::uint8_t { MaxUtility, MaxRate, MaxSinr, RateBias, SinrBias };

inline constexpr std::array<Scheme, 5> kAllSchemes{Scheme::MaxUtility, Scheme::MaxRate, Scheme::MaxSinr,
                                                   Scheme::RateBias, Scheme::SinrBias};

inline constexpr std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::MaxUtility: return "MAX_UTILITY";
    case Scheme::MaxRate: return "MAX_RATE";
    case Scheme::MaxSinr: return "MAX_SINR";
    case Scheme::RateBias: return "RATE_BIAS";
    case Scheme::SinrBias: return "SINR_BIAS";
  }
  return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) {
  for (auto s : kAllSchemes)
    if (to_string(s) == name) return s;
  return std::nullopt;
}

namespace detail {

template <class BsScore, class D2dScore>
Assignment associate_all(const RateTable& rates, BsScore&& bs_score, D2dScore&& d2d_score) {
  Assignment x(rates.dims().rx_count());
  for (std::size_t k = 0; k < x.size(); ++k)
    x[k] = select_link(
        rates, k, [&](Link l) { return bs_score(l, k); }, [&](Link l) { return d2d_score(l, k); });
  return x;
}

}  // namespace detail

inline Assignment assoc_max_rate(const RateTable& rates) {
  auto score = [&](Link l, std::size_t k) { return rates.rate(l, k); };
  return detail::associate_all(rates, score, score);
}

/// Bandwidth-blind: raw SINR is the score on every link.
inline Assignment assoc_max_sinr(const RateTable& rates) {
  auto score = [&](Link l, std::size_t k) { return rates.sinr(l, k); };
  return detail::associate_all(rates, score, score);
}

/// Rates discounted by exp(-mu*) on BS links; D2D links use the plain rate.
inline Assignment assoc_rate_bias(const RateTable& rates, const Prices& mu_star) {
  if (mu_star.size() != rates.dims().priced_count())
    throw std::invalid_argument("assoc_rate_bias: converged multipliers missing or mis-sized");
  return detail::associate_all(
      rates, [&](Link l, std::size_t k) { return rates.rate(l, k) * std::exp(-mu_star[*rates.price_index(l)]); },
      [&](Link l, std::size_t k) { return rates.rate(l, k); });
}

/// SINR per mW of transmit power on the subband. Links with zero power on
/// the subband are never selected.
inline Assignment assoc_sinr_bias(const RateTable& rates, const PowerAllocation& power) {
  if (!(power.dims() == rates.dims())) throw std::invalid_argument("assoc_sinr_bias: power table mismatch");
  auto score = [&](Link l, std::size_t k) {
    const double p = power(l.tx, l.band);
    return p > 0.0 ? rates.sinr(l, k) / p : -std::numeric_limits<double>::infinity();
  };
  return detail::associate_all(rates, score, score);
}

}  // namespace hetnet
