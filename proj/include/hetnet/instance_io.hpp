#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetnet/phy.hpp"
#include "hetnet/topology.hpp"

namespace hetnet {

inline constexpr const char* kInstanceFormat = "hetnet-instance";
inline constexpr int kInstanceVersion = 1;

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a solver or baseline needs to replay one drop. The layout is
/// optional: hand-written fixtures may carry only the radio tables.
struct Instance {
  RateTable rates;
  PowerAllocation power;
  std::optional<NetworkLayout> layout;
};

namespace detail {

inline nlohmann::json points_to_json(const std::vector<Point>& points) {
  auto arr = nlohmann::json::array();
  for (const auto& p : points) arr.push_back({p.x, p.y});
  return arr;
}

inline std::vector<Point> points_from_json(const nlohmann::json& arr) {
  std::vector<Point> points;
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2) throw InstanceError("instance: a position must be an [x, y] pair");
    points.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return points;
}

}  // namespace detail

inline nlohmann::json instance_to_json(const RateTable& rates, const PowerAllocation& power,
                                       const NetworkLayout* layout) {
  const auto& d = rates.dims();
  nlohmann::json j;
  j["format"] = kInstanceFormat;
  j["version"] = kInstanceVersion;
  j["dims"] = {{"mbs", d.mbs}, {"pbs", d.pbs}, {"pairs", d.pairs}, {"cellular", d.cellular}};
  j["rate_floor_bps"] = rates.rate_floor();
  j["pair_map"] = rates.pair_map();
  j["power_mw"] = power.raw();

  // [tx, subband (1-based), rx, sinr, rate_bps, log_rate] over available triples
  auto links = nlohmann::json::array();
  for (std::size_t n = 0; n < d.tx_count(); ++n)
    for (auto s : kAllSubbands)
      for (std::size_t k = 0; k < d.rx_count(); ++k)
        if (rates.available(n, s, k))
          links.push_back({n, subband_number(s), k, rates.sinr(n, s, k), rates.rate(n, s, k), rates.log_rate(n, s, k)});
  j["links"] = std::move(links);

  if (layout) {
    j["layout"] = {{"mbs", detail::points_to_json(layout->mbs_positions)},
                   {"pbs", detail::points_to_json(layout->pbs_positions)},
                   {"cellular", detail::points_to_json(layout->cellular_user_positions)},
                   {"d2d_tx", detail::points_to_json(layout->d2d_tx_positions)},
                   {"d2d_rx", detail::points_to_json(layout->d2d_rx_positions)},
                   {"pbs_cell", layout->pbs_cell},
                   {"cellular_cell", layout->cellular_user_cell},
                   {"d2d_pair_cell", layout->d2d_pair_cell}};
  }
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || j.value("format", std::string{}) != kInstanceFormat)
      throw InstanceError("instance: missing or wrong 'format' header");
    const int version = j.at("version").get<int>();
    if (version != kInstanceVersion)
      throw InstanceError("instance: unsupported version " + std::to_string(version) + " (expected " +
                          std::to_string(kInstanceVersion) + ")");

    const auto& jd = j.at("dims");
    NetworkDims dims{jd.at("mbs").get<std::size_t>(), jd.at("pbs").get<std::size_t>(),
                     jd.at("pairs").get<std::size_t>(), jd.at("cellular").get<std::size_t>()};
    auto pair_map = j.at("pair_map").get<std::vector<std::size_t>>();
    RateTable rates(dims, std::move(pair_map), j.at("rate_floor_bps").get<double>());
    PowerAllocation power(dims, j.at("power_mw").get<std::vector<double>>());

    std::size_t seen = 0;
    std::vector<std::uint8_t> filled(rates.size(), 0);
    for (const auto& row : j.at("links")) {
      if (!row.is_array() || row.size() != 6) throw InstanceError("instance: each link row needs 6 fields");
      const auto n = row[0].get<std::size_t>();
      const auto s = subband_from_number(row[1].get<int>());
      const auto k = row[2].get<std::size_t>();
      if (n >= dims.tx_count() || k >= dims.rx_count() || !rates.available(n, s, k))
        throw InstanceError("instance: link (" + std::to_string(n) + ", " + std::to_string(subband_number(s)) +
                            ", " + std::to_string(k) + ") is not available in this network");
      if (filled[rates.slot(n, s, k)]++) throw InstanceError("instance: duplicate link row");
      rates.set_sinr(n, s, k, row[3].get<double>());
      const double rate = row[4].get<double>();
      // a null log-rate (convenient in hand-written fixtures) means ln(rate)
      rates.set_rate(n, s, k, rate, row[5].is_null() ? std::log(rate) : row[5].get<double>());
      ++seen;
    }
    std::size_t expected = 0;
    for (std::size_t k = 0; k < dims.rx_count(); ++k) expected += rates.option_count(k);
    if (seen != expected)
      throw InstanceError("instance: " + std::to_string(expected - seen) + " available links have no values");

    Instance instance{std::move(rates), std::move(power), std::nullopt};
    if (j.contains("layout")) {
      const auto& jl = j["layout"];
      NetworkLayout layout;
      layout.mbs_positions = detail::points_from_json(jl.at("mbs"));
      layout.pbs_positions = detail::points_from_json(jl.at("pbs"));
      layout.cellular_user_positions = detail::points_from_json(jl.at("cellular"));
      layout.d2d_tx_positions = detail::points_from_json(jl.at("d2d_tx"));
      layout.d2d_rx_positions = detail::points_from_json(jl.at("d2d_rx"));
      layout.pair_map = instance.rates.pair_map();
      layout.pbs_cell = jl.at("pbs_cell").get<std::vector<std::size_t>>();
      layout.cellular_user_cell = jl.at("cellular_cell").get<std::vector<std::size_t>>();
      layout.d2d_pair_cell = jl.at("d2d_pair_cell").get<std::vector<std::size_t>>();
      if (!(layout.dims() == dims)) throw InstanceError("instance: layout disagrees with dims");
      instance.layout = std::move(layout);
    }
    return instance;
  } catch (const nlohmann::json::exception& e) {
    throw InstanceError(std::string("instance: malformed field: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InstanceError(std::string("instance: inconsistent tables: ") + e.what());
  }
}

inline void export_instance(const RateTable& rates, const PowerAllocation& power, const NetworkLayout* layout,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InstanceError("instance: cannot write '" + path + "'");
  out << instance_to_json(rates, power, layout).dump(1) << '\n';
  if (!out) throw InstanceError("instance: write failed for '" + path + "'");
}

inline Instance parse_instance(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InstanceError("instance: parse error at byte " + std::to_string(e.byte) + " (file is truncated or corrupt)");
  }
  return instance_from_json(j);
}

inline Instance import_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InstanceError("instance: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str());
}

}  // namespace hetnet
