#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetnet/association.hpp"
#include "hetnet/baselines.hpp"
#include "hetnet/channel.hpp"
#include "hetnet/phy.hpp"
#include "hetnet/topology.hpp"

namespace hetnet {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every experimental knob of a run or sweep. Per-drop layout and shadowing
/// seeds are derived from `seed`, so the `rng_seed` members of the scenario
/// and channel sections are ignored by the harness.
struct ExperimentConfig {
  ScenarioConfig scenario;
  ChannelConfig channel;
  PartitionConfig partition;
  RadioConfig radio;
  SolverConfig solver;
  std::vector<Scheme> schemes{kAllSchemes.begin(), kAllSchemes.end()};
  std::size_t drops = 10;
  std::uint64_t seed = 1;
  std::vector<double> eta_sweep;
  std::vector<std::size_t> d2d_sweep;
  std::vector<double> target_rates_bps{0.25e6, 0.5e6, 1e6, 2e6};
  std::string out_dir = "out";

  bool wants(Scheme s) const {
    for (auto t : schemes)
      if (t == s) return true;
    return false;
  }

  void validate() const {
    scenario.validate();
    channel.validate();
    partition.validate();
    radio.validate();
    solver.validate();
    if (drops < 1) throw ConfigError("config: drops must be >= 1");
    if (schemes.empty()) throw ConfigError("config: at least one scheme is required");
    if (wants(Scheme::RateBias) && !wants(Scheme::MaxUtility))
      throw ConfigError("config: RATE_BIAS needs MAX_UTILITY in the same run to supply converged prices");
    for (double eta : eta_sweep)
      if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("config: eta_sweep values must lie in [0, 1]");
    for (double rho : target_rates_bps)
      if (!(rho >= 0.0)) throw ConfigError("config: target rates must be >= 0");
  }
};

namespace detail {

using json = nlohmann::json;

/// Rejects keys outside `allowed`, naming the section.
inline void require_known_keys(const json& object, const std::set<std::string>& allowed, const std::string& where) {
  if (!object.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : object.items())
    if (!allowed.count(key)) throw ConfigError("config: unknown key '" + key + "' in " + where);
}

template <class T>
void read_if(const json& object, const char* key, T& target, const std::string& where) {
  if (!object.contains(key)) return;
  try {
    target = object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config: bad value for '" + std::string(key) + "' in " + where + ": " + e.what());
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& root) {
  using detail::read_if;
  using detail::require_known_keys;
  ExperimentConfig c;
  require_known_keys(root,
                     {"scenario", "channel", "partition", "radio", "solver", "schemes", "drops", "seed",
                      "eta_sweep", "d2d_sweep", "target_rates_bps", "out_dir"},
                     "top level");

  if (root.contains("scenario")) {
    const auto& s = root["scenario"];
    require_known_keys(s,
                       {"macro_rows", "macro_cols", "inter_site_distance", "pbs_per_macrocell",
                        "cellular_users_per_macrocell", "d2d_pairs_per_macrocell", "d2d_min_distance",
                        "d2d_max_distance", "min_user_bs_distance"},
                       "scenario");
    read_if(s, "macro_rows", c.scenario.macro_rows, "scenario");
    read_if(s, "macro_cols", c.scenario.macro_cols, "scenario");
    read_if(s, "inter_site_distance", c.scenario.inter_site_distance, "scenario");
    read_if(s, "pbs_per_macrocell", c.scenario.pbs_per_macrocell, "scenario");
    read_if(s, "cellular_users_per_macrocell", c.scenario.cellular_users_per_macrocell, "scenario");
    read_if(s, "d2d_pairs_per_macrocell", c.scenario.d2d_pairs_per_macrocell, "scenario");
    read_if(s, "d2d_min_distance", c.scenario.d2d_min_distance, "scenario");
    read_if(s, "d2d_max_distance", c.scenario.d2d_max_distance, "scenario");
    read_if(s, "min_user_bs_distance", c.scenario.min_user_bs_distance, "scenario");
  }
  if (root.contains("channel")) {
    const auto& s = root["channel"];
    require_known_keys(s, {"macro_shadowing_std_db", "pico_shadowing_std_db", "d2d_shadowing_std_db"}, "channel");
    read_if(s, "macro_shadowing_std_db", c.channel.macro_shadowing_std_db, "channel");
    read_if(s, "pico_shadowing_std_db", c.channel.pico_shadowing_std_db, "channel");
    read_if(s, "d2d_shadowing_std_db", c.channel.d2d_shadowing_std_db, "channel");
  }
  if (root.contains("partition")) {
    const auto& s = root["partition"];
    require_known_keys(s, {"system_bandwidth_hz", "prb_bandwidth_hz", "eta"}, "partition");
    read_if(s, "system_bandwidth_hz", c.partition.system_bandwidth_hz, "partition");
    read_if(s, "prb_bandwidth_hz", c.partition.prb_bandwidth_hz, "partition");
    read_if(s, "eta", c.partition.eta, "partition");
  }
  if (root.contains("radio")) {
    const auto& s = root["radio"];
    require_known_keys(s, {"mbs_power_dbm", "pbs_power_dbm", "d2d_tx_power_dbm", "noise_psd_dbm_hz", "rate_floor_bps"},
                       "radio");
    read_if(s, "mbs_power_dbm", c.radio.mbs_power_dbm, "radio");
    read_if(s, "pbs_power_dbm", c.radio.pbs_power_dbm, "radio");
    read_if(s, "d2d_tx_power_dbm", c.radio.d2d_tx_power_dbm, "radio");
    read_if(s, "noise_psd_dbm_hz", c.radio.noise_psd_dbm_hz, "radio");
    read_if(s, "rate_floor_bps", c.radio.rate_floor_bps, "radio");
  }
  if (root.contains("solver")) {
    const auto& s = root["solver"];
    require_known_keys(s, {"stepsize", "max_iterations", "convergence_tol", "convergence_window", "mu_init"},
                       "solver");
    read_if(s, "stepsize", c.solver.stepsize, "solver");
    read_if(s, "max_iterations", c.solver.max_iterations, "solver");
    read_if(s, "convergence_tol", c.solver.convergence_tol, "solver");
    read_if(s, "convergence_window", c.solver.convergence_window, "solver");
    read_if(s, "mu_init", c.solver.mu_init, "solver");
  }
  if (root.contains("schemes")) {
    std::vector<std::string> names;
    read_if(root, "schemes", names, "top level");
    c.schemes.clear();
    for (const auto& n : names) {
      auto s = parse_scheme(n);
      if (!s) throw ConfigError("config: unknown scheme '" + n + "'");
      c.schemes.push_back(*s);
    }
  }
  read_if(root, "drops", c.drops, "top level");
  read_if(root, "seed", c.seed, "top level");
  read_if(root, "eta_sweep", c.eta_sweep, "top level");
  read_if(root, "d2d_sweep", c.d2d_sweep, "top level");
  read_if(root, "target_rates_bps", c.target_rates_bps, "top level");
  read_if(root, "out_dir", c.out_dir, "top level");

  c.validate();
  return c;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["scenario"] = {{"macro_rows", c.scenario.macro_rows},
                   {"macro_cols", c.scenario.macro_cols},
                   {"inter_site_distance", c.scenario.inter_site_distance},
                   {"pbs_per_macrocell", c.scenario.pbs_per_macrocell},
                   {"cellular_users_per_macrocell", c.scenario.cellular_users_per_macrocell},
                   {"d2d_pairs_per_macrocell", c.scenario.d2d_pairs_per_macrocell},
                   {"d2d_min_distance", c.scenario.d2d_min_distance},
                   {"d2d_max_distance", c.scenario.d2d_max_distance},
                   {"min_user_bs_distance", c.scenario.min_user_bs_distance}};
  j["channel"] = {{"macro_shadowing_std_db", c.channel.macro_shadowing_std_db},
                  {"pico_shadowing_std_db", c.channel.pico_shadowing_std_db},
                  {"d2d_shadowing_std_db", c.channel.d2d_shadowing_std_db}};
  j["partition"] = {{"system_bandwidth_hz", c.partition.system_bandwidth_hz},
                    {"prb_bandwidth_hz", c.partition.prb_bandwidth_hz},
                    {"eta", c.partition.eta}};
  j["radio"] = {{"mbs_power_dbm", c.radio.mbs_power_dbm},
                {"pbs_power_dbm", c.radio.pbs_power_dbm},
                {"d2d_tx_power_dbm", c.radio.d2d_tx_power_dbm},
                {"noise_psd_dbm_hz", c.radio.noise_psd_dbm_hz},
                {"rate_floor_bps", c.radio.rate_floor_bps}};
  j["solver"] = {{"stepsize", c.solver.stepsize},
                 {"max_iterations", c.solver.max_iterations},
                 {"convergence_tol", c.solver.convergence_tol},
                 {"convergence_window", c.solver.convergence_window},
                 {"mu_init", c.solver.mu_init}};
  std::vector<std::string> names;
  for (auto s : c.schemes) names.emplace_back(to_string(s));
  j["schemes"] = names;
  j["drops"] = c.drops;
  j["seed"] = c.seed;
  j["eta_sweep"] = c.eta_sweep;
  j["d2d_sweep"] = c.d2d_sweep;
  j["target_rates_bps"] = c.target_rates_bps;
  j["out_dir"] = c.out_dir;
  return j;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: '" + path + "' is not valid JSON (byte " + std::to_string(e.byte) + ")");
  }
  return parse_config(root);
}

}  // namespace hetnet
