// SPDX-License-Identifier: Apache-2.0
//
// cfba - link-level beam-alignment simulator for cell-free mmWave massive MIMO
// Copyright (C) 2026 The cfba authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cfba/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace cfba {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad numeric value for " + key + ": '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  const int i = static_cast<int>(std::llround(x));
  if (std::abs(x - i) > 1e-9)
    throw std::invalid_argument("config: expected integer for " + key + ": '" + v + "'");
  return i;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad unsigned value for " + key + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string s = lower(trim(v));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& item : split_list(v)) out.push_back(parse_int(key, item));
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += items[i];
  }
  return out;
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string to_string(BlockageMode m) {
  return m == BlockageMode::kProbabilistic ? "probabilistic" : "always-los";
}
std::string to_string(EstimatorKind e) {
  return e == EstimatorKind::kMco ? "mco" : "sco";
}
std::string to_string(AssignmentMode a) {
  return a == AssignmentMode::kLocationBased ? "lb" : "ra";
}

BlockageMode blockage_mode_from_string(const std::string& s) {
  const std::string v = lower(trim(s));
  if (v == "probabilistic" || v == "prob") return BlockageMode::kProbabilistic;
  if (v == "always-los" || v == "always_los" || v == "los") return BlockageMode::kAlwaysLos;
  throw std::invalid_argument("unknown blockage mode: '" + s + "'");
}

EstimatorKind estimator_from_string(const std::string& s) {
  const std::string v = lower(trim(s));
  if (v == "mco") return EstimatorKind::kMco;
  if (v == "sco") return EstimatorKind::kSco;
  throw std::invalid_argument("unknown estimator: '" + s + "'");
}

AssignmentMode assignment_from_string(const std::string& s) {
  const std::string v = lower(trim(s));
  if (v == "lb" || v == "location-based") return AssignmentMode::kLocationBased;
  if (v == "ra" || v == "random") return AssignmentMode::kRandom;
  throw std::invalid_argument("unknown assignment mode: '" + s + "'");
}

int SimParams::num_subcarriers() const {
  return static_cast<int>(std::llround(bandwidth_hz / subcarrier_spacing_hz));
}

double SimParams::cp_duration() const { return cp_fraction / subcarrier_spacing_hz; }

double SimParams::symbol_duration() const {
  return 1.0 / subcarrier_spacing_hz + cp_duration();
}

double SimParams::tx_power_w() const { return std::pow(10.0, tx_power_dbw / 10.0); }

double SimParams::beta() const { return tx_power_w() / num_subcarriers(); }

int SimParams::num_patterns() const {
  const int per_chain = num_subcarriers() / subcarriers_per_chain;
  return per_chain / ap_rf_chains;
}

void SimParams::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("params: " + msg); };
  if (area_side <= 0) fail("area_side must be positive");
  if (num_aps < 1) fail("num_aps must be >= 1");
  if (num_ues < 1) fail("num_ues must be >= 1");
  if (num_scatterers < 0) fail("num_scatterers must be >= 0");
  if (ap_antennas < 1 || ue_antennas < 1) fail("antenna counts must be >= 1");
  if (ap_rf_chains < 1 || ue_rf_chains < 1) fail("RF chain counts must be >= 1");
  if (ap_rf_chains >= ap_antennas) fail("ap_rf_chains must be < ap_antennas");
  if (ue_rf_chains >= ue_antennas) fail("ue_rf_chains must be < ue_antennas");
  if (ap_fingers < 1 || ap_fingers > ap_antennas) fail("ap_fingers must be in 1..ap_antennas");
  if (ue_fingers < 1 || ue_fingers > ue_antennas) fail("ue_fingers must be in 1..ue_antennas");
  if (carrier_freq_hz <= 0 || bandwidth_hz <= 0 || subcarrier_spacing_hz <= 0)
    fail("frequencies must be positive");
  const double nc = bandwidth_hz / subcarrier_spacing_hz;
  if (std::abs(nc - std::llround(nc)) > 1e-6)
    fail("bandwidth must be an integer multiple of the subcarrier spacing");
  if (cp_fraction < 0) fail("cp_fraction must be >= 0");
  if (symbols_per_slot < 1) fail("symbols_per_slot must be >= 1");
  if (subcarriers_per_chain < 1) fail("subcarriers_per_chain must be >= 1");
  if (max_beacon_slots < 1) fail("max_beacon_slots must be >= 1");
  if (num_patterns() < 1)
    fail("infeasible pattern configuration: floor(floor(N_C/Q)/n_AP) = 0");
  if (detect_pairs < 1 || detect_pairs > num_patterns())
    fail("detect_pairs must be in 1..D");
  if (ap_height <= 0 || ue_height <= 0) fail("antenna heights must be positive");
  if (pl_exponent_los <= 0 || pl_exponent_nlos <= 0) fail("path-loss exponents must be positive");
  if (los_saturation_dist <= 0 || los_decay_dist <= 0) fail("LoS model distances must be positive");
}

void RunConfig::validate() const {
  params.validate();
  if (drops < 1) throw std::invalid_argument("run: drops must be >= 1");
  if (t_grid.empty()) throw std::invalid_argument("run: t_grid must be non-empty");
  for (int t : t_grid)
    if (t < 1 || t > params.max_beacon_slots)
      throw std::invalid_argument("run: t_grid values must be in 1..max_beacon_slots");
  for (int t : effective_sco_t_grid())
    if (t < 1 || t > params.max_beacon_slots)
      throw std::invalid_argument("run: sco_t_grid values must be in 1..max_beacon_slots");
  if (!std::is_sorted(t_grid.begin(), t_grid.end()))
    throw std::invalid_argument("run: t_grid must be ascending");
  if (nd_values.empty()) throw std::invalid_argument("run: nd_values must be non-empty");
  for (int nd : nd_values)
    if (nd < 1 || nd > params.num_patterns())
      throw std::invalid_argument("run: nd_values must be in 1..D");
  if (estimators.empty()) throw std::invalid_argument("run: estimators must be non-empty");
  if (assignments.empty()) throw std::invalid_argument("run: assignments must be non-empty");
  if (threads < 0) throw std::invalid_argument("run: threads must be >= 0");
  if (kmeans_max_iters < 1) throw std::invalid_argument("run: kmeans_max_iters must be >= 1");
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section.empty())
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    kv[key] = value;
  }
  return kv;
}

RunConfig run_config_from_kv(const std::map<std::string, std::string>& kv,
                             bool validate) {
  RunConfig cfg;
  SimParams& p = cfg.params;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"scenario.area_side", [&](const std::string& k, const std::string& v) { p.area_side = parse_double(k, v); }},
      {"scenario.num_aps", [&](const std::string& k, const std::string& v) { p.num_aps = parse_int(k, v); }},
      {"scenario.num_ues", [&](const std::string& k, const std::string& v) { p.num_ues = parse_int(k, v); }},
      {"scenario.num_scatterers", [&](const std::string& k, const std::string& v) { p.num_scatterers = parse_int(k, v); }},
      {"scenario.ap_height", [&](const std::string& k, const std::string& v) { p.ap_height = parse_double(k, v); }},
      {"scenario.ue_height", [&](const std::string& k, const std::string& v) { p.ue_height = parse_double(k, v); }},
      {"scenario.scatterer_height", [&](const std::string& k, const std::string& v) { p.scatterer_height = parse_double(k, v); }},
      {"scenario.seed", [&](const std::string& k, const std::string& v) { p.seed = parse_u64(k, v); }},
      {"arrays.ap_antennas", [&](const std::string& k, const std::string& v) { p.ap_antennas = parse_int(k, v); }},
      {"arrays.ue_antennas", [&](const std::string& k, const std::string& v) { p.ue_antennas = parse_int(k, v); }},
      {"arrays.ap_rf_chains", [&](const std::string& k, const std::string& v) { p.ap_rf_chains = parse_int(k, v); }},
      {"arrays.ue_rf_chains", [&](const std::string& k, const std::string& v) { p.ue_rf_chains = parse_int(k, v); }},
      {"arrays.ap_fingers", [&](const std::string& k, const std::string& v) { p.ap_fingers = parse_int(k, v); }},
      {"arrays.ue_fingers", [&](const std::string& k, const std::string& v) { p.ue_fingers = parse_int(k, v); }},
      {"ofdm.carrier_freq_hz", [&](const std::string& k, const std::string& v) { p.carrier_freq_hz = parse_double(k, v); }},
      {"ofdm.bandwidth_hz", [&](const std::string& k, const std::string& v) { p.bandwidth_hz = parse_double(k, v); }},
      {"ofdm.subcarrier_spacing_hz", [&](const std::string& k, const std::string& v) { p.subcarrier_spacing_hz = parse_double(k, v); }},
      {"ofdm.cp_fraction", [&](const std::string& k, const std::string& v) { p.cp_fraction = parse_double(k, v); }},
      {"ofdm.symbols_per_slot", [&](const std::string& k, const std::string& v) { p.symbols_per_slot = parse_int(k, v); }},
      {"protocol.subcarriers_per_chain", [&](const std::string& k, const std::string& v) { p.subcarriers_per_chain = parse_int(k, v); }},
      {"protocol.max_beacon_slots", [&](const std::string& k, const std::string& v) { p.max_beacon_slots = parse_int(k, v); }},
      {"protocol.detect_pairs", [&](const std::string& k, const std::string& v) { p.detect_pairs = parse_int(k, v); }},
      {"protocol.permute_subcarriers", [&](const std::string& k, const std::string& v) { p.permute_subcarriers = parse_bool(k, v); }},
      {"power.tx_power_dbw", [&](const std::string& k, const std::string& v) { p.tx_power_dbw = parse_double(k, v); }},
      {"power.noise_psd_dbm_hz", [&](const std::string& k, const std::string& v) { p.noise_psd_dbm_hz = parse_double(k, v); }},
      {"power.noise_figure_db", [&](const std::string& k, const std::string& v) { p.noise_figure_db = parse_double(k, v); }},
      {"power.noiseless", [&](const std::string& k, const std::string& v) { p.noiseless = parse_bool(k, v); }},
      {"channel.blockage", [&](const std::string&, const std::string& v) { p.blockage = blockage_mode_from_string(v); }},
      {"channel.shadowing", [&](const std::string& k, const std::string& v) { p.shadowing = parse_bool(k, v); }},
      {"channel.snap_to_grid", [&](const std::string& k, const std::string& v) { p.snap_to_grid = parse_bool(k, v); }},
      {"channel.pl_exponent_los", [&](const std::string& k, const std::string& v) { p.pl_exponent_los = parse_double(k, v); }},
      {"channel.pl_exponent_nlos", [&](const std::string& k, const std::string& v) { p.pl_exponent_nlos = parse_double(k, v); }},
      {"channel.shadow_sigma_los_db", [&](const std::string& k, const std::string& v) { p.shadow_sigma_los_db = parse_double(k, v); }},
      {"channel.shadow_sigma_nlos_db", [&](const std::string& k, const std::string& v) { p.shadow_sigma_nlos_db = parse_double(k, v); }},
      {"channel.los_saturation_dist", [&](const std::string& k, const std::string& v) { p.los_saturation_dist = parse_double(k, v); }},
      {"channel.los_decay_dist", [&](const std::string& k, const std::string& v) { p.los_decay_dist = parse_double(k, v); }},
      {"run.drops", [&](const std::string& k, const std::string& v) { cfg.drops = parse_int(k, v); }},
      {"run.t_grid", [&](const std::string& k, const std::string& v) { cfg.t_grid = parse_int_list(k, v); }},
      {"run.sco_t_grid", [&](const std::string& k, const std::string& v) { cfg.sco_t_grid = parse_int_list(k, v); }},
      {"run.nd_values", [&](const std::string& k, const std::string& v) { cfg.nd_values = parse_int_list(k, v); }},
      {"run.estimators",
       [&](const std::string&, const std::string& v) {
         cfg.estimators.clear();
         for (const auto& e : split_list(v)) cfg.estimators.push_back(estimator_from_string(e));
       }},
      {"run.assignments",
       [&](const std::string&, const std::string& v) {
         cfg.assignments.clear();
         for (const auto& a : split_list(v)) cfg.assignments.push_back(assignment_from_string(a));
       }},
      {"run.threads", [&](const std::string& k, const std::string& v) { cfg.threads = parse_int(k, v); }},
      {"run.kmeans_max_iters", [&](const std::string& k, const std::string& v) { cfg.kmeans_max_iters = parse_int(k, v); }},
      {"run.output_dir", [&](const std::string&, const std::string& v) { cfg.output_dir = v; }},
  };

  for (const auto& [key, value] : kv) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw std::invalid_argument("config: unknown key '" + key + "'");
    it->second(key, value);
  }
  if (cfg.output_dir.empty()) {
    const char* env = std::getenv("CFBA_OUTPUT_DIR");
    cfg.output_dir = (env && *env) ? env : "results";
  }
  if (validate) cfg.validate();
  return cfg;
}

namespace {
std::map<std::string, std::string> apply_overrides(
    std::map<std::string, std::string> kv, const std::vector<std::string>& overrides) {
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("override must be section.key=value: '" + ov + "'");
    kv[lower(trim(ov.substr(0, eq)))] = trim(ov.substr(eq + 1));
  }
  return kv;
}
}  // namespace

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return run_config_from_kv(apply_overrides(parse_config_text(ss.str()), overrides));
}

RunConfig run_config_from_overrides(const std::vector<std::string>& overrides) {
  return run_config_from_kv(apply_overrides({}, overrides));
}

std::map<std::string, std::string> run_config_to_kv(const RunConfig& cfg) {
  const SimParams& p = cfg.params;
  std::map<std::string, std::string> kv;
  kv["scenario.area_side"] = fmt_double(p.area_side);
  kv["scenario.num_aps"] = std::to_string(p.num_aps);
  kv["scenario.num_ues"] = std::to_string(p.num_ues);
  kv["scenario.num_scatterers"] = std::to_string(p.num_scatterers);
  kv["scenario.ap_height"] = fmt_double(p.ap_height);
  kv["scenario.ue_height"] = fmt_double(p.ue_height);
  kv["scenario.scatterer_height"] = fmt_double(p.scatterer_height);
  kv["scenario.seed"] = std::to_string(p.seed);
  kv["arrays.ap_antennas"] = std::to_string(p.ap_antennas);
  kv["arrays.ue_antennas"] = std::to_string(p.ue_antennas);
  kv["arrays.ap_rf_chains"] = std::to_string(p.ap_rf_chains);
  kv["arrays.ue_rf_chains"] = std::to_string(p.ue_rf_chains);
  kv["arrays.ap_fingers"] = std::to_string(p.ap_fingers);
  kv["arrays.ue_fingers"] = std::to_string(p.ue_fingers);
  kv["ofdm.carrier_freq_hz"] = fmt_double(p.carrier_freq_hz);
  kv["ofdm.bandwidth_hz"] = fmt_double(p.bandwidth_hz);
  kv["ofdm.subcarrier_spacing_hz"] = fmt_double(p.subcarrier_spacing_hz);
  kv["ofdm.cp_fraction"] = fmt_double(p.cp_fraction);
  kv["ofdm.symbols_per_slot"] = std::to_string(p.symbols_per_slot);
  kv["protocol.subcarriers_per_chain"] = std::to_string(p.subcarriers_per_chain);
  kv["protocol.max_beacon_slots"] = std::to_string(p.max_beacon_slots);
  kv["protocol.detect_pairs"] = std::to_string(p.detect_pairs);
  kv["protocol.permute_subcarriers"] = p.permute_subcarriers ? "true" : "false";
  kv["power.tx_power_dbw"] = fmt_double(p.tx_power_dbw);
  kv["power.noise_psd_dbm_hz"] = fmt_double(p.noise_psd_dbm_hz);
  kv["power.noise_figure_db"] = fmt_double(p.noise_figure_db);
  kv["power.noiseless"] = p.noiseless ? "true" : "false";
  kv["channel.blockage"] = to_string(p.blockage);
  kv["channel.shadowing"] = p.shadowing ? "true" : "false";
  kv["channel.snap_to_grid"] = p.snap_to_grid ? "true" : "false";
  kv["channel.pl_exponent_los"] = fmt_double(p.pl_exponent_los);
  kv["channel.pl_exponent_nlos"] = fmt_double(p.pl_exponent_nlos);
  kv["channel.shadow_sigma_los_db"] = fmt_double(p.shadow_sigma_los_db);
  kv["channel.shadow_sigma_nlos_db"] = fmt_double(p.shadow_sigma_nlos_db);
  kv["channel.los_saturation_dist"] = fmt_double(p.los_saturation_dist);
  kv["channel.los_decay_dist"] = fmt_double(p.los_decay_dist);
  kv["run.drops"] = std::to_string(cfg.drops);
  {
    std::vector<std::string> items;
    for (int t : cfg.t_grid) items.push_back(std::to_string(t));
    kv["run.t_grid"] = join(items);
  }
  if (!cfg.sco_t_grid.empty()) {
    std::vector<std::string> items;
    for (int t : cfg.sco_t_grid) items.push_back(std::to_string(t));
    kv["run.sco_t_grid"] = join(items);
  }
  {
    std::vector<std::string> items;
    for (int nd : cfg.nd_values) items.push_back(std::to_string(nd));
    kv["run.nd_values"] = join(items);
  }
  {
    std::vector<std::string> items;
    for (auto e : cfg.estimators) items.push_back(to_string(e));
    kv["run.estimators"] = join(items);
  }
  {
    std::vector<std::string> items;
    for (auto a : cfg.assignments) items.push_back(to_string(a));
    kv["run.assignments"] = join(items);
  }
  kv["run.threads"] = std::to_string(cfg.threads);
  kv["run.kmeans_max_iters"] = std::to_string(cfg.kmeans_max_iters);
  kv["run.output_dir"] = cfg.output_dir;
  return kv;
}

}  // namespace cfba
