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

#include "cfba/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cfba {

namespace {

json points_to_json(const std::vector<Vec2>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

std::vector<Vec2> points_from_json(const json& arr) {
  std::vector<Vec2> pts;
  for (const auto& item : arr) pts.push_back({item.at(0).get<double>(), item.at(1).get<double>()});
  return pts;
}

}  // namespace

json drop_to_json(const ScenarioDrop& drop) {
  return {{"ap_positions", points_to_json(drop.ap_positions)},
          {"ue_positions", points_to_json(drop.ue_positions)},
          {"scatterer_positions", points_to_json(drop.scatterer_positions)},
          {"ap_orientations", drop.ap_orientations},
          {"ue_orientations", drop.ue_orientations}};
}

ScenarioDrop drop_from_json(const json& j) {
  ScenarioDrop drop;
  drop.ap_positions = points_from_json(j.at("ap_positions"));
  drop.ue_positions = points_from_json(j.at("ue_positions"));
  if (j.contains("scatterer_positions"))
    drop.scatterer_positions = points_from_json(j.at("scatterer_positions"));
  if (j.contains("ap_orientations"))
    drop.ap_orientations = j.at("ap_orientations").get<std::vector<double>>();
  if (j.contains("ue_orientations"))
    drop.ue_orientations = j.at("ue_orientations").get<std::vector<double>>();
  return drop;
}

json geometry_to_json(const ChannelGeometry& geom) {
  json links = json::array();
  for (int k = 0; k < geom.num_ues; ++k)
    for (int m = 0; m < geom.num_aps; ++m) {
      const auto& paths = geom.link(k, m);
      if (paths.empty()) continue;
      json plist = json::array();
      for (const auto& p : paths)
        plist.push_back({{"gain_var", p.gain_var},
                         {"aoa", p.aoa},
                         {"aod", p.aod},
                         {"delay", p.delay}});
      links.push_back({{"ue", k + 1}, {"ap", m + 1}, {"paths", plist}});
    }
  return {{"num_ues", geom.num_ues},
          {"num_aps", geom.num_aps},
          {"truncated_paths", geom.truncated_paths},
          {"links", links}};
}

json assignment_to_json(const PatternAssignment& assignment, const std::string& mode,
                        const std::vector<int>& cluster_of_ap) {
  json j = {{"mode", mode},
            {"num_patterns", assignment.num_patterns()},
            {"pattern_of_ap", assignment.pattern_of_ap}};
  if (!cluster_of_ap.empty()) j["cluster_of_ap"] = cluster_of_ap;
  return j;
}

PatternAssignment assignment_from_json(const json& j) {
  PatternAssignment a;
  a.pattern_of_ap = j.at("pattern_of_ap").get<std::vector<int>>();
  const int d_patterns = j.at("num_patterns").get<int>();
  if (d_patterns < 1) throw std::invalid_argument("assignment: num_patterns < 1");
  a.aps_of_pattern.assign(static_cast<std::size_t>(d_patterns), {});
  for (std::size_t m = 0; m < a.pattern_of_ap.size(); ++m) {
    const int d = a.pattern_of_ap[m];
    if (d < 1 || d > d_patterns)
      throw std::invalid_argument("assignment: pattern id out of range");
    a.aps_of_pattern[static_cast<std::size_t>(d - 1)].push_back(static_cast<int>(m));
  }
  return a;
}

json patterns_to_json(const std::vector<DataPattern>& patterns) {
  json arr = json::array();
  for (const auto& pat : patterns) {
    json slots = json::array();
    for (std::size_t s = 0; s < pat.subcarriers.size(); ++s) {
      json chains = json::array();
      for (std::size_t i = 0; i < pat.subcarriers[s].size(); ++i)
        chains.push_back({{"subcarriers", pat.subcarriers[s][i]},
                          {"fingers", pat.tx_masks[s][i].fingers},
                          {"mask_length", pat.tx_masks[s][i].n}});
      slots.push_back(chains);
    }
    arr.push_back({{"d", pat.d}, {"slots", slots}});
  }
  return {{"patterns", arr}};
}

std::vector<DataPattern> patterns_from_json(const json& j) {
  std::vector<DataPattern> out;
  for (const auto& pj : j.at("patterns")) {
    DataPattern pat;
    pat.d = pj.at("d").get<int>();
    for (const auto& slot : pj.at("slots")) {
      std::vector<std::vector<int>> subs;
      std::vector<BeamspaceMask> masks;
      for (const auto& chain : slot) {
        subs.push_back(chain.at("subcarriers").get<std::vector<int>>());
        BeamspaceMask m;
        m.n = chain.at("mask_length").get<int>();
        m.fingers = chain.at("fingers").get<std::vector<int>>();
        masks.push_back(std::move(m));
      }
      pat.subcarriers.push_back(std::move(subs));
      pat.tx_masks.push_back(std::move(masks));
    }
    out.push_back(std::move(pat));
  }
  return out;
}

json truth_to_json(const GroundTruth& truth) {
  json entries = json::array();
  for (int k = 0; k < truth.num_ues; ++k)
    for (int d0 = 0; d0 < truth.num_patterns; ++d0) {
      const auto& e = truth.entry(k, d0);
      json je = {{"ue", k + 1}, {"pattern", d0 + 1}, {"detectable", e.detectable}};
      if (e.detectable) {
        je["ap"] = e.ap + 1;
        je["aod_index"] = e.aod_index;
        je["aoa_index"] = e.aoa_index;
        je["gamma"] = e.gamma;
      }
      entries.push_back(je);
    }
  json ranked = json::array();
  for (const auto& order : truth.ranked) {
    json r = json::array();
    for (int d0 : order) r.push_back(d0 + 1);
    ranked.push_back(r);
  }
  return {{"entries", entries}, {"ranked_patterns", ranked}};
}

json reports_to_json(const std::vector<UeReport>& reports) {
  json arr = json::array();
  for (const auto& rep : reports) {
    json pairs = json::array();
    for (const auto& p : rep.pairs)
      pairs.push_back({{"ue", rep.ue + 1},
                       {"pattern", p.pattern},
                       {"aod_index", p.aod_index},
                       {"aoa_index", p.aoa_index},
                       {"strength", p.strength}});
    arr.push_back({{"ue", rep.ue + 1},
                   {"position", {rep.position.x, rep.position.y}},
                   {"pairs", pairs}});
  }
  return arr;
}

std::vector<UeReport> reports_from_json(const json& j) {
  std::vector<UeReport> reports;
  for (const auto& rj : j) {
    UeReport rep;
    rep.ue = rj.at("ue").get<int>() - 1;
    rep.position = {rj.at("position").at(0).get<double>(),
                    rj.at("position").at(1).get<double>()};
    for (const auto& pj : rj.at("pairs")) {
      PairEstimate p;
      p.pattern = pj.at("pattern").get<int>();
      p.aod_index = pj.at("aod_index").get<int>();
      p.aoa_index = pj.at("aoa_index").get<int>();
      p.strength = pj.at("strength").get<double>();
      rep.pairs.push_back(p);
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

json association_to_json(const AssociationMap& map) {
  json arr = json::array();
  for (const auto& entries : map.per_ue) {
    json list = json::array();
    for (const auto& e : entries)
      list.push_back({{"ap", e.ap + 1},
                      {"tx_grid_index", e.tx_grid_index},
                      {"rx_grid_index", e.rx_grid_index}});
    if (!entries.empty())
      arr.push_back({{"ue", entries.front().ue + 1}, {"entries", list}});
  }
  return arr;
}

json stats_to_json(const DetectionStats& stats) {
  json rows = json::array();
  for (const auto& r : stats.rows)
    rows.push_back({{"estimator", to_string(r.estimator)},
                    {"assignment", to_string(r.assignment)},
                    {"D", r.d_patterns},
                    {"nu_AP", r.nu_ap},
                    {"nu_UE", r.nu_ue},
                    {"N_D", r.n_d},
                    {"T", r.t},
                    {"trials", r.trials},
                    {"successes", r.successes},
                    {"excluded", r.excluded},
                    {"prob", r.probability()},
                    {"ci95", r.ci95()}});
  return {{"drops", stats.drops}, {"seed", stats.seed}, {"rows", rows}};
}

DetectionStats stats_from_json(const json& j) {
  DetectionStats stats;
  stats.drops = j.at("drops").get<int>();
  stats.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& rj : j.at("rows")) {
    StatRow r;
    r.estimator = estimator_from_string(rj.at("estimator").get<std::string>());
    r.assignment = assignment_from_string(rj.at("assignment").get<std::string>());
    r.d_patterns = rj.at("D").get<int>();
    r.nu_ap = rj.at("nu_AP").get<int>();
    r.nu_ue = rj.at("nu_UE").get<int>();
    r.n_d = rj.at("N_D").get<int>();
    r.t = rj.at("T").get<int>();
    r.trials = rj.at("trials").get<long>();
    r.successes = rj.at("successes").get<long>();
    r.excluded = rj.value("excluded", 0L);
    stats.rows.push_back(r);
  }
  return stats;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cfba
