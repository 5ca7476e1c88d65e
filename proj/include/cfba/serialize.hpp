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

#ifndef CFBA_SERIALIZE_HPP
#define CFBA_SERIALIZE_HPP

#include <json.hpp>
#include <string>
#include <vector>

#include "cfba/harness.hpp"
#include "cfba/patterns.hpp"
#include "cfba/scenario.hpp"

// JSON views of the externally visible artifacts. Conventions: UE, AP,
// pattern and grid indices are 1-based in JSON; subcarrier indices are
// 0-based (they enter the subcarrier-frequency formulas directly).

namespace cfba {

using json = nlohmann::json;

json drop_to_json(const ScenarioDrop& drop);
ScenarioDrop drop_from_json(const json& j);

json geometry_to_json(const ChannelGeometry& geom);

json assignment_to_json(const PatternAssignment& assignment,
                        const std::string& mode,
                        const std::vector<int>& cluster_of_ap = {});
PatternAssignment assignment_from_json(const json& j);

json patterns_to_json(const std::vector<DataPattern>& patterns);
std::vector<DataPattern> patterns_from_json(const json& j);

json truth_to_json(const GroundTruth& truth);

json reports_to_json(const std::vector<UeReport>& reports);
std::vector<UeReport> reports_from_json(const json& j);

json association_to_json(const AssociationMap& map);

json stats_to_json(const DetectionStats& stats);
DetectionStats stats_from_json(const json& j);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace cfba

#endif  // CFBA_SERIALIZE_HPP
