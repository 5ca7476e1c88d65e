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

#ifndef CFBA_HARNESS_HPP
#define CFBA_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cfba/estimators.hpp"
#include "cfba/params.hpp"
#include "cfba/patterns.hpp"
#include "cfba/scenario.hpp"

namespace cfba {

// Per (UE, pattern) ground truth: the dominant (AP, path) over the APs
// sharing the pattern and its quantized grid pair.
struct GroundTruthEntry {
  bool detectable = false;
  int ap = -1;          // 0-based
  int path = -1;        // index into the link's path list
  int aod_index = 0;    // 1-based grid indices of the dominant path
  int aoa_index = 0;
  double gamma = 0.0;   // gain variance of the dominant path
};

struct GroundTruth {
  int num_ues = 0;
  int num_patterns = 0;
  std::vector<GroundTruthEntry> entries;   // [k * D + d0]
  std::vector<std::vector<int>> ranked;    // [k]: detectable patterns (0-based), gamma desc

  const GroundTruthEntry& entry(int ue, int pattern_index0) const {
    return entries[static_cast<std::size_t>(ue) * num_patterns + pattern_index0];
  }
};

GroundTruth compute_ground_truth(const ChannelGeometry& geom,
                                 const PatternAssignment& assignment, int ap_grid,
                                 int ue_grid);

struct DetectionCounts {
  long successes = 0;
  long trials = 0;
  long excluded = 0;  // (UE, rank) slots without a detectable pattern
};

// Detection metric: for each UE and each of its N_D truly strongest
// patterns, success iff the per-pattern estimate matches the true grid pair
// exactly. Estimates are indexed [k][d0]; a missing estimate counts as a
// failure.
DetectionCounts evaluate_detection(
    const std::vector<std::vector<std::optional<PairEstimate>>>& estimates,
    const GroundTruth& truth, int n_d);

// Phase-b report: what a UE sends back over the control channel.
struct UeReport {
  int ue = 0;  // 0-based
  Vec2 position;
  std::vector<PairEstimate> pairs;  // N_D strongest, descending
};

struct AssociationEntry {
  int ue = 0;
  int ap = 0;  // 0-based
  int tx_grid_index = 0;
  int rx_grid_index = 0;
};

struct AssociationMap {
  std::vector<std::vector<AssociationEntry>> per_ue;
};

// Network-side user-centric association: each reported pattern maps to the
// AP of that pattern nearest the UE's reported position.
AssociationMap associate_ues(const std::vector<UeReport>& reports,
                             const PatternAssignment& assignment,
                             const std::vector<Vec2>& ap_positions);

struct StatRow {
  EstimatorKind estimator = EstimatorKind::kMco;
  AssignmentMode assignment = AssignmentMode::kLocationBased;
  int d_patterns = 0;
  int nu_ap = 0;
  int nu_ue = 0;
  int n_d = 0;
  int t = 0;
  long trials = 0;
  long successes = 0;
  long excluded = 0;

  double probability() const {
    return trials > 0 ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
  }
  // normal-approximation binomial half width
  double ci95() const;
};

struct DetectionStats {
  std::vector<StatRow> rows;
  int drops = 0;
  std::uint64_t seed = 0;

  const StatRow* find(EstimatorKind est, AssignmentMode asg, int t, int n_d) const;
};

using ProgressFn = std::function<void(int done, int total)>;

// Full beacon-phase Monte Carlo: per drop generates scenario, geometry,
// patterns and assignments, synthesizes one T_max observable schedule, and
// evaluates every (estimator, assignment, T, N_D) cell on its prefix.
// Observables are matched across T values, estimators and assignment modes;
// the result is deterministic in (config, seed) regardless of threading.
DetectionStats run_monte_carlo(const RunConfig& config,
                               const ProgressFn& progress = {});

std::string stats_to_csv(const DetectionStats& stats);

enum class ExportFormat { kCsv, kJson };
void export_results(const DetectionStats& stats, const std::string& path,
                    ExportFormat format);

// Everything produced by one drop at a fixed estimator/assignment/T;
// used by the `truth` and report dumps.
struct DropArtifacts {
  ScenarioDrop drop;
  ChannelGeometry geometry;
  PatternAssignment assignment;
  std::vector<int> lb_cluster_of_ap;  // empty for random assignment
  GroundTruth truth;
  std::vector<UeReport> reports;
  AssociationMap association;
};

DropArtifacts run_single_drop(const RunConfig& config, int drop_index,
                              EstimatorKind estimator, AssignmentMode assignment,
                              int num_slots);

}  // namespace cfba

#endif  // CFBA_HARNESS_HPP
