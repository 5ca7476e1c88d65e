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

#ifndef CFBA_PATTERNS_HPP
#define CFBA_PATTERNS_HPP

#include <vector>

#include "cfba/beamspace.hpp"
#include "cfba/params.hpp"
#include "cfba/rng.hpp"
#include "cfba/scenario.hpp"

namespace cfba {

// One orthogonal data pattern: per (beacon slot s, AP RF chain i) a set of Q
// subcarriers and a multi-finger beamspace transmit mask. Subcarrier indices
// are 0-based; across patterns and chains the sets of one slot are disjoint.
struct DataPattern {
  int d = 0;  // 1-based pattern index
  std::vector<std::vector<std::vector<int>>> subcarriers;  // [T][n_AP][Q]
  std::vector<std::vector<BeamspaceMask>> tx_masks;        // [T][n_AP]
};

// AP -> pattern map plus the inverse sets A_d.
struct PatternAssignment {
  std::vector<int> pattern_of_ap;               // [M], 1-based pattern id
  std::vector<std::vector<int>> aps_of_pattern;  // [D], 0-based AP ids

  int num_patterns() const { return static_cast<int>(aps_of_pattern.size()); }
};

struct KmeansDiag {
  std::vector<double> objective;  // sum of squared AP-centroid distances per iteration
  int iterations = 0;
  bool converged = false;
};

// Location-based assignment result; clusters are needed by callers that
// audit capacity and co-pattern separation.
struct LbAssignment {
  PatternAssignment assignment;
  std::vector<int> cluster_of_ap;  // [M], 0-based cluster id
  int num_clusters = 0;
  KmeansDiag diag;
};

// D = floor(floor(N_C / Q) / n_AP); 0 means the configuration is infeasible.
int num_patterns(int n_c, int q, int n_ap);

// Receive-beam schedule per (UE k, slot s, RF chain j).
struct UeCodebook {
  std::vector<std::vector<std::vector<BeamspaceMask>>> masks;  // [K][T][n_UE]

  const BeamspaceMask& mask(int ue, int slot, int chain) const {
    return masks[static_cast<std::size_t>(ue)][static_cast<std::size_t>(slot)]
                [static_cast<std::size_t>(chain)];
  }
};

// Builds the D patterns for T slots: contiguous disjoint subcarrier blocks
// (optionally re-permuted per slot) and pseudo-random nu_AP-finger masks.
// Whenever T*n_AP*nu_AP >= N_AP the schedule of each pattern is guaranteed
// to hit every transmit direction at least once.
std::vector<DataPattern> build_patterns(const SimParams& params, int num_slots,
                                        Rng& rng);

// Pseudo-random nu_UE-finger receive masks, with the same per-UE direction
// coverage guarantee whenever T*n_UE*nu_UE >= N_UE.
UeCodebook build_ue_codebook(const SimParams& params, int num_ues,
                             int num_slots, Rng& rng);

// Algorithm: capacity-constrained k-means over AP positions with
// ceil(M/D) centroids and at most D APs per cluster, greedy globally
// distance-sorted assignment, centroid-mean updates, and a final
// latitude-ordered pattern labeling inside each cluster.
LbAssignment assign_patterns_lb(const std::vector<Vec2>& ap_positions, int d_patterns,
                                int max_iters, Rng& rng);

// Balanced random baseline: random permutation of {1..D} tiles.
PatternAssignment assign_patterns_random(int num_aps, int d_patterns, Rng& rng);

}  // namespace cfba

#endif  // CFBA_PATTERNS_HPP
