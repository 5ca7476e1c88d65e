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

#include "cfba/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfba {

namespace {

constexpr int kCoverageRedraws = 50;

BeamspaceMask draw_mask(int n, int nu, Rng& rng) {
  BeamspaceMask m;
  m.n = n;
  m.fingers = rng.sample_without_replacement(n, nu);
  std::sort(m.fingers.begin(), m.fingers.end());
  return m;
}

// Schedule of `rows x chains` masks with nu fingers over n directions.
// When rows*chains*nu >= n, every direction is guaranteed to appear in at
// least one mask: a few full re-draws, then a deterministic fill that
// replaces duplicated fingers with the missing directions.
std::vector<std::vector<BeamspaceMask>> draw_covered_schedule(int rows, int chains,
                                                              int n, int nu,
                                                              Rng& rng) {
  const bool want_coverage =
      static_cast<long>(rows) * chains * nu >= static_cast<long>(n);

  auto draw_all = [&]() {
    std::vector<std::vector<BeamspaceMask>> sched(static_cast<std::size_t>(rows));
    for (auto& row : sched) {
      row.reserve(static_cast<std::size_t>(chains));
      for (int i = 0; i < chains; ++i) row.push_back(draw_mask(n, nu, rng));
    }
    return sched;
  };
  auto covered = [&](const std::vector<std::vector<BeamspaceMask>>& sched) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (const auto& row : sched)
      for (const auto& m : row)
        for (int f : m.fingers) seen[static_cast<std::size_t>(f)] = 1;
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };

  auto sched = draw_all();
  if (!want_coverage || nu == n) return sched;

  for (int attempt = 0; attempt < kCoverageRedraws && !covered(sched); ++attempt)
    sched = draw_all();
  if (covered(sched)) return sched;

  // Deterministic round-robin fill. Any missing direction can always claim
  // the slot of a direction that occurs at least twice (pigeonhole on
  // rows*chains*nu >= n).
  std::vector<int> count(static_cast<std::size_t>(n), 0);
  for (const auto& row : sched)
    for (const auto& m : row)
      for (int f : m.fingers) ++count[static_cast<std::size_t>(f)];
  int cursor = 0;
  const int total_masks = rows * chains;
  for (int dir = 0; dir < n; ++dir) {
    if (count[static_cast<std::size_t>(dir)] > 0) continue;
    bool placed = false;
    for (int step = 0; step < total_masks && !placed; ++step) {
      const int idx = (cursor + step) % total_masks;
      BeamspaceMask& m = sched[static_cast<std::size_t>(idx / chains)]
                              [static_cast<std::size_t>(idx % chains)];
      if (m.contains(dir)) continue;
      for (int& f : m.fingers) {
        if (count[static_cast<std::size_t>(f)] >= 2) {
          --count[static_cast<std::size_t>(f)];
          ++count[static_cast<std::size_t>(dir)];
          f = dir;
          std::sort(m.fingers.begin(), m.fingers.end());
          placed = true;
          cursor = (idx + 1) % total_masks;
          break;
        }
      }
    }
    if (!placed)
      throw std::logic_error("coverage fill failed despite feasible counts");
  }
  return sched;
}

}  // namespace

int num_patterns(int n_c, int q, int n_ap) {
  if (n_c < 1 || q < 1 || n_ap < 1)
    throw std::invalid_argument("num_patterns: all inputs must be positive");
  return (n_c / q) / n_ap;
}

std::vector<DataPattern> build_patterns(const SimParams& params, int num_slots,
                                        Rng& rng) {
  const int n_c = params.num_subcarriers();
  const int q = params.subcarriers_per_chain;
  const int n_ap = params.ap_rf_chains;
  const int d_patterns = num_patterns(n_c, q, n_ap);
  if (d_patterns < 1)
    throw std::invalid_argument("build_patterns: infeasible configuration, D = 0");
  if (num_slots < 1)
    throw std::invalid_argument("build_patterns: num_slots must be >= 1");

  std::vector<DataPattern> patterns(static_cast<std::size_t>(d_patterns));

  // Disjoint contiguous blocks; slot-independent unless a per-slot
  // permutation of the subcarrier plane is requested.
  std::vector<std::vector<int>> per_slot_perm;
  if (params.permute_subcarriers) {
    per_slot_perm.reserve(static_cast<std::size_t>(num_slots));
    for (int s = 0; s < num_slots; ++s) per_slot_perm.push_back(rng.permutation(n_c));
  }
  for (int d = 0; d < d_patterns; ++d) {
    auto& pat = patterns[static_cast<std::size_t>(d)];
    pat.d = d + 1;
    pat.subcarriers.resize(static_cast<std::size_t>(num_slots));
    for (int s = 0; s < num_slots; ++s) {
      auto& per_chain = pat.subcarriers[static_cast<std::size_t>(s)];
      per_chain.resize(static_cast<std::size_t>(n_ap));
      for (int i = 0; i < n_ap; ++i) {
        auto& set = per_chain[static_cast<std::size_t>(i)];
        set.resize(static_cast<std::size_t>(q));
        const int base = (d * n_ap + i) * q;
        for (int x = 0; x < q; ++x) {
          const int carrier = base + x;
          set[static_cast<std::size_t>(x)] =
              params.permute_subcarriers
                  ? per_slot_perm[static_cast<std::size_t>(s)][static_cast<std::size_t>(carrier)]
                  : carrier;
        }
      }
    }
  }
  for (auto& pat : patterns)
    pat.tx_masks = draw_covered_schedule(num_slots, n_ap, params.ap_antennas,
                                         params.ap_fingers, rng);
  return patterns;
}

UeCodebook build_ue_codebook(const SimParams& params, int num_ues, int num_slots,
                             Rng& rng) {
  if (params.ue_fingers > params.ue_antennas)
    throw std::invalid_argument("build_ue_codebook: nu_UE > N_UE");
  UeCodebook cb;
  cb.masks.reserve(static_cast<std::size_t>(num_ues));
  for (int k = 0; k < num_ues; ++k)
    cb.masks.push_back(draw_covered_schedule(num_slots, params.ue_rf_chains,
                                             params.ue_antennas, params.ue_fingers,
                                             rng));
  return cb;
}

LbAssignment assign_patterns_lb(const std::vector<Vec2>& ap_positions, int d_patterns,
                                int max_iters, Rng& rng) {
  const int m_aps = static_cast<int>(ap_positions.size());
  if (m_aps < 1) throw std::invalid_argument("assign_patterns_lb: no APs");
  if (d_patterns < 1) throw std::invalid_argument("assign_patterns_lb: D must be >= 1");

  const int n_clusters = (m_aps + d_patterns - 1) / d_patterns;  // ceil(M/D)
  std::vector<Vec2> centroids(static_cast<std::size_t>(n_clusters));
  {
    const auto pick = rng.sample_without_replacement(m_aps, n_clusters);
    for (int c = 0; c < n_clusters; ++c)
      centroids[static_cast<std::size_t>(c)] = ap_positions[static_cast<std::size_t>(pick[static_cast<std::size_t>(c)])];
  }

  struct Pair {
    double dist2;
    int ap;
    int cluster;
  };
  std::vector<Pair> pairs(static_cast<std::size_t>(m_aps) * n_clusters);

  auto greedy_assign = [&](std::vector<int>& cluster_of_ap) {
    for (int a = 0; a < m_aps; ++a)
      for (int c = 0; c < n_clusters; ++c) {
        const double dx = ap_positions[static_cast<std::size_t>(a)].x - centroids[static_cast<std::size_t>(c)].x;
        const double dy = ap_positions[static_cast<std::size_t>(a)].y - centroids[static_cast<std::size_t>(c)].y;
        pairs[static_cast<std::size_t>(a) * n_clusters + c] = {dx * dx + dy * dy, a, c};
      }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& l, const Pair& r) {
      if (l.dist2 != r.dist2) return l.dist2 < r.dist2;
      if (l.ap != r.ap) return l.ap < r.ap;
      return l.cluster < r.cluster;
    });
    cluster_of_ap.assign(static_cast<std::size_t>(m_aps), -1);
    std::vector<int> load(static_cast<std::size_t>(n_clusters), 0);
    int assigned = 0;
    for (const Pair& p : pairs) {
      if (assigned == m_aps) break;
      if (cluster_of_ap[static_cast<std::size_t>(p.ap)] >= 0) continue;
      if (load[static_cast<std::size_t>(p.cluster)] >= d_patterns) continue;
      cluster_of_ap[static_cast<std::size_t>(p.ap)] = p.cluster;
      ++load[static_cast<std::size_t>(p.cluster)];
      ++assigned;
    }
    double obj = 0.0;
    for (int a = 0; a < m_aps; ++a) {
      const int c = cluster_of_ap[static_cast<std::size_t>(a)];
      const double dx = ap_positions[static_cast<std::size_t>(a)].x - centroids[static_cast<std::size_t>(c)].x;
      const double dy = ap_positions[static_cast<std::size_t>(a)].y - centroids[static_cast<std::size_t>(c)].y;
      obj += dx * dx + dy * dy;
    }
    return obj;
  };

  LbAssignment out;
  std::vector<int> cluster_of_ap;
  double last_obj = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iters; ++iter) {
    std::vector<int> candidate;
    const double obj = greedy_assign(candidate);
    if (obj > last_obj) break;  // greedy step would raise the objective: stop
    cluster_of_ap = std::move(candidate);
    last_obj = obj;
    out.diag.objective.push_back(obj);
    out.diag.iterations = iter + 1;

    // centroid update
    std::vector<Vec2> sums(static_cast<std::size_t>(n_clusters));
    std::vector<int> counts(static_cast<std::size_t>(n_clusters), 0);
    for (int a = 0; a < m_aps; ++a) {
      const int c = cluster_of_ap[static_cast<std::size_t>(a)];
      sums[static_cast<std::size_t>(c)].x += ap_positions[static_cast<std::size_t>(a)].x;
      sums[static_cast<std::size_t>(c)].y += ap_positions[static_cast<std::size_t>(a)].y;
      ++counts[static_cast<std::size_t>(c)];
    }
    double move = 0.0;
    for (int c = 0; c < n_clusters; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) continue;
      const Vec2 nc = {sums[static_cast<std::size_t>(c)].x / counts[static_cast<std::size_t>(c)],
                       sums[static_cast<std::size_t>(c)].y / counts[static_cast<std::size_t>(c)]};
      move = std::max(move, distance_2d(nc, centroids[static_cast<std::size_t>(c)]));
      centroids[static_cast<std::size_t>(c)] = nc;
    }
    if (move < 1e-6) {
      out.diag.converged = true;
      break;
    }
  }

  // Pattern labeling: inside each cluster, northernmost AP first.
  out.cluster_of_ap = cluster_of_ap;
  out.num_clusters = n_clusters;
  out.assignment.pattern_of_ap.assign(static_cast<std::size_t>(m_aps), 0);
  out.assignment.aps_of_pattern.assign(static_cast<std::size_t>(d_patterns), {});
  for (int c = 0; c < n_clusters; ++c) {
    std::vector<int> members;
    for (int a = 0; a < m_aps; ++a)
      if (cluster_of_ap[static_cast<std::size_t>(a)] == c) members.push_back(a);
    std::sort(members.begin(), members.end(), [&](int l, int r) {
      const double yl = ap_positions[static_cast<std::size_t>(l)].y;
      const double yr = ap_positions[static_cast<std::size_t>(r)].y;
      if (yl != yr) return yl > yr;
      return l < r;
    });
    for (std::size_t rank = 0; rank < members.size(); ++rank) {
      const int pattern = static_cast<int>(rank) + 1;
      out.assignment.pattern_of_ap[static_cast<std::size_t>(members[rank])] = pattern;
      out.assignment.aps_of_pattern[static_cast<std::size_t>(pattern - 1)].push_back(members[rank]);
    }
  }
  for (auto& aps : out.assignment.aps_of_pattern) std::sort(aps.begin(), aps.end());
  return out;
}

PatternAssignment assign_patterns_random(int num_aps, int d_patterns, Rng& rng) {
  if (num_aps < 1 || d_patterns < 1)
    throw std::invalid_argument("assign_patterns_random: M and D must be >= 1");
  PatternAssignment out;
  out.pattern_of_ap.resize(static_cast<std::size_t>(num_aps));
  out.aps_of_pattern.assign(static_cast<std::size_t>(d_patterns), {});
  // Balanced draw: concatenated random permutations of {1..D}, truncated to
  // M, so per-pattern usage differs by at most one.
  int written = 0;
  while (written < num_aps) {
    const auto perm = rng.permutation(d_patterns);
    for (int i = 0; i < d_patterns && written < num_aps; ++i, ++written)
      out.pattern_of_ap[static_cast<std::size_t>(written)] = perm[static_cast<std::size_t>(i)] + 1;
  }
  for (int a = 0; a < num_aps; ++a)
    out.aps_of_pattern[static_cast<std::size_t>(out.pattern_of_ap[static_cast<std::size_t>(a)] - 1)].push_back(a);
  return out;
}

}  // namespace cfba
