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

#include "cfba/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "cfba/serialize.hpp"

namespace cfba {

GroundTruth compute_ground_truth(const ChannelGeometry& geom,
                                 const PatternAssignment& assignment, int ap_grid,
                                 int ue_grid) {
  GroundTruth truth;
  truth.num_ues = geom.num_ues;
  truth.num_patterns = assignment.num_patterns();
  truth.entries.resize(static_cast<std::size_t>(truth.num_ues) * truth.num_patterns);
  truth.ranked.resize(static_cast<std::size_t>(truth.num_ues));

  for (int k = 0; k < truth.num_ues; ++k) {
    for (int d0 = 0; d0 < truth.num_patterns; ++d0) {
      GroundTruthEntry e;
      for (int m : assignment.aps_of_pattern[static_cast<std::size_t>(d0)]) {
        const auto& link = geom.link(k, m);
        for (std::size_t l = 0; l < link.size(); ++l) {
          if (!e.detectable || link[l].gain_var > e.gamma) {
            e.detectable = true;
            e.ap = m;
            e.path = static_cast<int>(l);
            e.gamma = link[l].gain_var;
            e.aod_index = nearest_grid_index(link[l].aod, ap_grid);
            e.aoa_index = nearest_grid_index(link[l].aoa, ue_grid);
          }
        }
      }
      truth.entries[static_cast<std::size_t>(k) * truth.num_patterns + d0] = e;
    }
    auto& order = truth.ranked[static_cast<std::size_t>(k)];
    for (int d0 = 0; d0 < truth.num_patterns; ++d0)
      if (truth.entry(k, d0).detectable) order.push_back(d0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double ga = truth.entry(k, a).gamma;
      const double gb = truth.entry(k, b).gamma;
      if (ga != gb) return ga > gb;
      return a < b;
    });
  }
  return truth;
}

DetectionCounts evaluate_detection(
    const std::vector<std::vector<std::optional<PairEstimate>>>& estimates,
    const GroundTruth& truth, int n_d) {
  DetectionCounts counts;
  for (int k = 0; k < truth.num_ues; ++k) {
    const auto& order = truth.ranked[static_cast<std::size_t>(k)];
    for (int rank = 0; rank < n_d; ++rank) {
      if (rank >= static_cast<int>(order.size())) {
        ++counts.excluded;
        continue;
      }
      const int d0 = order[static_cast<std::size_t>(rank)];
      const GroundTruthEntry& e = truth.entry(k, d0);
      const auto& est = estimates[static_cast<std::size_t>(k)][static_cast<std::size_t>(d0)];
      ++counts.trials;
      if (est && est->aod_index == e.aod_index && est->aoa_index == e.aoa_index)
        ++counts.successes;
    }
  }
  return counts;
}

AssociationMap associate_ues(const std::vector<UeReport>& reports,
                             const PatternAssignment& assignment,
                             const std::vector<Vec2>& ap_positions) {
  AssociationMap map;
  map.per_ue.resize(reports.size());
  for (std::size_t r = 0; r < reports.size(); ++r) {
    const UeReport& rep = reports[r];
    for (const PairEstimate& pair : rep.pairs) {
      const auto& candidates =
          assignment.aps_of_pattern[static_cast<std::size_t>(pair.pattern - 1)];
      if (candidates.empty()) continue;
      int best_ap = candidates.front();
      double best_d = distance_2d(rep.position, ap_positions[static_cast<std::size_t>(best_ap)]);
      for (int m : candidates) {
        const double dist = distance_2d(rep.position, ap_positions[static_cast<std::size_t>(m)]);
        if (dist < best_d) {
          best_d = dist;
          best_ap = m;
        }
      }
      map.per_ue[r].push_back({rep.ue, best_ap, pair.aod_index, pair.aoa_index});
    }
  }
  return map;
}

double StatRow::ci95() const {
  if (trials == 0) return 0.0;
  const double p = probability();
  return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

const StatRow* DetectionStats::find(EstimatorKind est, AssignmentMode asg, int t,
                                    int n_d) const {
  for (const auto& row : rows)
    if (row.estimator == est && row.assignment == asg && row.t == t && row.n_d == n_d)
      return &row;
  return nullptr;
}

namespace {

struct CellKey {
  EstimatorKind estimator;
  AssignmentMode assignment;
  int t;
  int n_d;
};

struct Tally {
  long successes = 0;
  long trials = 0;
  long excluded = 0;
};

using EstimateGrid = std::vector<std::vector<std::optional<PairEstimate>>>;

PatternAssignment make_assignment(AssignmentMode mode, const ScenarioDrop& drop,
                                  const RunConfig& config, const Rng& drop_rng,
                                  std::vector<int>* clusters_out) {
  const int d_patterns = config.params.num_patterns();
  if (mode == AssignmentMode::kLocationBased) {
    Rng rng = drop_rng.stream(kStreamAssignmentKmeans);
    LbAssignment lb = assign_patterns_lb(drop.ap_positions, d_patterns,
                                         config.kmeans_max_iters, rng);
    if (clusters_out) *clusters_out = lb.cluster_of_ap;
    return std::move(lb.assignment);
  }
  Rng rng = drop_rng.stream(kStreamAssignmentRandom);
  if (clusters_out) clusters_out->clear();
  return assign_patterns_random(static_cast<int>(drop.ap_positions.size()),
                                d_patterns, rng);
}

}  // namespace

DetectionStats run_monte_carlo(const RunConfig& config, const ProgressFn& progress) {
  config.validate();
  const SimParams& params = config.params;
  const int d_patterns = params.num_patterns();
  const int k_ues = params.num_ues;
  const int t_max = params.max_beacon_slots;
  const auto sco_grid = config.effective_sco_t_grid();

  // cell layout, also the output row order
  std::vector<CellKey> cells;
  for (EstimatorKind est : config.estimators) {
    const auto& grid = est == EstimatorKind::kSco ? sco_grid : config.t_grid;
    for (AssignmentMode asg : config.assignments)
      for (int t : grid)
        for (int nd : config.nd_values) cells.push_back({est, asg, t, nd});
  }

  std::vector<std::vector<Tally>> per_drop(static_cast<std::size_t>(config.drops));
  const DftDictionary ue_dict = dft_matrix(params.ue_antennas);
  const DftDictionary ap_dict = dft_matrix(params.ap_antennas);

  std::atomic<int> next_drop{0};
  std::atomic<int> done{0};
  std::mutex progress_mutex;

  auto worker = [&]() {
    for (;;) {
      const int drop_index = next_drop.fetch_add(1);
      if (drop_index >= config.drops) return;

      const Rng drop_rng = Rng(params.seed).stream(static_cast<std::uint64_t>(drop_index));
      Rng layout_rng = drop_rng.stream(kStreamDropLayout);
      const ScenarioDrop drop = generate_drop(params, layout_rng);
      Rng blockage_rng = drop_rng.stream(kStreamBlockage);
      const ChannelGeometry geom = build_channel_geometry(drop, params, blockage_rng);
      const LinkBeams beams = precompute_link_beams(geom, ue_dict, ap_dict);
      Rng pattern_rng = drop_rng.stream(kStreamPatterns);
      const auto patterns = build_patterns(params, t_max, pattern_rng);
      Rng codebook_rng = drop_rng.stream(kStreamUeCodebook);
      const UeCodebook codebook = build_ue_codebook(params, k_ues, t_max, codebook_rng);

      std::vector<Tally> tally(cells.size());

      for (AssignmentMode asg : config.assignments) {
        const PatternAssignment assignment =
            make_assignment(asg, drop, config, drop_rng, nullptr);
        const GroundTruth truth = compute_ground_truth(geom, assignment,
                                                       params.ap_antennas,
                                                       params.ue_antennas);
        const QuadraticObservables obs =
            synthesize_observables(geom, beams, assignment, patterns, codebook,
                                   params, t_max, drop_rng);

        for (EstimatorKind est : config.estimators) {
          const auto& grid = est == EstimatorKind::kSco ? sco_grid : config.t_grid;

          if (est == EstimatorKind::kMco) {
            std::vector<McoAccumulation> acc(
                static_cast<std::size_t>(k_ues) * d_patterns,
                mco_make_accumulation(params.ue_antennas, params.ap_antennas));
            EstimateGrid estimates(static_cast<std::size_t>(k_ues));
            for (auto& row : estimates) row.resize(static_cast<std::size_t>(d_patterns));
            std::size_t grid_pos = 0;
            for (int s = 0; s < t_max && grid_pos < grid.size(); ++s) {
              for (int k = 0; k < k_ues; ++k)
                for (int d0 = 0; d0 < d_patterns; ++d0)
                  mco_accumulate_slot(acc[static_cast<std::size_t>(k) * d_patterns + d0],
                                      obs, k, d0, s,
                                      patterns[static_cast<std::size_t>(d0)], codebook);
              if (s + 1 != grid[grid_pos]) continue;
              for (int k = 0; k < k_ues; ++k)
                for (int d0 = 0; d0 < d_patterns; ++d0)
                  estimates[static_cast<std::size_t>(k)][static_cast<std::size_t>(d0)] =
                      mco_estimate(acc[static_cast<std::size_t>(k) * d_patterns + d0], d0 + 1);
              for (int nd : config.nd_values) {
                const DetectionCounts counts = evaluate_detection(estimates, truth, nd);
                for (std::size_t ci = 0; ci < cells.size(); ++ci)
                  if (cells[ci].estimator == est && cells[ci].assignment == asg &&
                      cells[ci].t == grid[grid_pos] && cells[ci].n_d == nd) {
                    tally[ci].successes += counts.successes;
                    tally[ci].trials += counts.trials;
                    tally[ci].excluded += counts.excluded;
                  }
              }
              ++grid_pos;
            }
          } else {
            for (int t : grid) {
              EstimateGrid estimates(static_cast<std::size_t>(k_ues));
              for (auto& row : estimates) row.resize(static_cast<std::size_t>(d_patterns));
              for (int k = 0; k < k_ues; ++k)
                for (int d0 = 0; d0 < d_patterns; ++d0)
                  estimates[static_cast<std::size_t>(k)][static_cast<std::size_t>(d0)] =
                      sco_estimate(obs, k, d0, t, patterns[static_cast<std::size_t>(d0)],
                                   codebook, params.ap_antennas, params.ue_antennas)
                          .pair;
              for (int nd : config.nd_values) {
                const DetectionCounts counts = evaluate_detection(estimates, truth, nd);
                for (std::size_t ci = 0; ci < cells.size(); ++ci)
                  if (cells[ci].estimator == est && cells[ci].assignment == asg &&
                      cells[ci].t == t && cells[ci].n_d == nd) {
                    tally[ci].successes += counts.successes;
                    tally[ci].trials += counts.trials;
                    tally[ci].excluded += counts.excluded;
                  }
              }
            }
          }
        }
      }

      per_drop[static_cast<std::size_t>(drop_index)] = std::move(tally);
      const int finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(finished, config.drops);
      }
    }
  };

  int n_threads = config.threads > 0
                      ? config.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, config.drops));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  DetectionStats stats;
  stats.drops = config.drops;
  stats.seed = params.seed;
  stats.rows.reserve(cells.size());
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    StatRow row;
    row.estimator = cells[ci].estimator;
    row.assignment = cells[ci].assignment;
    row.d_patterns = d_patterns;
    row.nu_ap = params.ap_fingers;
    row.nu_ue = params.ue_fingers;
    row.n_d = cells[ci].n_d;
    row.t = cells[ci].t;
    for (const auto& tally : per_drop) {
      if (tally.empty()) continue;
      row.successes += tally[ci].successes;
      row.trials += tally[ci].trials;
      row.excluded += tally[ci].excluded;
    }
    stats.rows.push_back(row);
  }
  return stats;
}

std::string stats_to_csv(const DetectionStats& stats) {
  std::string out = "estimator,assignment,D,nu_AP,nu_UE,N_D,T,trials,successes,prob,ci95\n";
  char buf[256];
  for (const auto& r : stats.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%d,%d,%d,%d,%ld,%ld,%.9g,%.9g\n",
                  to_string(r.estimator).c_str(), to_string(r.assignment).c_str(),
                  r.d_patterns, r.nu_ap, r.nu_ue, r.n_d, r.t, r.trials, r.successes,
                  r.probability(), r.ci95());
    out += buf;
  }
  return out;
}

void export_results(const DetectionStats& stats, const std::string& path,
                    ExportFormat format) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  if (format == ExportFormat::kCsv)
    out << stats_to_csv(stats);
  else
    out << stats_to_json(stats).dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

DropArtifacts run_single_drop(const RunConfig& config, int drop_index,
                              EstimatorKind estimator, AssignmentMode assignment_mode,
                              int num_slots) {
  config.validate();
  const SimParams& params = config.params;
  if (num_slots < 1 || num_slots > params.max_beacon_slots)
    throw std::invalid_argument("run_single_drop: num_slots out of range");
  const int d_patterns = params.num_patterns();
  const int k_ues = params.num_ues;

  const DftDictionary ue_dict = dft_matrix(params.ue_antennas);
  const DftDictionary ap_dict = dft_matrix(params.ap_antennas);

  DropArtifacts art;
  const Rng drop_rng = Rng(params.seed).stream(static_cast<std::uint64_t>(drop_index));
  Rng layout_rng = drop_rng.stream(kStreamDropLayout);
  art.drop = generate_drop(params, layout_rng);
  Rng blockage_rng = drop_rng.stream(kStreamBlockage);
  art.geometry = build_channel_geometry(art.drop, params, blockage_rng);
  const LinkBeams beams = precompute_link_beams(art.geometry, ue_dict, ap_dict);
  Rng pattern_rng = drop_rng.stream(kStreamPatterns);
  const auto patterns = build_patterns(params, params.max_beacon_slots, pattern_rng);
  Rng codebook_rng = drop_rng.stream(kStreamUeCodebook);
  const UeCodebook codebook =
      build_ue_codebook(params, k_ues, params.max_beacon_slots, codebook_rng);

  art.assignment =
      make_assignment(assignment_mode, art.drop, config, drop_rng, &art.lb_cluster_of_ap);
  art.truth = compute_ground_truth(art.geometry, art.assignment, params.ap_antennas,
                                   params.ue_antennas);
  const QuadraticObservables obs =
      synthesize_observables(art.geometry, beams, art.assignment, patterns, codebook,
                             params, params.max_beacon_slots, drop_rng);

  for (int k = 0; k < k_ues; ++k) {
    std::vector<PairEstimate> per_pattern;
    for (int d0 = 0; d0 < d_patterns; ++d0) {
      if (estimator == EstimatorKind::kMco) {
        const auto est = mco_estimate(
            mco_accumulate(obs, k, d0, num_slots, patterns[static_cast<std::size_t>(d0)], codebook),
            d0 + 1);
        per_pattern.push_back(est.value_or(PairEstimate{1, 1, 0.0, d0 + 1}));
      } else {
        per_pattern.push_back(sco_estimate(obs, k, d0, num_slots,
                                           patterns[static_cast<std::size_t>(d0)], codebook,
                                           params.ap_antennas, params.ue_antennas)
                                  .pair);
      }
    }
    UeReport rep;
    rep.ue = k;
    rep.position = art.drop.ue_positions[static_cast<std::size_t>(k)];
    rep.pairs = select_top_pairs(per_pattern, params.detect_pairs);
    art.reports.push_back(std::move(rep));
  }
  art.association = associate_ues(art.reports, art.assignment, art.drop.ap_positions);
  return art;
}

}  // namespace cfba
