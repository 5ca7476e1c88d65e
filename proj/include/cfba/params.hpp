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

#ifndef CFBA_PARAMS_HPP
#define CFBA_PARAMS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cfba {

enum class BlockageMode { kProbabilistic, kAlwaysLos };
enum class EstimatorKind { kMco, kSco };
enum class AssignmentMode { kLocationBased, kRandom };

std::string to_string(BlockageMode m);
std::string to_string(EstimatorKind e);
std::string to_string(AssignmentMode a);
BlockageMode blockage_mode_from_string(const std::string& s);
EstimatorKind estimator_from_string(const std::string& s);
AssignmentMode assignment_from_string(const std::string& s);

// Full physical/protocol parameter set for one simulated network.
// Defaults reproduce the reference urban deployment: 400 m x 400 m, 50 APs,
// 15 UEs, 300 scatterers, 28 GHz carrier, 500 MHz bandwidth.
struct SimParams {
  // scenario
  double area_side = 400.0;     // meters, square layout
  int num_aps = 50;             // M
  int num_ues = 15;             // K
  int num_scatterers = 300;     // N_s
  double ap_height = 10.0;      // meters
  double ue_height = 1.65;      // meters
  double scatterer_height = 5.0;

  // arrays
  int ap_antennas = 32;  // N_AP
  int ue_antennas = 16;  // N_UE
  int ap_rf_chains = 8;  // n_AP
  int ue_rf_chains = 4;  // n_UE
  int ap_fingers = 8;    // nu_AP, active beamspace directions per AP beam
  int ue_fingers = 4;    // nu_UE

  // ofdm
  double carrier_freq_hz = 28e9;
  // occupied bandwidth; 1024 subcarriers at 480 kHz (nominal 500 MHz allocation)
  double bandwidth_hz = 491.52e6;
  double subcarrier_spacing_hz = 480e3;
  double cp_fraction = 0.07;  // cyclic prefix as a fraction of 1/delta_f
  int symbols_per_slot = 14;  // S

  // protocol
  int subcarriers_per_chain = 16;  // Q
  int max_beacon_slots = 20;       // T_max
  int detect_pairs = 1;            // N_D
  bool permute_subcarriers = false;

  // power
  double tx_power_dbw = 7.0;        // P_BA over all subcarriers
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 9.0;
  bool noiseless = false;

  // channel model
  BlockageMode blockage = BlockageMode::kProbabilistic;
  bool shadowing = true;
  bool snap_to_grid = false;  // quantize path angles onto the DFT grids
  double pl_exponent_los = 2.1;
  double pl_exponent_nlos = 3.19;
  double shadow_sigma_los_db = 3.6;
  double shadow_sigma_nlos_db = 4.4;
  double los_saturation_dist = 20.0;  // meters, min(sat/d, 1) term
  double los_decay_dist = 39.0;       // meters, exp(-d/decay) term

  std::uint64_t seed = 1;

  // derived quantities
  int num_subcarriers() const;     // N_C = bandwidth / subcarrier spacing
  double cp_duration() const;      // tau_CP = cp_fraction / delta_f
  double symbol_duration() const;  // t0 = 1/delta_f + tau_CP
  double tx_power_w() const;
  double beta() const;  // per-subcarrier transmit power, P_BA / N_C
  int num_patterns() const;

  // Throws std::invalid_argument with a description on the first violated
  // invariant (counts positive, n < N, nu <= N, N_C integer, D >= 1, ...).
  void validate() const;
};

// Monte Carlo run description: which estimators/assignments to evaluate,
// the beacon-slot grid, and bookkeeping knobs.
struct RunConfig {
  SimParams params;
  int drops = 100;
  std::vector<int> t_grid = {1, 2, 5, 10, 15, 20};
  std::vector<int> sco_t_grid;  // empty -> same as t_grid
  std::vector<int> nd_values = {1, 2};
  std::vector<EstimatorKind> estimators = {EstimatorKind::kMco,
                                           EstimatorKind::kSco};
  std::vector<AssignmentMode> assignments = {AssignmentMode::kLocationBased,
                                             AssignmentMode::kRandom};
  int threads = 0;  // 0 -> hardware concurrency
  int kmeans_max_iters = 100;
  std::string output_dir;  // empty -> $CFBA_OUTPUT_DIR or "results"

  std::vector<int> effective_sco_t_grid() const {
    return sco_t_grid.empty() ? t_grid : sco_t_grid;
  }
  void validate() const;
};

// Key-value config text: INI-style sections, `key = value` lines, `#` or `;`
// comments. Keys are returned as "section.key".
std::map<std::string, std::string> parse_config_text(const std::string& text);

// Build a RunConfig from defaults plus parsed keys plus CLI-style overrides
// ("section.key=value"). Unknown keys raise std::invalid_argument. With
// `validate` false only key names and value syntax are checked; cross-field
// invariants are deferred to the caller.
RunConfig run_config_from_kv(const std::map<std::string, std::string>& kv,
                             bool validate = true);
RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides = {});
RunConfig run_config_from_overrides(const std::vector<std::string>& overrides);

// Flat "section.key -> value" view of a config, inverse of run_config_from_kv.
std::map<std::string, std::string> run_config_to_kv(const RunConfig& cfg);

}  // namespace cfba

#endif  // CFBA_PARAMS_HPP
