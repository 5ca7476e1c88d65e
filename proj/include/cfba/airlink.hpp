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

#ifndef CFBA_AIRLINK_HPP
#define CFBA_AIRLINK_HPP

#include <string>
#include <vector>

#include "cfba/beamspace.hpp"
#include "cfba/params.hpp"
#include "cfba/patterns.hpp"
#include "cfba/rng.hpp"
#include "cfba/scenario.hpp"

namespace cfba {

// Thermal noise power per subcarrier in watts:
// sigma^2 = 10^((psd_dBm/Hz + 10*log10(delta_f) + NF_dB - 30) / 10).
double noise_variance(double noise_psd_dbm_hz, double delta_f_hz,
                      double noise_figure_db);

// Averaged quadratic observables c[k][d][s][j][i]; the sole estimator input.
struct QuadraticObservables {
  int num_ues = 0;
  int num_patterns = 0;
  int num_slots = 0;
  int ue_chains = 0;
  int ap_chains = 0;
  double sigma2 = 0.0;  // per-subcarrier noise power used in synthesis
  std::vector<double> c;

  double& at(int k, int d0, int s, int j, int i) {
    return c[(((static_cast<std::size_t>(k) * num_patterns + d0) * num_slots + s) *
                  ue_chains +
              j) *
                 ap_chains +
             i];
  }
  double at(int k, int d0, int s, int j, int i) const {
    return c[(((static_cast<std::size_t>(k) * num_patterns + d0) * num_slots + s) *
                  ue_chains +
              j) *
                 ap_chains +
             i];
  }
};

// Beamspace response of one path at both ends: W^H a(angle), precomputed
// once per drop so slot synthesis is O(L * nu) per measurement.
struct PathBeams {
  std::vector<cdouble> ue;  // length N_UE
  std::vector<cdouble> ap;  // length N_AP
  double delay = 0.0;
  double gain_var = 0.0;
};

struct LinkBeams {
  int num_ues = 0;
  int num_aps = 0;
  std::vector<std::vector<PathBeams>> links;  // [k * num_aps + m]

  const std::vector<PathBeams>& link(int ue, int ap) const {
    return links[static_cast<std::size_t>(ue) * num_aps + ap];
  }
};

LinkBeams precompute_link_beams(const ChannelGeometry& geom,
                                const DftDictionary& ue_dict,
                                const DftDictionary& ap_dict);

// v^H H(q) u evaluated by the path sum
//   sum_l alpha_l (v^H W_ue^H a_ue(phi_l)) (a_ap^H(theta_l) W_ap u)
//        * exp(-i 2 pi (q/t0) tau_l),
// identical to the dense two-sided DFT transform of the channel matrix.
// `slot_gains` holds alpha per path, aligned with `paths`.
cdouble beamspace_gain(const std::vector<ChannelPath>& paths,
                       const std::vector<cdouble>& slot_gains, int subcarrier,
                       double symbol_duration, const BeamspaceMask& tx_mask,
                       const BeamspaceMask& rx_mask, const DftDictionary& ue_dict,
                       const DftDictionary& ap_dict);

// Synthesizes the full observable tensor for the beacon phase: per-slot
// complex gains alpha ~ CN(0, gamma) keyed by (UE, AP), per-measurement
// AWGN keyed by (UE, pattern), and the per-subcarrier averaged energy of
// the received constant-symbol transmissions. Deterministic given
// `drop_rng` regardless of assignment mode.
QuadraticObservables synthesize_observables(const ChannelGeometry& geom,
                                            const LinkBeams& beams,
                                            const PatternAssignment& assignment,
                                            const std::vector<DataPattern>& patterns,
                                            const UeCodebook& codebook,
                                            const SimParams& params, int num_slots,
                                            const Rng& drop_rng);

// Flat binary serialization (little-endian doubles, dimension header).
void save_observables(const std::string& path, const QuadraticObservables& obs);
QuadraticObservables load_observables(const std::string& path);

}  // namespace cfba

#endif  // CFBA_AIRLINK_HPP
