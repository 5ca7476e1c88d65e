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

#ifndef CFBA_SCENARIO_HPP
#define CFBA_SCENARIO_HPP

#include <vector>

#include "cfba/params.hpp"
#include "cfba/rng.hpp"

namespace cfba {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

double distance_2d(const Vec2& a, const Vec2& b);

// One random network realization: node positions and ULA boresight
// orientations (radians, uniform in [0, 2*pi)).
struct ScenarioDrop {
  std::vector<Vec2> ap_positions;
  std::vector<Vec2> ue_positions;
  std::vector<Vec2> scatterer_positions;
  std::vector<double> ap_orientations;
  std::vector<double> ue_orientations;
};

// One propagation path of a (UE, AP) link. Angles are in the local array
// frames and lie in [-pi/2, pi/2]; the delay is the absolute traveled
// distance over c.
struct ChannelPath {
  double gain_var = 0.0;  // gamma: E|alpha|^2, linear power
  double aoa = 0.0;       // radians, UE frame
  double aod = 0.0;       // radians, AP frame
  double delay = 0.0;     // seconds
};

// Per-link path lists for all (UE, AP) pairs. An empty list is a fully
// blocked link.
struct ChannelGeometry {
  int num_ues = 0;
  int num_aps = 0;
  std::vector<std::vector<ChannelPath>> paths;  // [k * num_aps + m]
  long truncated_paths = 0;  // dropped because excess delay exceeded the CP

  std::vector<ChannelPath>& link(int ue, int ap) {
    return paths[static_cast<std::size_t>(ue) * num_aps + ap];
  }
  const std::vector<ChannelPath>& link(int ue, int ap) const {
    return paths[static_cast<std::size_t>(ue) * num_aps + ap];
  }
};

// Uniform i.i.d. positions in [0, area_side]^2 and uniform orientations.
ScenarioDrop generate_drop(const SimParams& params, Rng& rng);

// Urban-micro street-canyon LoS probability:
//   P(d) = min(sat/d, 1) * (1 - exp(-d/decay)) + exp(-d/decay),
// equal to 1 for d <= sat and monotonically non-increasing beyond.
double los_probability(double distance_2d, double saturation_dist = 20.0,
                       double decay_dist = 39.0);

// Close-in path-loss model, returns the linear power gain
//   gamma = 10^(-PL/10),  PL = 32.4 + 20*log10(f_GHz) + 10*n*log10(d_m) + X,
// with exponent and shadowing sigma chosen by LoS class. Throws on d <= 0.
double path_loss_gain(double distance_3d, bool is_los, const SimParams& params,
                      Rng& rng);

// Samples link existence (direct AP-UE rays and AP-scatterer / UE-scatterer
// rays), then builds per-link paths with gains, delays and local-frame
// angles. Rays from behind an array fold onto the mirror angle (ideal ULA
// front-back ambiguity); paths whose delay exceeds the link's first arrival
// by more than the cyclic prefix are dropped.
ChannelGeometry build_channel_geometry(const ScenarioDrop& drop,
                                       const SimParams& params, Rng& rng);

}  // namespace cfba

#endif  // CFBA_SCENARIO_HPP
