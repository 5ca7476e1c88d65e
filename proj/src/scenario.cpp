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

#include "cfba/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cfba/beamspace.hpp"

namespace cfba {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSpeedOfLight = 299792458.0;

double hypot3(double dx, double dy, double dz) {
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double distance_3d(const Vec2& a, double ha, const Vec2& b, double hb) {
  return hypot3(a.x - b.x, a.y - b.y, ha - hb);
}

// wrap to (-pi, pi]
double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

double bearing(const Vec2& from, const Vec2& to) {
  return std::atan2(to.y - from.y, to.x - from.x);
}

// Local steering angle of a departing/arriving ray. An ideal half-wavelength
// ULA cannot tell front from back (the steering vector depends on the sine
// of the angle only), so rays from behind the array fold onto the mirror
// angle and every steering angle lands in [-pi/2, pi/2].
double local_angle(double global_bearing, double orientation) {
  const double a = wrap_angle(global_bearing - orientation);
  return std::asin(std::sin(a));
}

}  // namespace

double distance_2d(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

ScenarioDrop generate_drop(const SimParams& params, Rng& rng) {
  ScenarioDrop drop;
  auto draw_points = [&](int n, std::vector<Vec2>& out) {
    out.resize(static_cast<std::size_t>(n));
    for (auto& p : out) {
      p.x = rng.uniform(0.0, params.area_side);
      p.y = rng.uniform(0.0, params.area_side);
    }
  };
  draw_points(params.num_aps, drop.ap_positions);
  draw_points(params.num_ues, drop.ue_positions);
  draw_points(params.num_scatterers, drop.scatterer_positions);
  drop.ap_orientations.resize(static_cast<std::size_t>(params.num_aps));
  for (auto& o : drop.ap_orientations) o = rng.uniform(0.0, 2.0 * kPi);
  drop.ue_orientations.resize(static_cast<std::size_t>(params.num_ues));
  for (auto& o : drop.ue_orientations) o = rng.uniform(0.0, 2.0 * kPi);
  return drop;
}

double los_probability(double distance_2d, double saturation_dist, double decay_dist) {
  if (distance_2d <= saturation_dist) return 1.0;
  const double e = std::exp(-distance_2d / decay_dist);
  return (saturation_dist / distance_2d) * (1.0 - e) + e;
}

double path_loss_gain(double distance_3d, bool is_los, const SimParams& params,
                      Rng& rng) {
  if (distance_3d <= 0.0)
    throw std::invalid_argument("path_loss_gain: distance must be positive");
  const double f_ghz = params.carrier_freq_hz / 1e9;
  const double exponent = is_los ? params.pl_exponent_los : params.pl_exponent_nlos;
  double pl_db = 32.4 + 20.0 * std::log10(f_ghz) + 10.0 * exponent * std::log10(distance_3d);
  if (params.shadowing) {
    const double sigma = is_los ? params.shadow_sigma_los_db : params.shadow_sigma_nlos_db;
    pl_db += rng.gaussian(0.0, sigma);
  }
  return std::pow(10.0, -pl_db / 10.0);
}

ChannelGeometry build_channel_geometry(const ScenarioDrop& drop,
                                       const SimParams& params, Rng& rng) {
  const int m_aps = static_cast<int>(drop.ap_positions.size());
  const int k_ues = static_cast<int>(drop.ue_positions.size());
  const int n_s = static_cast<int>(drop.scatterer_positions.size());

  ChannelGeometry geom;
  geom.num_ues = k_ues;
  geom.num_aps = m_aps;
  geom.paths.resize(static_cast<std::size_t>(k_ues) * m_aps);

  const bool always_los = params.blockage == BlockageMode::kAlwaysLos;
  auto exists = [&](double d2) {
    return always_los ||
           rng.bernoulli(los_probability(d2, params.los_saturation_dist,
                                         params.los_decay_dist));
  };

  // Ray existence is sampled once per drop and per entity pair; every UE
  // sees the same AP-scatterer blockage state.
  std::vector<char> ap_scat(static_cast<std::size_t>(m_aps) * n_s);
  for (int m = 0; m < m_aps; ++m)
    for (int n = 0; n < n_s; ++n)
      ap_scat[static_cast<std::size_t>(m) * n_s + n] = exists(
          distance_2d(drop.ap_positions[static_cast<std::size_t>(m)],
                      drop.scatterer_positions[static_cast<std::size_t>(n)]));
  std::vector<char> ue_scat(static_cast<std::size_t>(k_ues) * n_s);
  for (int k = 0; k < k_ues; ++k)
    for (int n = 0; n < n_s; ++n)
      ue_scat[static_cast<std::size_t>(k) * n_s + n] = exists(
          distance_2d(drop.ue_positions[static_cast<std::size_t>(k)],
                      drop.scatterer_positions[static_cast<std::size_t>(n)]));
  std::vector<char> direct(static_cast<std::size_t>(k_ues) * m_aps);
  for (int k = 0; k < k_ues; ++k)
    for (int m = 0; m < m_aps; ++m)
      direct[static_cast<std::size_t>(k) * m_aps + m] =
          exists(distance_2d(drop.ue_positions[static_cast<std::size_t>(k)],
                             drop.ap_positions[static_cast<std::size_t>(m)]));

  const double tau_cp = params.cp_duration();
  DftDictionary ap_dict, ue_dict;
  if (params.snap_to_grid) {
    ap_dict = dft_matrix(params.ap_antennas);
    ue_dict = dft_matrix(params.ue_antennas);
  }
  auto snap = [&](double angle, const DftDictionary& dict) {
    return params.snap_to_grid
               ? dict.grid[static_cast<std::size_t>(nearest_grid_index(angle, dict.n) - 1)]
               : angle;
  };

  for (int k = 0; k < k_ues; ++k) {
    const Vec2& ue = drop.ue_positions[static_cast<std::size_t>(k)];
    const double ue_orient = drop.ue_orientations[static_cast<std::size_t>(k)];
    for (int m = 0; m < m_aps; ++m) {
      const Vec2& ap = drop.ap_positions[static_cast<std::size_t>(m)];
      const double ap_orient = drop.ap_orientations[static_cast<std::size_t>(m)];
      auto& link = geom.link(k, m);

      if (direct[static_cast<std::size_t>(k) * m_aps + m]) {
        const double d3 = distance_3d(ap, params.ap_height, ue, params.ue_height);
        ChannelPath p;
        p.gain_var = path_loss_gain(d3, /*is_los=*/true, params, rng);
        p.aod = snap(local_angle(bearing(ap, ue), ap_orient), ap_dict);
        p.aoa = snap(local_angle(bearing(ue, ap), ue_orient), ue_dict);
        p.delay = d3 / kSpeedOfLight;
        link.push_back(p);
      }

      for (int n = 0; n < n_s; ++n) {
        if (!ap_scat[static_cast<std::size_t>(m) * n_s + n] ||
            !ue_scat[static_cast<std::size_t>(k) * n_s + n])
          continue;
        const Vec2& sc = drop.scatterer_positions[static_cast<std::size_t>(n)];
        const double traveled = distance_3d(ap, params.ap_height, sc, params.scatterer_height) +
                                distance_3d(sc, params.scatterer_height, ue, params.ue_height);
        ChannelPath p;
        p.gain_var = path_loss_gain(traveled, /*is_los=*/false, params, rng);
        p.aod = snap(local_angle(bearing(ap, sc), ap_orient), ap_dict);
        p.aoa = snap(local_angle(bearing(ue, sc), ue_orient), ue_dict);
        p.delay = traveled / kSpeedOfLight;
        link.push_back(p);
      }

      // CP consistency: keep the delay spread within the cyclic prefix by
      // dropping paths arriving more than tau_CP after the first arrival.
      if (!link.empty()) {
        double first = link.front().delay;
        for (const auto& p : link) first = std::min(first, p.delay);
        const auto keep_end = std::remove_if(
            link.begin(), link.end(),
            [&](const ChannelPath& p) { return p.delay - first > tau_cp; });
        geom.truncated_paths += link.end() - keep_end;
        link.erase(keep_end, link.end());
        // direct path first when present, then by increasing delay
        std::stable_sort(link.begin(), link.end(),
                         [](const ChannelPath& a, const ChannelPath& b) {
                           return a.delay < b.delay;
                         });
      }
    }
  }
  return geom;
}

}  // namespace cfba
