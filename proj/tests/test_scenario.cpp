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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cfba/scenario.hpp"
#include "test_support.hpp"

using namespace cfba;

namespace {
constexpr double kC = 299792458.0;

SimParams default_params() {
  SimParams p;  // reference deployment
  return p;
}
}  // namespace

TEST_CASE("generate_drop has the requested counts and stays in the area") {
  SimParams p = default_params();
  p.validate();
  Rng rng(42);
  const ScenarioDrop drop = generate_drop(p, rng);
  CHECK(drop.ap_positions.size() == 50);
  CHECK(drop.ue_positions.size() == 15);
  CHECK(drop.scatterer_positions.size() == 300);
  for (const auto& v : drop.ap_positions) {
    CHECK(v.x >= 0.0);
    CHECK(v.x <= 400.0);
    CHECK(v.y >= 0.0);
    CHECK(v.y <= 400.0);
  }
  for (double o : drop.ap_orientations) {
    CHECK(o >= 0.0);
    CHECK(o < 2.0 * std::numbers::pi);
  }
}

TEST_CASE("generate_drop degenerate counts") {
  SimParams p = default_params();
  p.num_aps = 1;
  p.num_ues = 1;
  p.num_scatterers = 0;
  Rng rng(1);
  const ScenarioDrop drop = generate_drop(p, rng);
  CHECK(drop.ap_positions.size() == 1);
  CHECK(drop.ue_positions.size() == 1);
  CHECK(drop.scatterer_positions.empty());
}

TEST_CASE("generate_drop is deterministic in the seed") {
  SimParams p = default_params();
  Rng a(7), b(7);
  const ScenarioDrop d1 = generate_drop(p, a);
  const ScenarioDrop d2 = generate_drop(p, b);
  REQUIRE(d1.ap_positions.size() == d2.ap_positions.size());
  for (std::size_t i = 0; i < d1.ap_positions.size(); ++i) {
    CHECK(d1.ap_positions[i].x == d2.ap_positions[i].x);
    CHECK(d1.ap_positions[i].y == d2.ap_positions[i].y);
  }
  for (std::size_t i = 0; i < d1.ue_orientations.size(); ++i)
    CHECK(d1.ue_orientations[i] == d2.ue_orientations[i]);
}

TEST_CASE("los_probability closed form") {
  CHECK(los_probability(0.0) == 1.0);
  CHECK(los_probability(10.0) == 1.0);
  CHECK(los_probability(20.0) == 1.0);
  CHECK(los_probability(39.0) == doctest::Approx(0.692043830314292).epsilon(1e-12));
  CHECK(los_probability(5000.0) < 0.01);
  // non-increasing beyond the saturation distance
  double prev = 1.0;
  for (double d = 20.0; d <= 600.0; d += 1.0) {
    const double v = los_probability(d);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("path_loss_gain close-in reference and slope") {
  SimParams p = default_params();
  p.shadowing = false;
  Rng rng(3);
  const double g1 = path_loss_gain(1.0, true, p, rng);
  CHECK(-10.0 * std::log10(g1) == doctest::Approx(61.3431606268444).epsilon(1e-12));
  const double g2 = path_loss_gain(2.0, true, p, rng);
  const double delta_db = -10.0 * std::log10(g2) - (-10.0 * std::log10(g1));
  CHECK(delta_db == doctest::Approx(6.32162990894361).epsilon(1e-12));
}

TEST_CASE("path_loss_gain NLoS never beats LoS without shadowing") {
  SimParams p = default_params();
  p.shadowing = false;
  Rng rng(3);
  for (double d : {1.5, 10.0, 120.0, 400.0})
    CHECK(path_loss_gain(d, false, p, rng) <= path_loss_gain(d, true, p, rng));
}

TEST_CASE("path_loss_gain decreases strictly with distance within a class") {
  SimParams p = default_params();
  p.shadowing = false;
  Rng rng(3);
  double prev = path_loss_gain(1.0, true, p, rng);
  for (double d = 2.0; d < 500.0; d *= 1.7) {
    const double g = path_loss_gain(d, true, p, rng);
    CHECK(g < prev);
    prev = g;
  }
}

TEST_CASE("path_loss_gain rejects non-positive distance") {
  SimParams p = default_params();
  Rng rng(3);
  CHECK_THROWS_AS(path_loss_gain(0.0, true, p, rng), std::invalid_argument);
  CHECK_THROWS_AS(path_loss_gain(-1.0, false, p, rng), std::invalid_argument);
}

TEST_CASE("single LoS link: one path with tau = d3d / c") {
  SimParams p = default_params();
  p.num_aps = 1;
  p.num_ues = 1;
  p.num_scatterers = 0;
  p.blockage = BlockageMode::kAlwaysLos;
  p.shadowing = false;
  ScenarioDrop drop;
  drop.ap_positions = {{0.0, 0.0}};
  drop.ue_positions = {{50.0, 0.0}};
  drop.ap_orientations = {0.0};                  // boresight +x, towards the UE
  drop.ue_orientations = {std::numbers::pi};     // boresight -x, towards the AP
  Rng rng(5);
  const ChannelGeometry geom = build_channel_geometry(drop, p, rng);
  REQUIRE(geom.link(0, 0).size() == 1);
  const ChannelPath& path = geom.link(0, 0).front();
  const double d3 = std::sqrt(50.0 * 50.0 + (10.0 - 1.65) * (10.0 - 1.65));
  CHECK(path.delay == doctest::Approx(d3 / kC).epsilon(1e-12));
  CHECK(path.aod == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(path.aoa == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(path.gain_var > 0.0);
}

TEST_CASE("rays from behind the array fold onto the mirror angle") {
  SimParams p = default_params();
  p.num_aps = 1;
  p.num_ues = 1;
  p.num_scatterers = 0;
  p.blockage = BlockageMode::kAlwaysLos;
  ScenarioDrop drop;
  drop.ap_positions = {{0.0, 10.0}};
  drop.ue_positions = {{0.0, 0.0}};  // due south of the AP

  // both arrays boresight north: the ray leaves directly behind the AP
  // array, which an ideal ULA cannot distinguish from boresight
  drop.ap_orientations = {std::numbers::pi / 2};
  drop.ue_orientations = {std::numbers::pi / 2};
  Rng rng(5);
  const auto folded = build_channel_geometry(drop, p, rng);
  REQUIRE(folded.link(0, 0).size() == 1);
  CHECK(std::abs(folded.link(0, 0).front().aod) < 1e-12);
  CHECK(std::abs(folded.link(0, 0).front().aoa) < 1e-12);

  // AP facing south, UE facing north: boresight hit on both ends
  drop.ap_orientations = {-std::numbers::pi / 2};
  Rng rng2(5);
  const auto geom = build_channel_geometry(drop, p, rng2);
  REQUIRE(geom.link(0, 0).size() == 1);
  CHECK(std::abs(geom.link(0, 0).front().aod) < 1e-12);
  CHECK(std::abs(geom.link(0, 0).front().aoa) < 1e-12);

  // an off-axis ray from behind lands at the mirror of its wrapped angle
  drop.ap_positions = {{10.0, 10.0}};
  drop.ap_orientations = {-std::numbers::pi / 2};  // faces south
  drop.ue_orientations = {std::numbers::pi};       // faces -x: AP is behind-right
  Rng rng3(5);
  const auto mirrored = build_channel_geometry(drop, p, rng3);
  REQUIRE(mirrored.link(0, 0).size() == 1);
  // bearing UE->AP = atan2(10, 10) = pi/4, local = pi/4 - pi = -3pi/4,
  // folded to asin(sin(-3pi/4)) = -pi/4
  CHECK(mirrored.link(0, 0).front().aoa ==
        doctest::Approx(-std::numbers::pi / 4).epsilon(1e-12));
}

TEST_CASE("direct path has the minimum delay of its link") {
  SimParams p = default_params();
  p.num_aps = 4;
  p.num_ues = 3;
  p.num_scatterers = 60;
  p.blockage = BlockageMode::kAlwaysLos;  // everything exists, many paths
  Rng rng(19);
  const ScenarioDrop drop = generate_drop(p, rng);
  Rng rng2(20);
  const ChannelGeometry geom = build_channel_geometry(drop, p, rng2);
  int links_with_paths = 0;
  for (int k = 0; k < p.num_ues; ++k)
    for (int m = 0; m < p.num_aps; ++m) {
      const auto& link = geom.link(k, m);
      if (link.empty()) continue;
      ++links_with_paths;
      for (const auto& path : link) CHECK(link.front().delay <= path.delay + 1e-18);
    }
  CHECK(links_with_paths > 0);
}

TEST_CASE("paths beyond the CP excess-delay budget are dropped and counted") {
  SimParams p = default_params();
  p.num_aps = 1;
  p.num_ues = 1;
  p.num_scatterers = 1;
  p.blockage = BlockageMode::kAlwaysLos;
  ScenarioDrop drop;
  drop.ap_positions = {{0.0, 0.0}};
  drop.ue_positions = {{30.0, 0.0}};
  drop.ap_orientations = {0.0};
  drop.ue_orientations = {std::numbers::pi};
  // scatterer detour ~ 370 m over the ~30 m direct path >> c * tau_cp = 43.7 m
  drop.scatterer_positions = {{15.0, 200.0}};
  Rng rng(5);
  const ChannelGeometry geom = build_channel_geometry(drop, p, rng);
  CHECK(geom.link(0, 0).size() == 1);  // only the direct path survives
  CHECK(geom.truncated_paths == 1);

  // a nearby scatterer stays within the budget
  drop.scatterer_positions = {{15.0, 10.0}};
  Rng rng2(5);
  const ChannelGeometry geom2 = build_channel_geometry(drop, p, rng2);
  CHECK(geom2.link(0, 0).size() == 2);
  CHECK(geom2.truncated_paths == 0);
}

TEST_CASE("angles always lie in the front half-plane") {
  SimParams p = default_params();
  p.num_aps = 6;
  p.num_ues = 4;
  p.num_scatterers = 80;
  Rng layout(31);
  const ScenarioDrop drop = generate_drop(p, layout);
  Rng rng(32);
  const ChannelGeometry geom = build_channel_geometry(drop, p, rng);
  for (const auto& link : geom.paths)
    for (const auto& path : link) {
      CHECK(path.aoa >= -std::numbers::pi / 2);
      CHECK(path.aoa <= std::numbers::pi / 2);
      CHECK(path.aod >= -std::numbers::pi / 2);
      CHECK(path.aod <= std::numbers::pi / 2);
      CHECK(path.gain_var > 0.0);
      CHECK(path.delay >= 0.0);
    }
}

TEST_CASE("channel geometry is deterministic in the seed") {
  SimParams p = default_params();
  p.num_aps = 5;
  p.num_ues = 3;
  p.num_scatterers = 40;
  Rng layout(8);
  const ScenarioDrop drop = generate_drop(p, layout);
  Rng r1(9), r2(9);
  const ChannelGeometry g1 = build_channel_geometry(drop, p, r1);
  const ChannelGeometry g2 = build_channel_geometry(drop, p, r2);
  REQUIRE(g1.paths.size() == g2.paths.size());
  for (std::size_t i = 0; i < g1.paths.size(); ++i) {
    REQUIRE(g1.paths[i].size() == g2.paths[i].size());
    for (std::size_t l = 0; l < g1.paths[i].size(); ++l) {
      CHECK(g1.paths[i][l].gain_var == g2.paths[i][l].gain_var);
      CHECK(g1.paths[i][l].aoa == g2.paths[i][l].aoa);
      CHECK(g1.paths[i][l].aod == g2.paths[i][l].aod);
      CHECK(g1.paths[i][l].delay == g2.paths[i][l].delay);
    }
  }
}

TEST_CASE("mean path count stays far below the antenna counts") {
  SimParams p = default_params();  // reference urban deployment
  long total_paths = 0;
  long total_links = 0;
  for (int drop_i = 0; drop_i < 20; ++drop_i) {
    const Rng root = Rng(p.seed).stream(static_cast<std::uint64_t>(drop_i));
    Rng layout = root.stream(kStreamDropLayout);
    const ScenarioDrop drop = generate_drop(p, layout);
    Rng blockage = root.stream(kStreamBlockage);
    const ChannelGeometry geom = build_channel_geometry(drop, p, blockage);
    for (const auto& link : geom.paths) total_paths += static_cast<long>(link.size());
    total_links += static_cast<long>(geom.paths.size());
  }
  const double mean_l = static_cast<double>(total_paths) / static_cast<double>(total_links);
  CHECK(mean_l < 16.0);  // min(N_AP, N_UE) for the reference arrays
  CHECK(mean_l > 0.05);  // sanity: the map is not empty either
}

TEST_CASE("snap_to_grid quantizes every path angle onto the dictionaries") {
  SimParams p = default_params();
  p.num_aps = 4;
  p.num_ues = 2;
  p.num_scatterers = 30;
  p.snap_to_grid = true;
  p.blockage = BlockageMode::kAlwaysLos;
  Rng layout(3);
  const ScenarioDrop drop = generate_drop(p, layout);
  Rng rng(4);
  const ChannelGeometry geom = build_channel_geometry(drop, p, rng);
  const auto apd = dft_matrix(p.ap_antennas);
  const auto ued = dft_matrix(p.ue_antennas);
  int seen = 0;
  for (const auto& link : geom.paths)
    for (const auto& path : link) {
      ++seen;
      const int u = nearest_grid_index(path.aod, p.ap_antennas);
      const int up = nearest_grid_index(path.aoa, p.ue_antennas);
      CHECK(path.aod == doctest::Approx(apd.grid_angle(u)).epsilon(1e-12));
      CHECK(path.aoa == doctest::Approx(ued.grid_angle(up)).epsilon(1e-12));
    }
  CHECK(seen > 0);
}
