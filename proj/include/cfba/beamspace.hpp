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

#ifndef CFBA_BEAMSPACE_HPP
#define CFBA_BEAMSPACE_HPP

#include <complex>
#include <vector>

namespace cfba {

using cdouble = std::complex<double>;

// Minimal row-major complex matrix, enough for the dictionary transforms.
struct CMat {
  int rows = 0;
  int cols = 0;
  std::vector<cdouble> data;

  CMat() = default;
  CMat(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}

  cdouble& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  const cdouble& at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }

  double frobenius_norm() const;
};

// Unitary DFT dictionary of dimension n together with its angle grid.
// Column u (0-based) steers towards grid[u], where sin(grid[u]) = 2u/n - 1.
struct DftDictionary {
  int n = 0;
  CMat w;                    // n x n, [w]_{p,u} = exp(i*2*pi*p*(u/n - 1/2)) / sqrt(n)
  std::vector<double> grid;  // ascending, grid[0] = -pi/2

  double grid_angle(int index_1based) const { return grid[static_cast<std::size_t>(index_1based - 1)]; }
};

// Sparse 0/1 beamspace beamformer: `fingers` lists the active directions
// (0-based). When used as a beamforming vector the mask is scaled by
// 1/sqrt(fingers.size()) so radiated power is independent of finger count.
struct BeamspaceMask {
  int n = 0;
  std::vector<int> fingers;  // sorted ascending, no duplicates

  int num_fingers() const { return static_cast<int>(fingers.size()); }
  double gain() const;  // 1/sqrt(num_fingers)
  bool contains(int direction) const;
};

// Dictionary per Eq.-style formula above; throws std::invalid_argument for n < 1.
DftDictionary dft_matrix(int n);

// Half-wavelength ULA response, scaled by 1/sqrt(n): entry k is
// exp(i*pi*k*sin(angle))/sqrt(n). On grid angles this equals the matching
// DFT column exactly.
std::vector<cdouble> array_response(int n, double angle_rad);

// Nearest grid point in the sin domain, 1-based; ties resolve to the lower
// index. The metric is circular with period 2: half-wavelength steering
// vectors coincide at sin = -1 and sin = +1, so the top half-bin belongs to
// column 1. `angle_rad` must lie in [-pi/2, pi/2].
int nearest_grid_index(double angle_rad, int n);

// Two-sided transform W_rx^H * H * W_tx. H is rx_dict.n x tx_dict.n.
CMat to_beamspace(const CMat& h, const DftDictionary& rx_dict,
                  const DftDictionary& tx_dict);

// W^H * a for an arbitrary response vector a of length dict.n.
std::vector<cdouble> beamspace_response(const DftDictionary& dict,
                                        const std::vector<cdouble>& a);

}  // namespace cfba

#endif  // CFBA_BEAMSPACE_HPP
