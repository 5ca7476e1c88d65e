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

#include "cfba/beamspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cfba {

namespace {
constexpr double kPi = std::numbers::pi;
}

double CMat::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data) s += std::norm(v);
  return std::sqrt(s);
}

double BeamspaceMask::gain() const {
  return 1.0 / std::sqrt(static_cast<double>(fingers.size()));
}

bool BeamspaceMask::contains(int direction) const {
  return std::binary_search(fingers.begin(), fingers.end(), direction);
}

DftDictionary dft_matrix(int n) {
  if (n < 1) throw std::invalid_argument("dft_matrix: dimension must be >= 1");
  DftDictionary dict;
  dict.n = n;
  dict.w = CMat(n, n);
  dict.grid.resize(static_cast<std::size_t>(n));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int u = 0; u < n; ++u) {
    const double s = 2.0 * u / n - 1.0;  // sin of the grid angle
    dict.grid[static_cast<std::size_t>(u)] = std::asin(s);
    for (int p = 0; p < n; ++p) {
      const double phase = 2.0 * kPi * p * (static_cast<double>(u) / n - 0.5);
      dict.w.at(p, u) = std::polar(scale, phase);
    }
  }
  return dict;
}

std::vector<cdouble> array_response(int n, double angle_rad) {
  std::vector<cdouble> a(static_cast<std::size_t>(n));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double step = kPi * std::sin(angle_rad);
  for (int k = 0; k < n; ++k) a[static_cast<std::size_t>(k)] = std::polar(scale, step * k);
  return a;
}

int nearest_grid_index(double angle_rad, int n) {
  const double s = std::sin(angle_rad);
  // The dictionary is 2-periodic in the sin domain (half-wavelength ULA
  // steering vectors at sin = -1 and sin = +1 coincide), so the distance
  // wraps: sines in the top half-bin quantize to the first column.
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int u = 0; u < n; ++u) {
    double d = std::abs(s - (2.0 * u / n - 1.0));
    d = std::min(d, 2.0 - d);
    if (d < best_d) {
      best_d = d;
      best = u;
    }
  }
  return best + 1;
}

CMat to_beamspace(const CMat& h, const DftDictionary& rx_dict,
                  const DftDictionary& tx_dict) {
  if (h.rows != rx_dict.n || h.cols != tx_dict.n)
    throw std::invalid_argument("to_beamspace: dimension mismatch");
  // tmp = W_rx^H * H
  CMat tmp(rx_dict.n, h.cols);
  for (int r = 0; r < rx_dict.n; ++r) {
    for (int c = 0; c < h.cols; ++c) {
      cdouble acc = 0.0;
      for (int p = 0; p < rx_dict.n; ++p)
        acc += std::conj(rx_dict.w.at(p, r)) * h.at(p, c);
      tmp.at(r, c) = acc;
    }
  }
  // out = tmp * W_tx
  CMat out(rx_dict.n, tx_dict.n);
  for (int r = 0; r < rx_dict.n; ++r) {
    for (int c = 0; c < tx_dict.n; ++c) {
      cdouble acc = 0.0;
      for (int p = 0; p < tx_dict.n; ++p) acc += tmp.at(r, p) * tx_dict.w.at(p, c);
      out.at(r, c) = acc;
    }
  }
  return out;
}

std::vector<cdouble> beamspace_response(const DftDictionary& dict,
                                        const std::vector<cdouble>& a) {
  if (static_cast<int>(a.size()) != dict.n)
    throw std::invalid_argument("beamspace_response: dimension mismatch");
  std::vector<cdouble> out(static_cast<std::size_t>(dict.n));
  for (int u = 0; u < dict.n; ++u) {
    cdouble acc = 0.0;
    for (int p = 0; p < dict.n; ++p) acc += std::conj(dict.w.at(p, u)) * a[static_cast<std::size_t>(p)];
    out[static_cast<std::size_t>(u)] = acc;
  }
  return out;
}

}  // namespace cfba
