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

#include "cfba/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace cfba {

void DenseOperator::apply(const double* x, double* y) const {
  for (int r = 0; r < rows_; ++r) {
    const double* row = a_.data() + static_cast<std::size_t>(r) * cols_;
    double acc = 0.0;
    for (int c = 0; c < cols_; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void DenseOperator::apply_t(const double* y, double* x) const {
  std::memset(x, 0, sizeof(double) * static_cast<std::size_t>(cols_));
  for (int r = 0; r < rows_; ++r) {
    const double* row = a_.data() + static_cast<std::size_t>(r) * cols_;
    const double yr = y[r];
    if (yr == 0.0) continue;
    for (int c = 0; c < cols_; ++c) x[c] += yr * row[c];
  }
}

std::vector<double> build_sco_row(const BeamspaceMask& tx_mask,
                                  const BeamspaceMask& rx_mask) {
  if (tx_mask.fingers.empty() || rx_mask.fingers.empty())
    throw std::invalid_argument("build_sco_row: empty mask");
  std::vector<double> row(static_cast<std::size_t>(tx_mask.n) * rx_mask.n, 0.0);
  const double v = tx_mask.gain() * rx_mask.gain();
  for (int u : tx_mask.fingers)
    for (int f : rx_mask.fingers)
      row[static_cast<std::size_t>(u) * rx_mask.n + f] = v;
  return row;
}

ScoSystem::ScoSystem(const QuadraticObservables& obs, int ue, int pattern_index0,
                     int num_slots, const DataPattern& pattern,
                     const UeCodebook& codebook, int ap_grid, int ue_grid)
    : num_slots_(num_slots),
      ue_chains_(obs.ue_chains),
      ap_chains_(obs.ap_chains),
      ap_grid_(ap_grid),
      ue_grid_(ue_grid),
      sigma2_(obs.sigma2) {
  if (num_slots < 1 || num_slots > obs.num_slots)
    throw std::invalid_argument("ScoSystem: num_slots out of range");
  tx_.reserve(static_cast<std::size_t>(num_slots) * ap_chains_);
  rx_.reserve(static_cast<std::size_t>(num_slots) * ue_chains_);
  c_.reserve(static_cast<std::size_t>(num_slots) * ue_chains_ * ap_chains_);
  for (int s = 0; s < num_slots; ++s) {
    for (int i = 0; i < ap_chains_; ++i)
      tx_.push_back(&pattern.tx_masks[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)]);
    for (int j = 0; j < ue_chains_; ++j) {
      rx_.push_back(&codebook.mask(ue, s, j));
      for (int i = 0; i < ap_chains_; ++i)
        c_.push_back(obs.at(ue, pattern_index0, s, j, i));
    }
  }
}

void ScoSystem::apply(const double* x, double* y) const {
  std::vector<double> t(static_cast<std::size_t>(ap_grid_));
  for (int s = 0; s < num_slots_; ++s) {
    for (int j = 0; j < ue_chains_; ++j) {
      const BeamspaceMask& rx = *rx_[static_cast<std::size_t>(s) * ue_chains_ + j];
      for (int u = 0; u < ap_grid_; ++u) {
        const double* xu = x + static_cast<std::size_t>(u) * ue_grid_;
        double acc = 0.0;
        for (int f : rx.fingers) acc += xu[f];
        t[static_cast<std::size_t>(u)] = acc;
      }
      const double rx_gain = rx.gain();
      for (int i = 0; i < ap_chains_; ++i) {
        const BeamspaceMask& tx = *tx_[static_cast<std::size_t>(s) * ap_chains_ + i];
        double acc = 0.0;
        for (int g : tx.fingers) acc += t[static_cast<std::size_t>(g)];
        y[(static_cast<std::size_t>(s) * ue_chains_ + j) * ap_chains_ + i] =
            acc * tx.gain() * rx_gain;
      }
    }
  }
}

void ScoSystem::apply_t(const double* y, double* x) const {
  std::memset(x, 0, sizeof(double) * static_cast<std::size_t>(cols()));
  std::vector<double> a(static_cast<std::size_t>(ap_grid_));
  for (int s = 0; s < num_slots_; ++s) {
    for (int j = 0; j < ue_chains_; ++j) {
      const BeamspaceMask& rx = *rx_[static_cast<std::size_t>(s) * ue_chains_ + j];
      std::memset(a.data(), 0, sizeof(double) * a.size());
      for (int i = 0; i < ap_chains_; ++i) {
        const BeamspaceMask& tx = *tx_[static_cast<std::size_t>(s) * ap_chains_ + i];
        const double yv =
            y[(static_cast<std::size_t>(s) * ue_chains_ + j) * ap_chains_ + i] * tx.gain();
        if (yv == 0.0) continue;
        for (int g : tx.fingers) a[static_cast<std::size_t>(g)] += yv;
      }
      const double rx_gain = rx.gain();
      for (int u = 0; u < ap_grid_; ++u) {
        const double au = a[static_cast<std::size_t>(u)] * rx_gain;
        if (au == 0.0) continue;
        double* xu = x + static_cast<std::size_t>(u) * ue_grid_;
        for (int f : rx.fingers) xu[f] += au;
      }
    }
  }
}

DenseOperator ScoSystem::materialize() const {
  DenseOperator dense(rows(), cols());
  for (int s = 0; s < num_slots_; ++s)
    for (int j = 0; j < ue_chains_; ++j)
      for (int i = 0; i < ap_chains_; ++i) {
        const auto row = build_sco_row(*tx_[static_cast<std::size_t>(s) * ap_chains_ + i],
                                       *rx_[static_cast<std::size_t>(s) * ue_chains_ + j]);
        const int r = (s * ue_chains_ + j) * ap_chains_ + i;
        for (int c = 0; c < cols(); ++c) dense.at(r, c) = row[static_cast<std::size_t>(c)];
      }
  return dense;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

constexpr double kAlphaMin = 1e-15;
constexpr double kAlphaMax = 1e+15;
constexpr int kHistory = 10;

}  // namespace

NnlsResult nnls_solve(const LinearOperator& op, const std::vector<double>& c,
                      double sigma2, const NnlsOptions& options) {
  const int m = op.rows();
  const int n = op.cols();
  if (static_cast<int>(c.size()) != m)
    throw std::invalid_argument("nnls_solve: measurement size mismatch");

  std::vector<double> ct(c);
  for (auto& v : ct) v -= sigma2;

  NnlsResult res;
  res.x.assign(static_cast<std::size_t>(n), 0.0);

  std::vector<double> r(static_cast<std::size_t>(m));  // B x - ct
  for (int i = 0; i < m; ++i) r[static_cast<std::size_t>(i)] = -ct[static_cast<std::size_t>(i)];
  std::vector<double> g(static_cast<std::size_t>(n));
  op.apply_t(r.data(), g.data());
  for (auto& v : g) v *= 2.0;

  double kkt_scale = 0.0;
  for (double v : g) kkt_scale = std::max(kkt_scale, std::abs(v) * 0.5);
  double f = dot(r, r);
  if (kkt_scale == 0.0) {
    res.objective = f;
    res.converged = true;
    return res;
  }

  // first step: exact minimizer along the steepest descent direction
  std::vector<double> bd(static_cast<std::size_t>(m));
  op.apply(g.data(), bd.data());
  const double bd2 = dot(bd, bd);
  double alpha = bd2 > 0.0 ? dot(g, g) / (2.0 * bd2) : 1.0;
  alpha = std::clamp(alpha, kAlphaMin, kAlphaMax);

  std::vector<double> f_hist(kHistory, f);
  std::vector<double> x_new(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n));
  std::vector<double> g_new(static_cast<std::size_t>(n));

  for (int iter = 0; iter < options.max_iters; ++iter) {
    // KKT residual: gradient on the active set, negative part elsewhere
    double pg = 0.0;
    for (int i = 0; i < n; ++i) {
      const double gi = g[static_cast<std::size_t>(i)];
      const double v = res.x[static_cast<std::size_t>(i)] > 0.0 ? std::abs(gi) : std::max(-gi, 0.0);
      pg = std::max(pg, v);
    }
    if (pg <= options.tol * kkt_scale) {
      res.converged = true;
      res.iterations = iter;
      break;
    }

    for (int i = 0; i < n; ++i) {
      x_new[static_cast<std::size_t>(i)] =
          std::max(0.0, res.x[static_cast<std::size_t>(i)] - alpha * g[static_cast<std::size_t>(i)]);
      d[static_cast<std::size_t>(i)] = x_new[static_cast<std::size_t>(i)] - res.x[static_cast<std::size_t>(i)];
    }
    const double gd = dot(g, d);
    if (gd >= 0.0) {
      // no descent available along the projected step; treat as converged
      res.converged = true;
      res.iterations = iter;
      break;
    }
    op.apply(d.data(), bd.data());
    const double rbd = dot(r, bd);
    const double dbd = dot(bd, bd);
    const double fmax = *std::max_element(f_hist.begin(), f_hist.end());

    double lambda = 1.0;
    for (int bt = 0; bt < 60; ++bt) {
      const double f_try = f + 2.0 * lambda * rbd + lambda * lambda * dbd;
      if (f_try <= fmax + 1e-4 * lambda * gd) break;
      lambda *= 0.5;
    }

    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double step = lambda * d[static_cast<std::size_t>(i)];
      res.x[static_cast<std::size_t>(i)] += step;
      ss += step * step;
    }
    for (int i = 0; i < m; ++i) r[static_cast<std::size_t>(i)] += lambda * bd[static_cast<std::size_t>(i)];
    f = dot(r, r);
    f_hist[static_cast<std::size_t>((iter + 1) % kHistory)] = f;

    op.apply_t(r.data(), g_new.data());
    double sy = 0.0;
    for (int i = 0; i < n; ++i) {
      g_new[static_cast<std::size_t>(i)] *= 2.0;
      sy += lambda * d[static_cast<std::size_t>(i)] *
            (g_new[static_cast<std::size_t>(i)] - g[static_cast<std::size_t>(i)]);
    }
    g.swap(g_new);
    alpha = sy > 0.0 ? std::clamp(ss / sy, kAlphaMin, kAlphaMax) : kAlphaMax;

    res.iterations = iter + 1;
    if (options.observer) options.observer(res.x);
  }
  res.objective = f;
  return res;
}

ScoEstimate sco_estimate(const QuadraticObservables& obs, int ue, int pattern_index0,
                         int num_slots, const DataPattern& pattern,
                         const UeCodebook& codebook, int ap_grid, int ue_grid,
                         const NnlsOptions& options) {
  const ScoSystem system(obs, ue, pattern_index0, num_slots, pattern, codebook,
                         ap_grid, ue_grid);
  const NnlsResult sol = nnls_solve(system, system.measurements(), system.sigma2(), options);

  // xi reshaped as an (N_AP x N_UE) matrix, row-major: entry (u, u')
  int best_u = 0, best_up = 0;
  double best = -1.0;
  for (int u = 0; u < ap_grid; ++u)
    for (int up = 0; up < ue_grid; ++up) {
      const double v = sol.x[static_cast<std::size_t>(u) * ue_grid + up];
      if (v > best) {
        best = v;
        best_u = u;
        best_up = up;
      }
    }
  ScoEstimate out;
  out.pair = {best_u + 1, best_up + 1, best, pattern.d};
  out.converged = sol.converged;
  out.iterations = sol.iterations;
  return out;
}

McoAccumulation mco_make_accumulation(int ue_grid, int ap_grid) {
  McoAccumulation acc;
  acc.ue_grid = ue_grid;
  acc.ap_grid = ap_grid;
  acc.energy.assign(static_cast<std::size_t>(ue_grid) * ap_grid, 0.0);
  acc.visits.assign(static_cast<std::size_t>(ue_grid) * ap_grid, 0);
  return acc;
}

void mco_accumulate_slot(McoAccumulation& acc, const QuadraticObservables& obs,
                         int ue, int pattern_index0, int slot,
                         const DataPattern& pattern, const UeCodebook& codebook) {
  for (int j = 0; j < obs.ue_chains; ++j) {
    const BeamspaceMask& rx = codebook.mask(ue, slot, j);
    for (int i = 0; i < obs.ap_chains; ++i) {
      const BeamspaceMask& tx =
          pattern.tx_masks[static_cast<std::size_t>(slot)][static_cast<std::size_t>(i)];
      const double cval = obs.at(ue, pattern_index0, slot, j, i);
      for (int f : rx.fingers) {
        double* row = acc.energy.data() + static_cast<std::size_t>(f) * acc.ap_grid;
        long* vrow = acc.visits.data() + static_cast<std::size_t>(f) * acc.ap_grid;
        for (int g : tx.fingers) {
          row[g] += cval;
          ++vrow[g];
        }
      }
    }
  }
}

McoAccumulation mco_accumulate(const QuadraticObservables& obs, int ue,
                               int pattern_index0, int num_slots,
                               const DataPattern& pattern, const UeCodebook& codebook) {
  McoAccumulation acc = mco_make_accumulation(
      static_cast<int>(codebook.mask(ue, 0, 0).n),
      static_cast<int>(pattern.tx_masks[0][0].n));
  for (int s = 0; s < num_slots; ++s)
    mco_accumulate_slot(acc, obs, ue, pattern_index0, s, pattern, codebook);
  return acc;
}

std::optional<PairEstimate> mco_estimate(const McoAccumulation& acc,
                                         int pattern_1based) {
  bool any = false;
  for (double e : acc.energy)
    if (e != 0.0) {
      any = true;
      break;
    }
  if (!any) return std::nullopt;

  // scan in (AoD, AoA) order so ties keep the lowest pair
  int best_aod = 0, best_aoa = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int g = 0; g < acc.ap_grid; ++g)
    for (int f = 0; f < acc.ue_grid; ++f) {
      const double v = acc.average(f, g);
      if (v > best) {
        best = v;
        best_aod = g;
        best_aoa = f;
      }
    }
  return PairEstimate{best_aod + 1, best_aoa + 1, best, pattern_1based};
}

std::vector<PairEstimate> select_top_pairs(const std::vector<PairEstimate>& estimates,
                                           int n_d) {
  if (n_d > static_cast<int>(estimates.size()))
    throw std::invalid_argument("select_top_pairs: n_d exceeds available estimates");
  std::vector<PairEstimate> sorted(estimates);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const PairEstimate& a, const PairEstimate& b) {
                     if (a.strength != b.strength) return a.strength > b.strength;
                     return a.pattern < b.pattern;
                   });
  sorted.resize(static_cast<std::size_t>(n_d));
  return sorted;
}

}  // namespace cfba
