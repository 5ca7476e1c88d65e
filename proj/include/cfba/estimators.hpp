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

#ifndef CFBA_ESTIMATORS_HPP
#define CFBA_ESTIMATORS_HPP

#include <functional>
#include <optional>
#include <vector>

#include "cfba/airlink.hpp"
#include "cfba/beamspace.hpp"
#include "cfba/patterns.hpp"

namespace cfba {

// Real linear map used by the NNLS solver; implemented both densely and by
// the Kronecker-structured measurement matrix.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual int rows() const = 0;
  virtual int cols() const = 0;
  virtual void apply(const double* x, double* y) const = 0;    // y = B x
  virtual void apply_t(const double* y, double* x) const = 0;  // x = B^T y
};

class DenseOperator final : public LinearOperator {
 public:
  DenseOperator(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

  double& at(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  double at(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

  int rows() const override { return rows_; }
  int cols() const override { return cols_; }
  void apply(const double* x, double* y) const override;
  void apply_t(const double* y, double* x) const override;

 private:
  int rows_;
  int cols_;
  std::vector<double> a_;
};

// Normalized measurement row (p (x) r) / (|p| |r|), where p and r are the
// beamspace power profiles of the transmit and receive masks. Column index
// is u * N_UE + u' with u the transmit (AoD) direction. Throws on an empty
// mask.
std::vector<double> build_sco_row(const BeamspaceMask& tx_mask,
                                  const BeamspaceMask& rx_mask);

// Stacked measurement system of one (UE, pattern) over T slots: rows run
// (slot outer, UE chain, AP chain inner); the operator exploits the
// Kronecker structure of the rows, `materialize` spells the same matrix
// out densely.
class ScoSystem final : public LinearOperator {
 public:
  ScoSystem(const QuadraticObservables& obs, int ue, int pattern_index0,
            int num_slots, const DataPattern& pattern, const UeCodebook& codebook,
            int ap_grid, int ue_grid);

  int rows() const override { return num_slots_ * ue_chains_ * ap_chains_; }
  int cols() const override { return ap_grid_ * ue_grid_; }
  void apply(const double* x, double* y) const override;
  void apply_t(const double* y, double* x) const override;

  const std::vector<double>& measurements() const { return c_; }
  double sigma2() const { return sigma2_; }
  DenseOperator materialize() const;

 private:
  int num_slots_;
  int ue_chains_;
  int ap_chains_;
  int ap_grid_;
  int ue_grid_;
  double sigma2_;
  std::vector<const BeamspaceMask*> tx_;  // [s * ap_chains + i]
  std::vector<const BeamspaceMask*> rx_;  // [s * ue_chains + j]
  std::vector<double> c_;
};

struct NnlsOptions {
  double tol = 1e-8;
  int max_iters = 5000;
  // Invoked with the current iterate after every accepted step.
  std::function<void(const std::vector<double>&)> observer;
};

struct NnlsResult {
  std::vector<double> x;
  double objective = 0.0;  // |B x + sigma^2 1 - c|^2 at the returned x
  int iterations = 0;
  bool converged = false;
};

// min_x |B x + sigma^2 1 - c|^2 s.t. x >= 0, solved by projected gradient
// with Barzilai-Borwein steps and a non-monotone line-search safeguard.
// Convergence is declared on the projected-gradient KKT residual relative
// to |B^T (c - sigma^2 1)|_inf; non-convergence returns the best iterate
// with converged = false.
NnlsResult nnls_solve(const LinearOperator& op, const std::vector<double>& c,
                      double sigma2, const NnlsOptions& options = {});

// Estimated (AoD, AoA) grid pair; indices are 1-based.
struct PairEstimate {
  int aod_index = 0;
  int aoa_index = 0;
  double strength = 0.0;
  int pattern = 0;  // 1-based data-pattern id
};

struct ScoEstimate {
  PairEstimate pair;
  bool converged = true;
  int iterations = 0;
};

// NNLS inversion of the stacked system; argmax of the reshaped solution,
// ties to the lowest (AoD, AoA).
ScoEstimate sco_estimate(const QuadraticObservables& obs, int ue, int pattern_index0,
                         int num_slots, const DataPattern& pattern,
                         const UeCodebook& codebook, int ap_grid, int ue_grid,
                         const NnlsOptions& options = {});

// Indicator-accumulated energy matrix (N_UE x N_AP) plus per-entry visit
// counts (how many measurements scheduled that direction pair).
struct McoAccumulation {
  int ue_grid = 0;
  int ap_grid = 0;
  std::vector<double> energy;  // [aoa * ap_grid + aod], 0-based
  std::vector<long> visits;

  double average(int aoa0, int aod0) const {
    const std::size_t idx = static_cast<std::size_t>(aoa0) * ap_grid + aod0;
    return visits[idx] > 0 ? energy[idx] / static_cast<double>(visits[idx]) : 0.0;
  }
};

McoAccumulation mco_make_accumulation(int ue_grid, int ap_grid);

// Adds all measurements of one beacon slot into the accumulation.
void mco_accumulate_slot(McoAccumulation& acc, const QuadraticObservables& obs,
                         int ue, int pattern_index0, int slot,
                         const DataPattern& pattern, const UeCodebook& codebook);

McoAccumulation mco_accumulate(const QuadraticObservables& obs, int ue,
                               int pattern_index0, int num_slots,
                               const DataPattern& pattern, const UeCodebook& codebook);

// Argmax of the visit-normalized average energy; ties to the lowest
// (AoD, AoA); an all-zero accumulation yields no detection.
std::optional<PairEstimate> mco_estimate(const McoAccumulation& acc,
                                         int pattern_1based = 0);

// The N_D strongest estimates, descending; ties by pattern id. Throws when
// n_d exceeds the number of estimates.
std::vector<PairEstimate> select_top_pairs(const std::vector<PairEstimate>& estimates,
                                           int n_d);

}  // namespace cfba

#endif  // CFBA_ESTIMATORS_HPP
