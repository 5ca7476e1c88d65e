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
//
// Acceptance suite. Each criterion prints one PASS/FAIL line with the
// measured quantities; the exit code is the number of failed criteria.
// Run with a list of criterion numbers to restrict, e.g. `acceptance 1 2 10`.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "cfba/harness.hpp"
#include "test_support.hpp"

using namespace cfba;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int criterion, bool pass, const std::string& name,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------- criterion 1
void criterion1() {
  const auto t0 = Clock::now();
  const int n_ue = 4, n_ap = 8;
  const auto ued = dft_matrix(n_ue);
  const auto apd = dft_matrix(n_ap);
  Rng rng(101);
  const double t_sym = 2.229e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n_paths = 1 + static_cast<int>(rng.uniform_index(4));
    std::vector<ChannelPath> paths(static_cast<std::size_t>(n_paths));
    std::vector<cdouble> alphas(static_cast<std::size_t>(n_paths));
    for (auto& path : paths) {
      path.aoa = rng.uniform(-std::numbers::pi / 2, std::numbers::pi / 2);
      path.aod = rng.uniform(-std::numbers::pi / 2, std::numbers::pi / 2);
      path.delay = rng.uniform(0.0, 145e-9);
    }
    for (auto& a : alphas) a = rng.complex_gaussian(1.0);
    const int q = static_cast<int>(rng.uniform_index(1024));
    const auto tx =
        cfba_test::random_mask(n_ap, 1 + static_cast<int>(rng.uniform_index(n_ap)), rng);
    const auto rx =
        cfba_test::random_mask(n_ue, 1 + static_cast<int>(rng.uniform_index(n_ue)), rng);

    const cdouble fast = beamspace_gain(paths, alphas, q, t_sym, tx, rx, ued, apd);

    CMat h(n_ue, n_ap);
    for (int l = 0; l < n_paths; ++l) {
      const auto a_ue = array_response(n_ue, paths[static_cast<std::size_t>(l)].aoa);
      const auto a_ap = array_response(n_ap, paths[static_cast<std::size_t>(l)].aod);
      const cdouble w = alphas[static_cast<std::size_t>(l)] *
                        std::polar(1.0, -2.0 * std::numbers::pi * (q / t_sym) *
                                            paths[static_cast<std::size_t>(l)].delay);
      for (int r = 0; r < n_ue; ++r)
        for (int c = 0; c < n_ap; ++c)
          h.at(r, c) += w * a_ue[static_cast<std::size_t>(r)] *
                        std::conj(a_ap[static_cast<std::size_t>(c)]);
    }
    const CMat bs = to_beamspace(h, ued, apd);
    cdouble dense = 0.0;
    for (int f : rx.fingers)
      for (int g : tx.fingers) dense += bs.at(f, g);
    dense *= rx.gain() * tx.gain();

    const double err = std::abs(fast - dense) / std::max(std::abs(dense), 1e-30);
    worst = std::max(worst, err);
  }
  const double dt = seconds_since(t0);
  report(1, worst < 1e-9 && dt < 10.0, "beamspace path sum equals dense DFT transform",
         fmt("200 instances, max rel err %.2e (< 1e-9), %.1f s (< 10 s)", worst, dt));
}

// ---------------------------------------------------------------- criterion 2
void criterion2() {
  const auto t0 = Clock::now();
  Rng rng(202);
  double worst_rel = 0.0;
  bool all_nonneg = true;
  bool all_converged = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 64, n = 48;
    DenseOperator op(m, n);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < n; ++c) op.at(r, c) = rng.uniform();
    const double sigma2 = 0.1;
    std::vector<double> c_meas(static_cast<std::size_t>(m));
    for (auto& v : c_meas) v = sigma2 + rng.uniform();  // generic inconsistent data

    NnlsOptions opts;
    opts.tol = 1e-8;
    opts.observer = [&](const std::vector<double>& x) {
      for (double v : x)
        if (v < 0.0) all_nonneg = false;
    };
    const NnlsResult mine = nnls_solve(op, c_meas, sigma2, opts);
    all_converged = all_converged && mine.converged;
    for (double v : mine.x)
      if (v < 0.0) all_nonneg = false;

    const auto oracle = cfba_test::pg_oracle_nnls(op, c_meas, sigma2, 1e-9);
    const double rel =
        std::abs(mine.objective - oracle.objective) / std::max(oracle.objective, 1e-30);
    worst_rel = std::max(worst_rel, rel);
  }
  const double dt = seconds_since(t0);
  report(2, worst_rel <= 1e-6 && all_nonneg && all_converged && dt < 30.0,
         "NNLS matches an independent projected-gradient oracle",
         fmt("100 instances 64x48, max objective rel diff %.2e (<= 1e-6), "
             "iterates nonneg %s, %.1f s (< 30 s)",
             worst_rel, all_nonneg ? "yes" : "NO", dt));
}

// ---------------------------------------------------------------- criterion 3
void criterion3() {
  const auto t0 = Clock::now();
  RunConfig cfg;
  cfg.params.num_aps = 8;  // one AP per pattern at D = 8
  cfg.params.num_scatterers = 0;
  cfg.params.subcarriers_per_chain = 16;
  cfg.params.blockage = BlockageMode::kAlwaysLos;
  cfg.params.snap_to_grid = true;
  cfg.params.noiseless = true;
  cfg.params.max_beacon_slots = 40;  // full coverage, large per-pair visit counts
  cfg.drops = 20;
  cfg.t_grid = {40};
  cfg.sco_t_grid = {40};
  cfg.nd_values = {1};
  cfg.assignments = {AssignmentMode::kLocationBased};
  cfg.threads = 1;
  const DetectionStats stats = run_monte_carlo(cfg);
  const StatRow* mco =
      stats.find(EstimatorKind::kMco, AssignmentMode::kLocationBased, 40, 1);
  const StatRow* sco =
      stats.find(EstimatorKind::kSco, AssignmentMode::kLocationBased, 40, 1);
  const double dt = seconds_since(t0);
  const bool pass = mco && sco && mco->trials > 0 && sco->trials > 0 &&
                    mco->successes == mco->trials && sco->successes == sco->trials &&
                    dt < 60.0;
  report(3, pass, "separable noiseless scenario detected exactly",
         fmt("20 drops, MCO %ld/%ld, SCO %ld/%ld, %.1f s (< 60 s)",
             mco ? mco->successes : -1, mco ? mco->trials : -1,
             sco ? sco->successes : -1, sco ? sco->trials : -1, dt));
}

// ---------------------------------------------------------------- criterion 4
void criterion4() {
  const auto t0 = Clock::now();
  RunConfig cfg;
  cfg.params.tx_power_dbw = -400.0;  // zero transmit power for all purposes
  cfg.params.subcarriers_per_chain = 16;
  cfg.params.max_beacon_slots = 10;
  cfg.drops = 700;
  cfg.t_grid = {10};
  cfg.nd_values = {2};
  cfg.estimators = {EstimatorKind::kMco};
  cfg.assignments = {AssignmentMode::kRandom};
  cfg.threads = 1;
  const DetectionStats stats = run_monte_carlo(cfg);
  const StatRow& row = stats.rows.front();
  const double p0 = 1.0 / 512.0;
  const double band =
      2.5758 * std::sqrt(p0 * (1.0 - p0) / static_cast<double>(row.trials));
  const double dt = seconds_since(t0);
  const bool pass =
      row.trials >= 20000 && std::abs(row.probability() - p0) <= band && dt < 300.0;
  report(4, pass, "zero transmit power sits at the 1/512 chance floor",
         fmt("%ld trials, prob %.5f vs band %.5f +- %.5f, %.0f s (< 300 s)", row.trials,
             row.probability(), p0, band, dt));
}

// ------------------------------------------------------- criteria 5, 6, 8, 9
DetectionStats run_reference_grid(double* elapsed) {
  const auto t0 = Clock::now();
  RunConfig cfg;
  cfg.params.subcarriers_per_chain = 16;  // D = 8
  cfg.drops = 100;
  cfg.t_grid = {1, 2, 5, 10, 15, 20};
  cfg.sco_t_grid = {5, 10, 20};
  cfg.nd_values = {1, 2};
  cfg.threads = 1;
  DetectionStats stats = run_monte_carlo(cfg);
  *elapsed = seconds_since(t0);
  return stats;
}

void criterion5(const DetectionStats& stats, double elapsed) {
  bool pass = true;
  std::string detail;
  for (int t : {5, 10, 20}) {
    const StatRow* mco =
        stats.find(EstimatorKind::kMco, AssignmentMode::kLocationBased, t, 1);
    const StatRow* sco =
        stats.find(EstimatorKind::kSco, AssignmentMode::kLocationBased, t, 1);
    const double delta = mco->probability() - sco->probability();
    const double need = mco->ci95() + sco->ci95();
    if (!(delta > need)) pass = false;
    detail += fmt("T=%d mco %.3f sco %.3f (delta %+.3f, need > %.3f); ", t,
                  mco->probability(), sco->probability(), delta, need);
  }
  report(5, pass && elapsed < 1800.0, "MCO exceeds SCO beyond summed CIs",
         detail + fmt("run %.0f s (< 1800 s)", elapsed));
}

void criterion6(const DetectionStats& stats) {
  bool ordered = true;
  for (int t : {5, 10, 20}) {
    const StatRow* lb =
        stats.find(EstimatorKind::kMco, AssignmentMode::kLocationBased, t, 1);
    const StatRow* ra = stats.find(EstimatorKind::kMco, AssignmentMode::kRandom, t, 1);
    if (lb->probability() < ra->probability()) ordered = false;
  }
  const StatRow* lb20 =
      stats.find(EstimatorKind::kMco, AssignmentMode::kLocationBased, 20, 1);
  const StatRow* ra20 = stats.find(EstimatorKind::kMco, AssignmentMode::kRandom, 20, 1);
  const double delta = lb20->probability() - ra20->probability();
  const double need = lb20->ci95() + ra20->ci95();
  const bool strict = delta > need;
  report(6, ordered && strict, "LB assignment beats RA",
         fmt("ordered at all T: %s; T=20 lb %.3f ra %.3f (delta %+.4f, need > %.4f)",
             ordered ? "yes" : "NO", lb20->probability(), ra20->probability(), delta,
             need));
}

// ---------------------------------------------------------------- criterion 7
void criterion7(const DetectionStats& d8_stats) {
  const auto t0 = Clock::now();
  RunConfig cfg;
  cfg.params.subcarriers_per_chain = 8;  // D = 16
  cfg.drops = 100;
  cfg.t_grid = {20};
  cfg.nd_values = {1};
  cfg.estimators = {EstimatorKind::kMco};
  cfg.assignments = {AssignmentMode::kLocationBased};
  cfg.threads = 1;
  const DetectionStats d16_stats = run_monte_carlo(cfg);
  const StatRow* d16 =
      d16_stats.find(EstimatorKind::kMco, AssignmentMode::kLocationBased, 20, 1);
  const StatRow* d8 =
      d8_stats.find(EstimatorKind::kMco, AssignmentMode::kLocationBased, 20, 1);
  const double delta = d16->probability() - d8->probability();
  const double need = d16->ci95() + d8->ci95();
  const double dt = seconds_since(t0);
  report(7, delta > need && dt < 1200.0, "D=16 beats D=8 beyond summed CIs",
         fmt("T=20 N_D=1: D16 %.3f D8 %.3f (delta %+.4f, need > %.4f), %.0f s (< 1200 s)",
             d16->probability(), d8->probability(), delta, need, dt));
}

void criterion8(const DetectionStats& stats) {
  bool pass = true;
  std::string worst;
  for (const auto& row : stats.rows) {
    if (row.n_d != 1) continue;
    const StatRow* nd2 = nullptr;
    for (const auto& other : stats.rows)
      if (other.estimator == row.estimator && other.assignment == row.assignment &&
          other.t == row.t && other.n_d == 2)
        nd2 = &other;
    if (!nd2) continue;
    if (row.probability() < nd2->probability()) {
      pass = false;
      worst = fmt("violated at %s/%s T=%d: %.3f < %.3f", to_string(row.estimator).c_str(),
                  to_string(row.assignment).c_str(), row.t, row.probability(),
                  nd2->probability());
    }
  }
  report(8, pass, "N_D=1 detection never falls below N_D=2",
         pass ? "holds across every estimator/assignment/T cell" : worst);
}

void criterion9(const DetectionStats& stats) {
  bool pass = true;
  std::string detail = "mco-lb N_D=1:";
  double prev_p = -1.0, prev_ci = 0.0;
  for (int t : {1, 2, 5, 10, 15, 20}) {
    const StatRow* row =
        stats.find(EstimatorKind::kMco, AssignmentMode::kLocationBased, t, 1);
    const double p = row->probability();
    detail += fmt(" %.3f", p);
    if (prev_p >= 0.0 && p < prev_p - prev_ci) pass = false;
    prev_p = p;
    prev_ci = row->ci95();
  }
  report(9, pass, "MCO detection is non-decreasing in T", detail);
}

// --------------------------------------------------------------- criterion 10
void criterion10() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;

  // subcarrier partition exactness for (D, Q, n_AP) in {(8,16,8), (16,8,8)}
  for (int q : {16, 8}) {
    SimParams p;
    p.subcarriers_per_chain = q;
    const int d_patterns = p.num_patterns();
    Rng rng(303);
    const auto patterns = build_patterns(p, 3, rng);
    for (int s = 0; s < 3 && pass; ++s) {
      std::set<int> seen;
      long count = 0;
      for (const auto& pat : patterns)
        for (const auto& chain : pat.subcarriers[static_cast<std::size_t>(s)]) {
          if (static_cast<int>(chain.size()) != q) pass = false;
          for (int c : chain) {
            if (!seen.insert(c).second) pass = false;
            ++count;
          }
        }
      if (count != static_cast<long>(d_patterns) * p.ap_rf_chains * q) pass = false;
    }
    detail += fmt("partition D=%d %s; ", d_patterns, pass ? "ok" : "BROKEN");
  }

  // DFT unitarity at N in {16, 32}
  for (int n : {16, 32}) {
    const auto dict = dft_matrix(n);
    double worst = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        cdouble acc = 0.0;
        for (int r = 0; r < n; ++r) acc += std::conj(dict.w.at(r, a)) * dict.w.at(r, b);
        worst = std::max(worst, std::abs(acc - cdouble(a == b ? 1.0 : 0.0)));
      }
    if (worst >= 1e-12) pass = false;
    detail += fmt("unitarity N=%d %.1e; ", n, worst);
  }

  // Algorithm-1 capacity/coverage invariants on 100 random AP layouts
  Rng master(404);
  bool lb_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int m_aps = 10 + static_cast<int>(master.uniform_index(70));
    const int d_patterns = 2 + static_cast<int>(master.uniform_index(15));
    std::vector<Vec2> aps(static_cast<std::size_t>(m_aps));
    for (auto& a : aps) {
      a.x = master.uniform(0.0, 400.0);
      a.y = master.uniform(0.0, 400.0);
    }
    Rng rng(master.next_u64());
    const LbAssignment lb = assign_patterns_lb(aps, d_patterns, 100, rng);
    std::vector<int> load(static_cast<std::size_t>(lb.num_clusters), 0);
    for (int a = 0; a < m_aps; ++a) {
      const int c = lb.cluster_of_ap[static_cast<std::size_t>(a)];
      const int d = lb.assignment.pattern_of_ap[static_cast<std::size_t>(a)];
      if (c < 0 || c >= lb.num_clusters || d < 1 || d > d_patterns) lb_ok = false;
      if (c >= 0 && c < lb.num_clusters) ++load[static_cast<std::size_t>(c)];
    }
    for (int l : load)
      if (l > d_patterns) lb_ok = false;
    for (int a = 0; a < m_aps && lb_ok; ++a)
      for (int b = a + 1; b < m_aps; ++b)
        if (lb.assignment.pattern_of_ap[static_cast<std::size_t>(a)] ==
                lb.assignment.pattern_of_ap[static_cast<std::size_t>(b)] &&
            lb.cluster_of_ap[static_cast<std::size_t>(a)] ==
                lb.cluster_of_ap[static_cast<std::size_t>(b)])
          lb_ok = false;
    for (std::size_t i = 1; i < lb.diag.objective.size(); ++i)
      if (lb.diag.objective[i] > lb.diag.objective[i - 1] + 1e-9) lb_ok = false;
  }
  if (!lb_ok) pass = false;
  detail += fmt("k-means invariants on 100 layouts %s", lb_ok ? "ok" : "VIOLATED");

  const double dt = seconds_since(t0);
  report(10, pass && dt < 60.0, "structural suite", detail + fmt("; %.1f s (< 60 s)", dt));
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  auto enabled = [&](int c) { return wanted.empty() || wanted.count(c) > 0; };

  std::printf("cfba acceptance suite (reference deployment, seed %llu)\n",
              static_cast<unsigned long long>(SimParams{}.seed));

  if (enabled(1)) criterion1();
  if (enabled(2)) criterion2();
  if (enabled(3)) criterion3();
  if (enabled(4)) criterion4();

  const bool need_grid =
      enabled(5) || enabled(6) || enabled(7) || enabled(8) || enabled(9);
  if (need_grid) {
    double elapsed = 0.0;
    const DetectionStats stats = run_reference_grid(&elapsed);
    if (enabled(5)) criterion5(stats, elapsed);
    if (enabled(6)) criterion6(stats);
    if (enabled(7)) criterion7(stats);
    if (enabled(8)) criterion8(stats);
    if (enabled(9)) criterion9(stats);
  }
  if (enabled(10)) criterion10();

  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
