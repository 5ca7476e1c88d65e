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

#include "cfba/airlink.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace cfba {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cdouble masked_sum(const std::vector<cdouble>& v, const BeamspaceMask& mask) {
  cdouble acc = 0.0;
  for (int f : mask.fingers) acc += v[static_cast<std::size_t>(f)];
  return acc * mask.gain();
}

cdouble masked_sum_conj(const std::vector<cdouble>& v, const BeamspaceMask& mask) {
  cdouble acc = 0.0;
  for (int f : mask.fingers) acc += std::conj(v[static_cast<std::size_t>(f)]);
  return acc * mask.gain();
}

void write_u32_le(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_f64_le(std::ofstream& out, double d) {
  const std::uint64_t v = std::bit_cast<std::uint64_t>(d);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t read_u32_le(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double read_f64_le(std::ifstream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

constexpr char kObsMagic[8] = {'C', 'F', 'B', 'A', 'O', 'B', 'S', '1'};

}  // namespace

double noise_variance(double noise_psd_dbm_hz, double delta_f_hz,
                      double noise_figure_db) {
  if (delta_f_hz <= 0.0)
    throw std::invalid_argument("noise_variance: delta_f must be positive");
  const double dbm = noise_psd_dbm_hz + 10.0 * std::log10(delta_f_hz) + noise_figure_db;
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

LinkBeams precompute_link_beams(const ChannelGeometry& geom,
                                const DftDictionary& ue_dict,
                                const DftDictionary& ap_dict) {
  LinkBeams beams;
  beams.num_ues = geom.num_ues;
  beams.num_aps = geom.num_aps;
  beams.links.resize(geom.paths.size());
  for (std::size_t l = 0; l < geom.paths.size(); ++l) {
    const auto& paths = geom.paths[l];
    auto& out = beams.links[l];
    out.reserve(paths.size());
    for (const auto& p : paths) {
      PathBeams pb;
      pb.ue = beamspace_response(ue_dict, array_response(ue_dict.n, p.aoa));
      pb.ap = beamspace_response(ap_dict, array_response(ap_dict.n, p.aod));
      pb.delay = p.delay;
      pb.gain_var = p.gain_var;
      out.push_back(std::move(pb));
    }
  }
  return beams;
}

cdouble beamspace_gain(const std::vector<ChannelPath>& paths,
                       const std::vector<cdouble>& slot_gains, int subcarrier,
                       double symbol_duration, const BeamspaceMask& tx_mask,
                       const BeamspaceMask& rx_mask, const DftDictionary& ue_dict,
                       const DftDictionary& ap_dict) {
  if (paths.size() != slot_gains.size())
    throw std::invalid_argument("beamspace_gain: gains/paths size mismatch");
  cdouble acc = 0.0;
  for (std::size_t l = 0; l < paths.size(); ++l) {
    const auto& p = paths[l];
    const auto ue_bs = beamspace_response(ue_dict, array_response(ue_dict.n, p.aoa));
    const auto ap_bs = beamspace_response(ap_dict, array_response(ap_dict.n, p.aod));
    const cdouble rx = masked_sum(ue_bs, rx_mask);
    const cdouble tx = masked_sum_conj(ap_bs, tx_mask);
    const cdouble phase =
        std::polar(1.0, -kTwoPi * (subcarrier / symbol_duration) * p.delay);
    acc += slot_gains[l] * rx * tx * phase;
  }
  return acc;
}

QuadraticObservables synthesize_observables(const ChannelGeometry& geom,
                                            const LinkBeams& beams,
                                            const PatternAssignment& assignment,
                                            const std::vector<DataPattern>& patterns,
                                            const UeCodebook& codebook,
                                            const SimParams& params, int num_slots,
                                            const Rng& drop_rng) {
  const int k_ues = geom.num_ues;
  const int m_aps = geom.num_aps;
  const int d_patterns = static_cast<int>(patterns.size());
  const int n_ue = params.ue_rf_chains;
  const int n_ap = params.ap_rf_chains;
  const int q_per_chain = params.subcarriers_per_chain;
  const int symbols = params.symbols_per_slot;
  const double t0 = params.symbol_duration();

  QuadraticObservables obs;
  obs.num_ues = k_ues;
  obs.num_patterns = d_patterns;
  obs.num_slots = num_slots;
  obs.ue_chains = n_ue;
  obs.ap_chains = n_ap;
  obs.sigma2 = params.noiseless
                   ? 0.0
                   : noise_variance(params.noise_psd_dbm_hz,
                                    params.subcarrier_spacing_hz,
                                    params.noise_figure_db);
  obs.c.assign(static_cast<std::size_t>(k_ues) * d_patterns * num_slots * n_ue * n_ap,
               0.0);

  const double amp = std::sqrt(params.beta()) / std::sqrt(static_cast<double>(n_ue));

  // Per-slot complex gains, keyed by (UE, AP) so the draw is independent of
  // the pattern assignment; matched-seed runs of LB and RA then share the
  // exact same channel realizations.
  std::vector<std::vector<cdouble>> alphas(static_cast<std::size_t>(k_ues) * m_aps);
  for (int k = 0; k < k_ues; ++k) {
    for (int m = 0; m < m_aps; ++m) {
      const auto& paths = geom.link(k, m);
      if (paths.empty()) continue;
      Rng gain_rng = drop_rng.stream(kStreamSlotGains, static_cast<std::uint64_t>(k),
                                     static_cast<std::uint64_t>(m));
      auto& a = alphas[static_cast<std::size_t>(k) * m_aps + m];
      a.resize(paths.size() * static_cast<std::size_t>(num_slots));
      for (int s = 0; s < num_slots; ++s)
        for (std::size_t l = 0; l < paths.size(); ++l)
          a[static_cast<std::size_t>(s) * paths.size() + l] =
              gain_rng.complex_gaussian(paths[l].gain_var);
    }
  }

  struct PathRef {
    const PathBeams* beams;
    const std::vector<cdouble>* alphas;  // per-slot gains of the owning link
    std::size_t link_paths;              // stride for the slot index
    std::size_t path_index;
    cdouble phase_step;  // exp(-i 2 pi tau / t0)
  };

  std::vector<PathRef> refs;
  std::vector<cdouble> alpha_s, vg, ug, h, phase;
  std::vector<cdouble> sig;

  for (int k = 0; k < k_ues; ++k) {
    for (int d0 = 0; d0 < d_patterns; ++d0) {
      const auto& pat = patterns[static_cast<std::size_t>(d0)];
      const auto& ap_set = assignment.aps_of_pattern[static_cast<std::size_t>(d0)];

      refs.clear();
      for (int m : ap_set) {
        const auto& link = beams.link(k, m);
        const auto& a = alphas[static_cast<std::size_t>(k) * m_aps + m];
        for (std::size_t l = 0; l < link.size(); ++l) {
          PathRef r;
          r.beams = &link[l];
          r.alphas = &a;
          r.link_paths = link.size();
          r.path_index = l;
          r.phase_step = std::polar(1.0, -kTwoPi * link[l].delay / t0);
          refs.push_back(r);
        }
      }
      const std::size_t n_paths = refs.size();

      Rng noise_rng = drop_rng.stream(kStreamNoise, static_cast<std::uint64_t>(k),
                                      static_cast<std::uint64_t>(d0));
      const bool noisy = !params.noiseless && obs.sigma2 > 0.0;
      const double zbar_var = noisy ? obs.sigma2 / symbols : 0.0;

      alpha_s.resize(n_paths);
      vg.resize(static_cast<std::size_t>(n_ue) * n_paths);
      ug.resize(static_cast<std::size_t>(n_ap) * n_paths);
      h.resize(n_paths);
      phase.resize(n_paths);
      sig.resize(static_cast<std::size_t>(n_ue) * n_ap * q_per_chain);

      for (int s = 0; s < num_slots; ++s) {
        for (std::size_t e = 0; e < n_paths; ++e)
          alpha_s[e] = (*refs[e].alphas)[static_cast<std::size_t>(s) * refs[e].link_paths +
                                         refs[e].path_index];

        for (int j = 0; j < n_ue; ++j) {
          const BeamspaceMask& rx = codebook.mask(k, s, j);
          for (std::size_t e = 0; e < n_paths; ++e)
            vg[static_cast<std::size_t>(j) * n_paths + e] = masked_sum(refs[e].beams->ue, rx);
        }
        for (int i = 0; i < n_ap; ++i) {
          const BeamspaceMask& tx = pat.tx_masks[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
          for (std::size_t e = 0; e < n_paths; ++e)
            ug[static_cast<std::size_t>(i) * n_paths + e] =
                masked_sum_conj(refs[e].beams->ap, tx) * alpha_s[e];
        }

        for (int i = 0; i < n_ap; ++i) {
          const auto& carriers =
              pat.subcarriers[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
          for (std::size_t e = 0; e < n_paths; ++e)
            phase[e] = std::polar(
                1.0, -kTwoPi * (carriers[0] / t0) * refs[e].beams->delay);
          for (int x = 0; x < q_per_chain; ++x) {
            if (x > 0) {
              const bool consecutive =
                  carriers[static_cast<std::size_t>(x)] ==
                  carriers[static_cast<std::size_t>(x - 1)] + 1;
              for (std::size_t e = 0; e < n_paths; ++e)
                phase[e] = consecutive
                               ? phase[e] * refs[e].phase_step
                               : std::polar(1.0, -kTwoPi *
                                                     (carriers[static_cast<std::size_t>(x)] / t0) *
                                                     refs[e].beams->delay);
            }
            for (std::size_t e = 0; e < n_paths; ++e)
              h[e] = ug[static_cast<std::size_t>(i) * n_paths + e] * phase[e];
            for (int j = 0; j < n_ue; ++j) {
              cdouble acc = 0.0;
              const cdouble* vj = vg.data() + static_cast<std::size_t>(j) * n_paths;
              for (std::size_t e = 0; e < n_paths; ++e) acc += vj[e] * h[e];
              sig[(static_cast<std::size_t>(j) * n_ap + i) * q_per_chain + x] = amp * acc;
            }
          }
        }

        // Average over the S OFDM symbols of the slot. The channel is
        // constant within a slot, so sum_p |y + z_p|^2 reduces exactly to
        // S*|y + zbar|^2 + r with zbar ~ CN(0, sigma^2/S) independent of
        // r ~ Gamma(S-1, sigma^2).
        for (int j = 0; j < n_ue; ++j) {
          for (int i = 0; i < n_ap; ++i) {
            double acc = 0.0;
            const cdouble* sji = sig.data() + (static_cast<std::size_t>(j) * n_ap + i) * q_per_chain;
            if (noisy) {
              for (int x = 0; x < q_per_chain; ++x) {
                const cdouble zbar = noise_rng.complex_gaussian(zbar_var);
                const double resid = noise_rng.gamma(symbols - 1, obs.sigma2);
                acc += symbols * std::norm(sji[x] + zbar) + resid;
              }
            } else {
              for (int x = 0; x < q_per_chain; ++x) acc += symbols * std::norm(sji[x]);
            }
            obs.at(k, d0, s, j, i) = acc / (static_cast<double>(q_per_chain) * symbols);
          }
        }
      }
    }
  }
  return obs;
}

void save_observables(const std::string& path, const QuadraticObservables& obs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(kObsMagic, sizeof(kObsMagic));
  write_u32_le(out, static_cast<std::uint32_t>(obs.num_ues));
  write_u32_le(out, static_cast<std::uint32_t>(obs.num_patterns));
  write_u32_le(out, static_cast<std::uint32_t>(obs.num_slots));
  write_u32_le(out, static_cast<std::uint32_t>(obs.ue_chains));
  write_u32_le(out, static_cast<std::uint32_t>(obs.ap_chains));
  write_f64_le(out, obs.sigma2);
  for (double v : obs.c) write_f64_le(out, v);
  if (!out) throw std::runtime_error("write failed: " + path);
}

QuadraticObservables load_observables(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kObsMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not an observable dump: " + path);
  QuadraticObservables obs;
  obs.num_ues = static_cast<int>(read_u32_le(in));
  obs.num_patterns = static_cast<int>(read_u32_le(in));
  obs.num_slots = static_cast<int>(read_u32_le(in));
  obs.ue_chains = static_cast<int>(read_u32_le(in));
  obs.ap_chains = static_cast<int>(read_u32_le(in));
  obs.sigma2 = read_f64_le(in);
  const std::size_t n = static_cast<std::size_t>(obs.num_ues) * obs.num_patterns *
                        obs.num_slots * obs.ue_chains * obs.ap_chains;
  obs.c.resize(n);
  for (auto& v : obs.c) v = read_f64_le(in);
  if (!in) throw std::runtime_error("truncated observable dump: " + path);
  return obs;
}

}  // namespace cfba
