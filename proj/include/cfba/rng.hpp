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

#ifndef CFBA_RNG_HPP
#define CFBA_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace cfba {

// Counter-style keyed RNG built on xoshiro256++. Distributions are written
// out here instead of using <random> so that a given (seed, key) pair yields
// the same stream on every platform and standard library.
//
// Streams form a tree: Rng(seed).stream(a, b, ...) derives an independent
// child keyed by the index tuple. Child streams do not depend on the order
// in which siblings are created or consumed, which keeps parallel Monte
// Carlo runs bit-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(scramble(seed)) { init_state(); }

  Rng stream(std::uint64_t a) const { return Rng(combine(key_, a), 0); }
  Rng stream(std::uint64_t a, std::uint64_t b) const {
    return Rng(combine(combine(key_, a), b), 0);
  }
  Rng stream(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
    return Rng(combine(combine(combine(key_, a), b), c), 0);
  }
  Rng stream(std::uint64_t a, std::uint64_t b, std::uint64_t c,
             std::uint64_t d) const {
    return Rng(combine(combine(combine(combine(key_, a), b), c), d), 0);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Integer in [0, n), n >= 1. Rejection keeps the draw unbiased.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via the Marsaglia polar method.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  double gaussian(double mean, double stddev) {
    return mean + stddev * gaussian();
  }

  // CN(0, var): circularly-symmetric complex normal, E|z|^2 = var.
  std::complex<double> complex_gaussian(double var) {
    const double s = std::sqrt(0.5 * var);
    return {s * gaussian(), s * gaussian()};
  }

  // Gamma(shape, scale) for shape >= 1 (Marsaglia-Tsang); shape == 0 -> 0.
  double gamma(double shape, double scale) {
    if (shape <= 0.0) return 0.0;
    double boost = 1.0;
    if (shape < 1.0) {
      // shape augmentation: G(a) = G(a+1) * U^(1/a)
      boost = std::pow(uniform_nonzero(), 1.0 / shape);
      shape += 1.0;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = gaussian();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_nonzero();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
        return boost * d * v * scale;
    }
  }

  // k distinct values from 0..n-1 via partial Fisher-Yates, ascending order
  // not guaranteed by the draw; caller sorts if needed.
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
      const int j =
          i + static_cast<int>(uniform_index(static_cast<std::uint64_t>(n - i)));
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(k));
    return idx;
  }

  std::vector<int> permutation(int n) { return sample_without_replacement(n, n); }

 private:
  Rng(std::uint64_t key, int) : key_(key) { init_state(); }

  double uniform_nonzero() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  // splitmix64 finalizer
  static std::uint64_t scramble(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t combine(std::uint64_t h, std::uint64_t x) {
    return scramble(h ^ (scramble(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
  }

  void init_state() {
    std::uint64_t sm = key_;
    for (auto& w : s_) {
      sm += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = sm;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      w = z ^ (z >> 31);
    }
    // xoshiro must not start from the all-zero state
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  std::uint64_t key_;
  std::uint64_t s_[4] = {};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Stream purpose tags used to key per-drop substreams. Values are part of
// the reproducibility contract: changing them changes every seeded run.
enum : std::uint64_t {
  kStreamDropLayout = 1,
  kStreamBlockage = 2,  // ray existence and shadow fading
  kStreamPatterns = 4,
  kStreamUeCodebook = 5,
  kStreamSlotGains = 6,
  kStreamNoise = 7,
  kStreamAssignmentRandom = 8,
  kStreamAssignmentKmeans = 9,
};

}  // namespace cfba

#endif  // CFBA_RNG_HPP
