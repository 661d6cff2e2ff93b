// Copyright 2026 The skc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>
#include <algorithm>

#include "skc/errors.hpp"

namespace skc {

/// splitmix64 finalizer. Used to derive independent per-stream seeds:
/// restart r of a solver seeded with s runs on Rng(s ^ mix64(r)).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return seed ^ mix64(stream);
}

/// Seedable generator with platform-independent output.
///
/// The engine is mt19937_64, whose raw sequence is fixed by the standard.
/// The conversions below are written out by hand because the standard
/// distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n). Rejection sampling, no modulo bias.
  std::size_t below(std::size_t n) {
    if (n == 0) throw InvalidArgument("Rng::below: n must be positive");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

  /// Index sampled with probability proportional to weights[i].
  /// Weights must be non-negative with positive finite sum.
  std::size_t discrete(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw InvalidArgument("Rng::discrete: total weight must be positive");
    const double r = uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      last_positive = i;
      acc += weights[i];
      if (r < acc) return i;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

/// Precomputed cumulative table for repeated draws from one distribution.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> weights) : cumulative_(weights.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] < 0.0) throw InvalidArgument("DiscreteSampler: negative weight");
      acc += weights[i];
      cumulative_[i] = acc;
    }
    if (!(acc > 0.0)) throw InvalidArgument("DiscreteSampler: total weight must be positive");
  }

  std::size_t operator()(Rng& rng) const {
    const double r = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    if (it == cumulative_.end()) --it;
    // Skip zero-weight slots that share a cumulative value.
    auto idx = static_cast<std::size_t>(it - cumulative_.begin());
    while (idx > 0 && cumulative_[idx] == cumulative_[idx - 1]) --idx;
    return idx;
  }

  double total() const { return cumulative_.back(); }

 private:
  std::vector<double> cumulative_;
};

}  // namespace skc
