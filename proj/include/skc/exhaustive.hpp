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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "skc/errors.hpp"
#include "skc/weighted_set.hpp"

namespace skc {

/// Largest input the exhaustive solver accepts. Work is O(k * 3^n).
inline constexpr std::size_t kExhaustiveMaxPoints = 18;

struct ExhaustiveSolution {
  /// Input indices per group, groups ordered by their smallest member.
  std::vector<std::vector<std::size_t>> groups;
  /// Optimal k-means cost including the additive weight.
  double cost = 0.0;
};

namespace detail {

// Weighted within-group sum of squares for every subset of the points,
// indexed by bitmask.
inline std::vector<double> subset_costs(const WeightedSet& set) {
  const std::size_t n = set.size();
  std::vector<Index> support;
  for (const auto& p : set.points()) support.insert(support.end(), p.indices().begin(), p.indices().end());
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  const std::size_t dim = support.size();

  std::vector<double> dense(n * dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = set.point(i);
    for (std::size_t e = 0; e < p.nnz(); ++e) {
      const auto pos = std::lower_bound(support.begin(), support.end(), p.indices()[e]) - support.begin();
      dense[i * dim + static_cast<std::size_t>(pos)] = p.values()[e];
    }
  }

  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  std::vector<double> cost(std::size_t{full} + 1, 0.0);
  std::vector<double> mean(dim);
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    if ((mask & (mask - 1)) == 0) continue;  // singletons cost 0
    std::fill(mean.begin(), mean.end(), 0.0);
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1U)) continue;
      w += set.weight(i);
      for (std::size_t c = 0; c < dim; ++c) mean[c] += set.weight(i) * dense[i * dim + c];
    }
    for (double& m : mean) m /= w;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1U)) continue;
      double d2 = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double diff = dense[i * dim + c] - mean[c];
        d2 += diff * diff;
      }
      s += set.weight(i) * d2;
    }
    cost[mask] = s;
  }
  return cost;
}

}  // namespace detail

/// Exact k-means by dynamic programming over subsets.
///
/// best[j][S] = min over groups T of S containing the lowest point of S of
/// cost(T) + best[j-1][S \ T]. Every partition of the input into at most k
/// groups is covered, so the result is the true optimum. Meant for tiny
/// inputs: tests, and fixtures where a heuristic answer is not good enough.
inline ExhaustiveSolution exhaustive_kmeans(const WeightedSet& set, std::size_t k) {
  if (k == 0) throw InvalidArgument("exhaustive_kmeans: k must be >= 1");
  if (set.empty()) throw InvalidArgument("exhaustive_kmeans: empty set");
  const std::size_t n = set.size();
  if (n > kExhaustiveMaxPoints) {
    throw InvalidArgument("exhaustive_kmeans: at most " + std::to_string(kExhaustiveMaxPoints) +
                          " points supported, got " + std::to_string(n));
  }
  ExhaustiveSolution out;
  if (k >= n) {
    for (std::size_t i = 0; i < n; ++i) out.groups.push_back({i});
    out.cost = set.additive();
    return out;
  }

  const auto group_cost = detail::subset_costs(set);
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  const std::size_t states = std::size_t{full} + 1;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> prev(group_cost);  // at most one group
  prev[0] = 0.0;
  std::vector<double> cur(states, kInf);
  std::vector<std::vector<std::uint32_t>> choice(k + 1);

  for (std::size_t j = 2; j <= k; ++j) {
    choice[j].assign(states, 0);
    std::fill(cur.begin(), cur.end(), kInf);
    cur[0] = 0.0;
    const bool last = (j == k);
    for (std::uint32_t s = last ? full : 1; s <= full; ++s) {
      const std::uint32_t low = s & (~s + 1);
      const std::uint32_t rest = s ^ low;
      double best = kInf;
      std::uint32_t best_t = s;
      std::uint32_t sub = rest;
      while (true) {
        const std::uint32_t t = sub | low;
        const double v = group_cost[t] + prev[s ^ t];
        if (v < best) {
          best = v;
          best_t = t;
        }
        if (sub == 0) break;
        sub = (sub - 1) & rest;
      }
      cur[s] = best;
      choice[j][s] = best_t;
    }
    std::swap(prev, cur);
  }

  // Walk the choices back from the full set.
  std::uint32_t s = full;
  for (std::size_t j = k; j >= 1 && s != 0; --j) {
    const std::uint32_t t = (j == 1) ? s : choice[j][s];
    std::vector<std::size_t> g;
    for (std::size_t i = 0; i < n; ++i) {
      if (t >> i & 1U) g.push_back(i);
    }
    out.groups.push_back(std::move(g));
    s ^= t;
  }
  std::sort(out.groups.begin(), out.groups.end());
  out.cost = prev[full] + set.additive();
  return out;
}

/// opt(P, m) by exhaustive search; rho when m >= |P|.
inline double exhaustive_opt(const WeightedSet& set, std::size_t m) {
  return exhaustive_kmeans(set, m).cost;
}

}  // namespace skc
