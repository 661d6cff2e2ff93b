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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "skc/errors.hpp"
#include "skc/exhaustive.hpp"
#include "skc/rng.hpp"
#include "skc/sparse_vector.hpp"
#include "skc/summation.hpp"
#include "skc/weighted_set.hpp"

namespace skc {

/// A query Q of k >= 1 centers. Centers need not be distinct.
class CenterSet {
 public:
  CenterSet() = default;
  explicit CenterSet(std::vector<SparseVector> centers) : centers_(std::move(centers)) {
    if (centers_.empty()) throw InvalidArgument("CenterSet: at least one center required");
    for (const auto& c : centers_) check_same_dim(centers_.front().dim(), c.dim());
  }

  std::size_t k() const noexcept { return centers_.size(); }
  Index dim() const noexcept { return centers_.empty() ? 0 : centers_.front().dim(); }
  const SparseVector& operator[](std::size_t i) const { return centers_[i]; }
  const std::vector<SparseVector>& centers() const noexcept { return centers_; }

  friend bool operator==(const CenterSet&, const CenterSet&) = default;

 private:
  std::vector<SparseVector> centers_;
};

enum class SolverMethod {
  lloyd,                ///< weighted random initial centers, then Lloyd
  kmeanspp_then_lloyd,  ///< D^2 seeding, then Lloyd
  exhaustive,           ///< exact optimum by subset DP, tiny inputs only
};

inline const char* to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::lloyd: return "lloyd";
    case SolverMethod::kmeanspp_then_lloyd: return "kmeanspp_then_lloyd";
    case SolverMethod::exhaustive: return "exhaustive";
  }
  return "?";
}

struct SolverConfig {
  SolverMethod method = SolverMethod::kmeanspp_then_lloyd;
  /// Lloyd iterations per restart.
  std::size_t iterations = 3;
  std::size_t restarts = 1;
  std::uint64_t rng_seed = 0;
  /// Stop a restart once the relative cost improvement of a Lloyd step is
  /// below this value. 0 disables early stopping.
  double convergence_tol = 0.0;

  void validate() const {
    if (iterations < 1) throw InvalidArgument("SolverConfig: iterations must be >= 1");
    if (restarts < 1) throw InvalidArgument("SolverConfig: restarts must be >= 1");
    if (!(convergence_tol >= 0.0)) throw InvalidArgument("SolverConfig: convergence_tol must be >= 0");
  }
};

namespace detail {

// Nearest-center lookup for many queries against one center set.
//
// Candidate distances come from ||p||^2 + ||q||^2 - 2<p,q> with the inner
// products gathered through an inverted index over the centers' supports,
// so a query costs O(nnz(p) log + k). That expansion cancels badly when p is
// close to q, so every center whose estimate is within the rounding bound of
// the best is re-evaluated with the exact merged walk, and ties on the exact
// value go to the lowest center index.
class NearestCenter {
 public:
  explicit NearestCenter(const CenterSet& centers) : centers_(&centers), sqnorm_(centers.k()) {
    for (std::size_t c = 0; c < centers.k(); ++c) {
      const auto& q = centers[c];
      sqnorm_[c] = q.squared_norm();
      for (std::size_t e = 0; e < q.nnz(); ++e) {
        postings_.push_back({q.indices()[e], static_cast<std::uint32_t>(c), q.values()[e]});
      }
    }
    std::sort(postings_.begin(), postings_.end(), [](const Posting& a, const Posting& b) {
      return a.index != b.index ? a.index < b.index : a.center < b.center;
    });
  }

  struct Hit {
    std::size_t center;
    double dist_sq;
  };

  Hit operator()(const SparseVector& p, std::vector<double>& scratch) const {
    const CenterSet& q = *centers_;
    check_same_dim(q.dim(), p.dim());
    const std::size_t k = q.k();
    if (k == 1) return {0, dist_sq(p, q[0])};

    scratch.assign(k, 0.0);
    for (std::size_t e = 0; e < p.nnz(); ++e) {
      const Index idx = p.indices()[e];
      auto it = std::lower_bound(postings_.begin(), postings_.end(), idx,
                                 [](const Posting& a, Index i) { return a.index < i; });
      for (; it != postings_.end() && it->index == idx; ++it) {
        scratch[it->center] += p.values()[e] * it->value;
      }
    }
    const double pn = p.squared_norm();
    double upper = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      const double est = pn + sqnorm_[c] - 2.0 * scratch[c];
      scratch[c] = est;
      upper = std::min(upper, est + slack(pn, c));
    }
    Hit best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t c = 0; c < k; ++c) {
      if (scratch[c] - slack(pn, c) > upper) continue;
      const double d = dist_sq(p, q[c]);
      if (d < best.dist_sq) best = {c, d};
    }
    return best;
  }

 private:
  struct Posting {
    Index index;
    std::uint32_t center;
    double value;
  };

  double slack(double pn, std::size_t c) const {
    return 1e-10 * (pn + sqnorm_[c]) + std::numeric_limits<double>::min();
  }

  const CenterSet* centers_;
  std::vector<double> sqnorm_;
  std::vector<Posting> postings_;
};

struct Assignment {
  std::vector<std::size_t> center;
  std::vector<double> dist_sq;
  /// sum u(p) dist^2(p, Q) + rho
  double cost = 0.0;
};

inline Assignment assign(const WeightedSet& set, const CenterSet& centers) {
  check_same_dim(set.dim(), centers.dim());
  NearestCenter nearest(centers);
  Assignment a;
  a.center.resize(set.size());
  a.dist_sq.resize(set.size());
  std::vector<double> scratch;
  CompensatedSum total;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto hit = nearest(set.point(i), scratch);
    a.center[i] = hit.center;
    a.dist_sq[i] = hit.dist_sq;
    total.add(set.weight(i) * hit.dist_sq);
  }
  total.add(set.additive());
  a.cost = total.value();
  return a;
}

// Weighted means of the clusters in `a`; centers with no points are kept.
inline CenterSet recenter(const WeightedSet& set, const CenterSet& centers, const Assignment& a) {
  const std::size_t k = centers.k();
  std::vector<CompensatedSum> mass(k);
  std::vector<std::size_t> count(k, 0), last(k, 0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    mass[a.center[i]].add(set.weight(i));
    ++count[a.center[i]];
    last[a.center[i]] = i;
  }
  std::vector<SparseAccumulator> acc;
  acc.reserve(k);
  for (std::size_t c = 0; c < k; ++c) acc.emplace_back(set.dim());
  for (std::size_t i = 0; i < set.size(); ++i) {
    const std::size_t c = a.center[i];
    if (count[c] > 1) acc[c].add(set.point(i), set.weight(i) / mass[c].value());
  }
  std::vector<SparseVector> out;
  out.reserve(k);
  for (std::size_t c = 0; c < k; ++c) {
    if (count[c] == 0) {
      out.push_back(centers[c]);
    } else if (count[c] == 1) {
      out.push_back(set.point(last[c]));  // skip the rounding of u/u
    } else {
      out.push_back(std::move(acc[c]).finish());
    }
  }
  return CenterSet(std::move(out));
}

}  // namespace detail

/// cost(P, Q) = sum u(p) * min_q ||p - q||^2 + rho.
inline double cost(const WeightedSet& set, const CenterSet& centers) {
  return detail::assign(set, centers).cost;
}

/// Partition of a weighted set by its nearest centers.
struct Partition {
  /// Non-empty parts, ordered by center index. Each carries rho / parts.size().
  std::vector<WeightedSet> parts;
  /// Center index owning parts[i].
  std::vector<std::size_t> part_center;
  /// Input point indices that make up parts[i], ascending.
  std::vector<std::vector<std::size_t>> members;
  /// Owning center index for every input point.
  std::vector<std::size_t> assignment;
};

/// Assigns every point to its nearest center, ties to the lowest center
/// index. Empty parts are not emitted, and the additive weight is split
/// evenly over the parts that are.
inline Partition partition(const WeightedSet& set, const CenterSet& centers) {
  const auto a = detail::assign(set, centers);
  Partition out;
  out.assignment = a.center;
  std::vector<std::vector<std::size_t>> by_center(centers.k());
  for (std::size_t i = 0; i < set.size(); ++i) by_center[a.center[i]].push_back(i);
  std::size_t nonempty = 0;
  for (const auto& m : by_center) nonempty += m.empty() ? 0 : 1;
  const double share = nonempty == 0 ? 0.0 : set.additive() / static_cast<double>(nonempty);
  for (std::size_t c = 0; c < centers.k(); ++c) {
    if (by_center[c].empty()) continue;
    std::vector<SparseVector> pts;
    std::vector<double> ws;
    pts.reserve(by_center[c].size());
    ws.reserve(by_center[c].size());
    for (std::size_t i : by_center[c]) {
      pts.push_back(set.point(i));
      ws.push_back(set.weight(i));
    }
    out.parts.emplace_back(set.dim(), std::move(pts), std::move(ws), share);
    out.part_center.push_back(c);
    out.members.push_back(std::move(by_center[c]));
  }
  return out;
}

/// One Lloyd update: every center moves to the weighted mean of the points
/// it owns. Centers that own nothing stay where they are.
inline CenterSet lloyd_step(const WeightedSet& set, const CenterSet& centers) {
  if (set.empty()) return centers;
  return detail::recenter(set, centers, detail::assign(set, centers));
}

namespace detail {

inline std::vector<std::size_t> kmeanspp_indices(const WeightedSet& set, std::size_t k, Rng& rng) {
  const std::size_t n = set.size();
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  chosen.push_back(rng.discrete(set.weights()));
  std::vector<double> mind(n);
  for (std::size_t i = 0; i < n; ++i) mind[i] = dist_sq(set.point(i), set.point(chosen[0]));
  std::vector<double> prob(n);
  while (chosen.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      prob[i] = set.weight(i) * mind[i];
      total += prob[i];
    }
    // Every point already sits on a center: fall back to the weights and
    // accept duplicate centers.
    const std::size_t next = total > 0.0 ? rng.discrete(prob) : rng.discrete(set.weights());
    chosen.push_back(next);
    for (std::size_t i = 0; i < n; ++i) {
      mind[i] = std::min(mind[i], dist_sq(set.point(i), set.point(next)));
    }
  }
  return chosen;
}

// k distinct points drawn by weight without replacement, duplicates once
// the set is exhausted.
inline std::vector<std::size_t> weighted_pick_indices(const WeightedSet& set, std::size_t k, Rng& rng) {
  std::vector<double> w = set.weights();
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  while (chosen.size() < k) {
    double total = 0.0;
    for (double x : w) total += x;
    if (total > 0.0) {
      const std::size_t i = rng.discrete(w);
      chosen.push_back(i);
      w[i] = 0.0;
    } else {
      chosen.push_back(rng.discrete(set.weights()));
    }
  }
  return chosen;
}

inline CenterSet centers_from(const WeightedSet& set, const std::vector<std::size_t>& idx) {
  std::vector<SparseVector> c;
  c.reserve(idx.size());
  for (std::size_t i : idx) c.push_back(set.point(i));
  return CenterSet(std::move(c));
}

}  // namespace detail

/// k-means++ seeding over weighted points: the first center is drawn with
/// probability proportional to u(p), each later one proportional to
/// u(p) * dist^2(p, chosen). Deterministic in rng_seed.
inline CenterSet kmeanspp_seed(const WeightedSet& set, std::size_t k, std::uint64_t rng_seed) {
  if (k < 1) throw InvalidArgument("kmeanspp_seed: k must be >= 1");
  if (set.empty()) throw InvalidArgument("kmeanspp_seed: empty set");
  Rng rng(rng_seed);
  return detail::centers_from(set, detail::kmeanspp_indices(set, k, rng));
}

struct KMeansResult {
  CenterSet centers;
  double cost = 0.0;
  /// Restart that produced the result.
  std::size_t restart = 0;
  /// Lloyd steps taken by that restart.
  std::size_t steps = 0;
};

/// Best-of-restarts k-means. Restart r is seeded with
/// derive_seed(cfg.rng_seed, r), so adding restarts never raises the
/// returned cost. Ties between restarts go to the lower restart index.
inline KMeansResult solve_kmeans(const WeightedSet& set, std::size_t k, const SolverConfig& cfg) {
  cfg.validate();
  if (k < 1) throw InvalidArgument("solve_kmeans: k must be >= 1");
  if (set.empty()) throw InvalidArgument("solve_kmeans: empty set");

  if (cfg.method == SolverMethod::exhaustive) {
    const auto sol = exhaustive_kmeans(set, k);
    std::vector<SparseVector> c;
    for (const auto& g : sol.groups) {
      std::vector<SparseVector> pts;
      std::vector<double> ws;
      for (std::size_t i : g) {
        pts.push_back(set.point(i));
        ws.push_back(set.weight(i));
      }
      c.push_back(weighted_mean(WeightedSet(set.dim(), std::move(pts), std::move(ws))));
    }
    // Pad with copies so the result always has k centers.
    while (c.size() < k) c.push_back(c.back());
    CenterSet centers(std::move(c));
    const double total = cost(set, centers);
    return {std::move(centers), total, 0, 0};
  }

  KMeansResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    Rng rng(derive_seed(cfg.rng_seed, r));
    const auto seeds = cfg.method == SolverMethod::kmeanspp_then_lloyd
                           ? detail::kmeanspp_indices(set, k, rng)
                           : detail::weighted_pick_indices(set, k, rng);
    CenterSet centers = detail::centers_from(set, seeds);
    auto a = detail::assign(set, centers);
    std::size_t steps = 0;
    for (; steps < cfg.iterations;) {
      CenterSet next = detail::recenter(set, centers, a);
      auto next_a = detail::assign(set, next);
      ++steps;
      const double before = a.cost;
      const bool fixed = next == centers;
      centers = std::move(next);
      a = std::move(next_a);
      if (fixed) break;
      if (cfg.convergence_tol > 0.0 && before - a.cost < cfg.convergence_tol * before) break;
    }
    if (a.cost < best.cost) {
      best = {std::move(centers), a.cost, r, steps};
    }
  }
  return best;
}

/// Heuristic stand-in for opt(P, m): cost of solve_kmeans(P, min(m, n)),
/// and exactly rho once m >= n.
inline double approx_opt(const WeightedSet& set, std::size_t m, const SolverConfig& cfg) {
  if (m < 1) throw InvalidArgument("approx_opt: m must be >= 1");
  if (m >= set.size()) return set.additive();
  return solve_kmeans(set, m, cfg).cost;
}

}  // namespace skc
