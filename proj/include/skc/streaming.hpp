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
#include <functional>
#include <future>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "skc/baselines.hpp"
#include "skc/coreset.hpp"
#include "skc/errors.hpp"
#include "skc/rng.hpp"
#include "skc/weighted_set.hpp"

namespace skc {

/// Union of two coresets: points and weights concatenated, additive
/// weights summed. cost(merge(a,b), Q) = cost(a,Q) + cost(b,Q).
inline WeightedSet merge(const Coreset& a, const Coreset& b) {
  check_same_dim(a.base.dim(), b.base.dim());
  std::vector<SparseVector> pts = a.base.points();
  std::vector<double> ws = a.base.weights();
  pts.insert(pts.end(), b.base.points().begin(), b.base.points().end());
  ws.insert(ws.end(), b.base.weights().begin(), b.base.weights().end());
  return WeightedSet(a.base.dim(), std::move(pts), std::move(ws), a.base.additive() + b.base.additive());
}

/// Compresses a weighted set into a coreset. The second argument numbers
/// the reduce calls of one tree, for reducers that need fresh randomness.
using Reducer = std::function<Coreset(const WeightedSet&, std::size_t)>;

inline Reducer kmean_reducer(CoresetConfig cfg) {
  cfg.validate();
  return [cfg](const WeightedSet& s, std::size_t) { return kmean_coreset(s, cfg); };
}

inline Reducer uniform_reducer(SamplingConfig cfg) {
  cfg.validate();
  return [cfg](const WeightedSet& s, std::size_t call) {
    SamplingConfig c = cfg;
    c.rng_seed = derive_seed(cfg.rng_seed, call);
    return uniform_coreset(s, c);
  };
}

inline Reducer sensitivity_reducer(SamplingConfig cfg) {
  cfg.validate();
  return [cfg](const WeightedSet& s, std::size_t call) {
    SamplingConfig c = cfg;
    c.rng_seed = derive_seed(cfg.rng_seed, call);
    c.solver.rng_seed = derive_seed(cfg.solver.rng_seed, call);
    return sensitivity_coreset(s, c);
  };
}

struct TreeSnapshot {
  std::size_t points_seen;
  std::size_t live_buckets;
  /// Points held in buckets plus the pending buffer.
  std::size_t resident_points;
};

/// 2 * fixed_m when a target size is set, else 2 * k^ceil(1/eps^2), capped at 4096.
inline std::size_t default_leaf_size(const CoresetConfig& cfg) {
  constexpr std::size_t kCap = 4096;
  if (cfg.fixed_m) return std::min(kCap, std::max<std::size_t>(2, 2 * *cfg.fixed_m));
  return std::max<std::size_t>(2, 2 * detail::capped_power(cfg.k, ceil_div_eps_sq(1.0, cfg.epsilon), kCap / 2));
}

/// Upper bound on simultaneously live buckets: ceil(log2(seen / leaf)) + 1,
/// and 0 before the first leaf is complete.
inline std::size_t live_bucket_bound(std::size_t points_seen, std::size_t leaf_size) {
  if (points_seen < leaf_size) return 0;
  const double r = static_cast<double>(points_seen) / static_cast<double>(leaf_size);
  return static_cast<std::size_t>(std::ceil(std::log2(r) - 1e-12)) + 1;
}

/// Merge-and-reduce tree over a stream of weighted points.
///
/// Points are buffered until leaf_size of them are pending; the buffer is
/// then reduced to a level-0 coreset and carried upward like a binary
/// counter: while level i is occupied, its bucket and the carry are merged
/// and reduced into a carry for level i + 1. At most one bucket lives per
/// level, so O(log(n / leaf_size)) coresets are held at any time.
///
/// Single writer; not thread-safe.
class CoresetTree {
 public:
  using Hook = std::function<void(const TreeSnapshot&)>;

  CoresetTree(Index dim, const CoresetConfig& cfg, std::size_t leaf_size = 0)
      : CoresetTree(dim, kmean_reducer(cfg), leaf_size == 0 ? default_leaf_size(cfg) : leaf_size) {}

  CoresetTree(Index dim, Reducer reducer, std::size_t leaf_size)
      : dim_(dim), reducer_(std::move(reducer)), leaf_size_(leaf_size) {
    if (dim == 0) throw InvalidArgument("CoresetTree: dim must be positive");
    if (leaf_size_ < 1) throw InvalidArgument("CoresetTree: leaf_size must be >= 1");
  }

  void set_hook(Hook hook) { hook_ = std::move(hook); }

  void insert(const SparseVector& p, double weight = 1.0) {
    check_same_dim(dim_, p.dim());
    if (!(weight > 0.0) || !std::isfinite(weight)) throw InvalidArgument("CoresetTree: weight must be positive");
    pending_points_.push_back(p);
    pending_weights_.push_back(weight);
    ++points_seen_;
    if (pending_points_.size() >= leaf_size_) {
      Coreset leaf = reduce_pending();
      carry(std::move(leaf));
    }
    if (hook_) hook_(snapshot());
  }

  /// Coreset for everything inserted so far. The final reduce only runs
  /// when two or more coresets have to be combined, so a stream that fits in
  /// one leaf yields exactly the offline coreset of that leaf.
  Coreset finalize() {
    if (points_seen_ == 0) throw InvalidArgument("CoresetTree::finalize: empty stream");
    std::vector<Coreset> parts;
    if (!pending_points_.empty()) parts.push_back(reduce_pending());
    for (auto& level : levels_) {
      if (level) parts.push_back(*level);
    }
    if (parts.size() == 1) return parts.front();
    return combine(parts);
  }

  Index dim() const noexcept { return dim_; }
  std::size_t leaf_size() const noexcept { return leaf_size_; }
  std::size_t points_seen() const noexcept { return points_seen_; }
  std::size_t pending() const noexcept { return pending_points_.size(); }
  const std::vector<std::optional<Coreset>>& levels() const noexcept { return levels_; }

  std::size_t live_buckets() const noexcept {
    return static_cast<std::size_t>(std::count_if(levels_.begin(), levels_.end(), [](const auto& l) { return l.has_value(); }));
  }

  TreeSnapshot snapshot() const {
    std::size_t resident = pending_points_.size();
    for (const auto& l : levels_) resident += l ? l->size() : 0;
    return {points_seen_, live_buckets(), resident};
  }

  /// Merges coresets in order and reduces the union once.
  Coreset combine(const std::vector<Coreset>& parts) {
    Coreset acc = parts.front();
    std::size_t depth = acc.depth;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      acc.base = merge(acc, parts[i]);
      depth = std::max(depth, parts[i].depth);
    }
    Coreset out = reducer_(acc.base, reduce_calls_++);
    out.depth = depth + 1;
    out.provenance.reset();
    return out;
  }

 private:
  Coreset reduce_pending() {
    const std::size_t offset = points_seen_ - pending_points_.size();
    WeightedSet chunk(dim_, std::move(pending_points_), std::move(pending_weights_));
    pending_points_.clear();
    pending_weights_.clear();
    Coreset c = reducer_(chunk, reduce_calls_++);
    c.depth = 1;
    // Leaf provenance refers to stream positions.
    if (c.provenance) {
      for (auto& terms : *c.provenance) {
        for (auto& t : terms) t.index += offset;
      }
    }
    return c;
  }

  void carry(Coreset c) {
    std::size_t level = 0;
    while (level < levels_.size() && levels_[level]) {
      Coreset resident = std::move(*levels_[level]);
      levels_[level].reset();
      c = combine({std::move(resident), std::move(c)});
      ++level;
    }
    if (level == levels_.size()) levels_.emplace_back();
    levels_[level] = std::move(c);
  }

  Index dim_;
  Reducer reducer_;
  std::size_t leaf_size_;
  std::size_t points_seen_ = 0;
  std::size_t reduce_calls_ = 0;
  std::vector<SparseVector> pending_points_;
  std::vector<double> pending_weights_;
  std::vector<std::optional<Coreset>> levels_;
  Hook hook_;
};

struct DistributedResult {
  Coreset coreset;
  /// Points shipped from the machines to the coordinator.
  std::size_t communicated_points = 0;
  /// Non-zero coordinates shipped, the memory-word count.
  std::size_t communicated_nnz = 0;
  /// Coreset size per shard, 0 for empty shards.
  std::vector<std::size_t> shard_sizes;
};

/// Simulated M-machine run: every shard streams through its own tree, the
/// finalized shard coresets are merged at a coordinator in shard order and
/// reduced once. Shards run concurrently when `parallel` is set; the result
/// does not depend on it.
inline DistributedResult distributed_run(std::span<const WeightedSet> shards, std::size_t machines,
                                         const std::function<CoresetTree()>& make_tree, bool parallel = true) {
  if (machines < 1 || machines != shards.size()) {
    throw InvalidArgument("distributed_run: need one shard per machine");
  }
  for (const auto& s : shards) {
    if (s.additive() != 0.0) throw InvalidArgument("distributed_run: shards must have zero additive weight");
  }
  auto run_shard = [&](std::size_t i) -> std::optional<Coreset> {
    if (shards[i].empty()) return std::nullopt;
    CoresetTree tree = make_tree();
    for (std::size_t j = 0; j < shards[i].size(); ++j) tree.insert(shards[i].point(j), shards[i].weight(j));
    return tree.finalize();
  };

  std::vector<std::optional<Coreset>> local(machines);
  if (parallel && machines > 1) {
    std::vector<std::future<std::optional<Coreset>>> jobs;
    for (std::size_t i = 0; i < machines; ++i) jobs.push_back(std::async(std::launch::async, run_shard, i));
    for (std::size_t i = 0; i < machines; ++i) local[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < machines; ++i) local[i] = run_shard(i);
  }

  DistributedResult out;
  std::vector<Coreset> shipped;
  for (auto& c : local) {
    out.shard_sizes.push_back(c ? c->size() : 0);
    if (!c) continue;
    out.communicated_points += c->size();
    for (const auto& p : c->base.points()) out.communicated_nnz += p.nnz();
    shipped.push_back(std::move(*c));
  }
  if (shipped.empty()) throw InvalidArgument("distributed_run: all shards are empty");
  if (shipped.size() == 1) {
    out.coreset = std::move(shipped.front());
  } else {
    CoresetTree coordinator = make_tree();
    out.coreset = coordinator.combine(shipped);
  }
  return out;
}

inline DistributedResult distributed_run(std::span<const WeightedSet> shards, const CoresetConfig& cfg,
                                         std::size_t machines, std::size_t leaf_size = 0,
                                         bool parallel = true) {
  cfg.validate();
  if (shards.empty()) throw InvalidArgument("distributed_run: no shards");
  const Index dim = shards.front().dim();
  return distributed_run(
      shards, machines, [&] { return CoresetTree(dim, cfg, leaf_size); }, parallel);
}

}  // namespace skc
