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

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "skc/errors.hpp"
#include "skc/sparse_vector.hpp"
#include "skc/summation.hpp"

namespace skc {

/// Weighted point set (P', u, rho): points, positive multiplicative weights
/// and a non-negative additive weight that is added to every cost.
class WeightedSet {
 public:
  WeightedSet() = default;

  explicit WeightedSet(Index dim) : dim_(dim) {
    if (dim == 0) throw InvalidArgument("WeightedSet: dim must be positive");
  }

  WeightedSet(Index dim, std::vector<SparseVector> points, std::vector<double> weights,
              double additive = 0.0)
      : dim_(dim), points_(std::move(points)), weights_(std::move(weights)), additive_(additive) {
    if (dim == 0) throw InvalidArgument("WeightedSet: dim must be positive");
    if (points_.size() != weights_.size()) {
      throw InvalidArgument("WeightedSet: " + std::to_string(points_.size()) + " points but " +
                            std::to_string(weights_.size()) + " weights");
    }
    for (const auto& p : points_) check_same_dim(dim_, p.dim());
    for (double w : weights_) {
      if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("WeightedSet: weights must be positive and finite");
    }
    if (!(additive_ >= 0.0) || !std::isfinite(additive_)) {
      throw InvalidArgument("WeightedSet: additive weight must be non-negative and finite");
    }
  }

  /// Unit weights, zero additive weight.
  static WeightedSet unweighted(Index dim, std::vector<SparseVector> points) {
    std::vector<double> w(points.size(), 1.0);
    return WeightedSet(dim, std::move(points), std::move(w), 0.0);
  }

  Index dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const std::vector<SparseVector>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const SparseVector& point(std::size_t i) const { return points_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  double additive() const noexcept { return additive_; }

  double total_weight() const noexcept {
    CompensatedSum s;
    for (double w : weights_) s.add(w);
    return s.value();
  }

  std::size_t max_sparsity() const noexcept { return max_nnz(points_); }

  WeightedSet with_additive(double additive) const {
    return WeightedSet(dim_, points_, weights_, additive);
  }

  friend bool operator==(const WeightedSet&, const WeightedSet&) = default;

 private:
  Index dim_ = 0;
  std::vector<SparseVector> points_;
  std::vector<double> weights_;
  double additive_ = 0.0;
};

/// Center of mass (1/W) * sum u(p) * p.
inline SparseVector weighted_mean(const WeightedSet& set) {
  if (set.empty()) throw InvalidArgument("weighted_mean: empty set");
  const double total = set.total_weight();
  if (!(total > 0.0)) throw InvalidArgument("weighted_mean: total weight must be positive");
  if (set.size() == 1) return set.point(0);
  SparseAccumulator acc(set.dim());
  for (std::size_t i = 0; i < set.size(); ++i) acc.add(set.point(i), set.weight(i) / total);
  return std::move(acc).finish();
}

/// sum u(p) * ||p - center||^2, without the additive weight.
inline double weighted_sq_dist_sum(const WeightedSet& set, const SparseVector& center) {
  CompensatedSum s;
  for (std::size_t i = 0; i < set.size(); ++i) s.add(set.weight(i) * dist_sq(set.point(i), center));
  return s.value();
}

/// sum u(p) * ||p - mu(P)||^2. Excludes rho; cost(P, {mu}) = rho + this.
inline double weighted_variance(const WeightedSet& set) {
  if (set.empty()) throw InvalidArgument("weighted_variance: empty set");
  return weighted_sq_dist_sum(set, weighted_mean(set));
}

}  // namespace skc
