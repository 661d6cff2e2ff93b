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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "skc/errors.hpp"
#include "skc/summation.hpp"

namespace skc {

using Index = std::uint64_t;

struct Entry {
  Index index;
  double value;
  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Sparse vector over an explicit ambient dimension.
///
/// Entries are kept sorted by index with no duplicates and no stored zeros,
/// so nnz() is the L0 norm. The dimension is carried rather than inferred
/// because with d >= n the largest used index says little about d.
class SparseVector {
 public:
  /// Values below kDropRelative * max|value| produced by arithmetic are dropped.
  static constexpr double kDropRelative = 1e-15;

  SparseVector() = default;

  /// Zero vector.
  explicit SparseVector(Index dim) : dim_(dim) {
    if (dim == 0) throw InvalidArgument("SparseVector: dim must be positive");
  }

  /// Strict constructor: entries must be sorted by strictly increasing
  /// index, finite, non-zero and below dim.
  SparseVector(Index dim, std::span<const Entry> entries) : SparseVector(dim) {
    indices_.reserve(entries.size());
    values_.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const Entry& e = entries[i];
      if (e.index >= dim) {
        throw InvalidArgument("SparseVector: index " + std::to_string(e.index) +
                              " out of range for dim " + std::to_string(dim));
      }
      if (i > 0 && e.index <= entries[i - 1].index) {
        throw InvalidArgument("SparseVector: indices must be strictly increasing");
      }
      if (!std::isfinite(e.value)) throw InvalidArgument("SparseVector: non-finite value");
      if (e.value == 0.0) throw InvalidArgument("SparseVector: stored zero");
      indices_.push_back(e.index);
      values_.push_back(e.value);
    }
  }

  SparseVector(Index dim, std::initializer_list<Entry> entries)
      : SparseVector(dim, std::span<const Entry>(entries.begin(), entries.size())) {}

  /// Lenient constructor for parsers: sorts, drops zeros, rejects duplicates.
  static SparseVector from_unsorted(Index dim, std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
    for (std::size_t i = 1; i < entries.size(); ++i) {
      if (entries[i].index == entries[i - 1].index) {
        throw InvalidArgument("SparseVector: duplicate index " + std::to_string(entries[i].index));
      }
    }
    std::erase_if(entries, [](const Entry& e) { return e.value == 0.0; });
    return SparseVector(dim, std::span<const Entry>(entries));
  }

  static SparseVector from_dense(std::span<const double> dense) {
    SparseVector v(static_cast<Index>(dense.size()));
    for (std::size_t i = 0; i < dense.size(); ++i) {
      if (!std::isfinite(dense[i])) throw InvalidArgument("SparseVector: non-finite value");
      if (dense[i] != 0.0) {
        v.indices_.push_back(i);
        v.values_.push_back(dense[i]);
      }
    }
    return v;
  }

  Index dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  std::span<const Index> indices() const noexcept { return indices_; }
  std::span<const double> values() const noexcept { return values_; }

  Entry entry(std::size_t i) const { return {indices_[i], values_[i]}; }

  double operator[](Index i) const {
    auto it = std::lower_bound(indices_.begin(), indices_.end(), i);
    if (it == indices_.end() || *it != i) return 0.0;
    return values_[static_cast<std::size_t>(it - indices_.begin())];
  }

  double squared_norm() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return s;
  }

  std::vector<double> to_dense() const {
    std::vector<double> d(static_cast<std::size_t>(dim_), 0.0);
    for (std::size_t i = 0; i < indices_.size(); ++i) d[indices_[i]] = values_[i];
    return d;
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  friend class SparseAccumulator;

  Index dim_ = 0;
  std::vector<Index> indices_;
  std::vector<double> values_;
};

inline void check_same_dim(Index a, Index b) {
  if (a != b) throw DimensionMismatch(a, b);
}

/// Squared Euclidean distance by merged index walk, O(nnz(a) + nnz(b)).
inline double dist_sq(const SparseVector& a, const SparseVector& b) {
  check_same_dim(a.dim(), b.dim());
  const auto ai = a.indices(), bi = b.indices();
  const auto av = a.values(), bv = b.values();
  std::size_t i = 0, j = 0;
  double s = 0.0;
  while (i < ai.size() && j < bi.size()) {
    if (ai[i] == bi[j]) {
      const double d = av[i++] - bv[j++];
      s += d * d;
    } else if (ai[i] < bi[j]) {
      s += av[i] * av[i];
      ++i;
    } else {
      s += bv[j] * bv[j];
      ++j;
    }
  }
  for (; i < ai.size(); ++i) s += av[i] * av[i];
  for (; j < bi.size(); ++j) s += bv[j] * bv[j];
  return s;
}

inline double dot(const SparseVector& a, const SparseVector& b) {
  check_same_dim(a.dim(), b.dim());
  const auto ai = a.indices(), bi = b.indices();
  const auto av = a.values(), bv = b.values();
  std::size_t i = 0, j = 0;
  double s = 0.0;
  while (i < ai.size() && j < bi.size()) {
    if (ai[i] == bi[j]) {
      s += av[i++] * bv[j++];
    } else if (ai[i] < bi[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

/// Builds sum_i c_i * v_i with compensated per-coordinate summation.
///
/// Contributions are gathered as (index, term) pairs and sorted, so the cost
/// is O(N log N) in the total number of contributed entries and independent
/// of dim. Coordinates whose magnitude ends below kDropRelative times the
/// largest magnitude are dropped.
class SparseAccumulator {
 public:
  explicit SparseAccumulator(Index dim) : dim_(dim) {
    if (dim == 0) throw InvalidArgument("SparseAccumulator: dim must be positive");
  }

  void add(const SparseVector& v, double coeff) {
    check_same_dim(dim_, v.dim());
    const auto idx = v.indices();
    const auto val = v.values();
    for (std::size_t i = 0; i < idx.size(); ++i) {
      terms_.push_back({idx[i], seq_++, coeff * val[i]});
    }
  }

  SparseVector finish() && {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
      return a.index != b.index ? a.index < b.index : a.seq < b.seq;
    });
    SparseVector out(dim_);
    double max_abs = 0.0;
    for (std::size_t i = 0; i < terms_.size();) {
      CompensatedSum s;
      const Index idx = terms_[i].index;
      for (; i < terms_.size() && terms_[i].index == idx; ++i) s.add(terms_[i].value);
      const double v = s.value();
      if (v != 0.0) {
        out.indices_.push_back(idx);
        out.values_.push_back(v);
        max_abs = std::max(max_abs, std::fabs(v));
      }
    }
    const double cutoff = SparseVector::kDropRelative * max_abs;
    std::size_t w = 0;
    for (std::size_t r = 0; r < out.indices_.size(); ++r) {
      if (std::fabs(out.values_[r]) >= cutoff) {
        out.indices_[w] = out.indices_[r];
        out.values_[w] = out.values_[r];
        ++w;
      }
    }
    out.indices_.resize(w);
    out.values_.resize(w);
    return out;
  }

 private:
  struct Term {
    Index index;
    std::size_t seq;
    double value;
  };
  Index dim_;
  std::size_t seq_ = 0;
  std::vector<Term> terms_;
};

/// Maximum sparsity s(P): largest nnz over a range of vectors.
template <typename Range>
std::size_t max_nnz(const Range& vectors) {
  std::size_t s = 0;
  for (const SparseVector& v : vectors) s = std::max(s, v.nnz());
  return s;
}

}  // namespace skc
