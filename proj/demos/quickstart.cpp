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


// Builds a coreset for a few sparse Gaussian blobs and compares costs of
// random center sets on the coreset and on the full data.

#include <cstdio>
#include <vector>

#include "skc.hpp"

int main() {
  constexpr skc::Index kDim = 1000;
  constexpr std::size_t kClusters = 5;
  constexpr std::size_t kPerCluster = 400;

  skc::Rng rng(7);
  std::vector<skc::SparseVector> points;
  for (std::size_t c = 0; c < kClusters; ++c) {
    for (std::size_t i = 0; i < kPerCluster; ++i) {
      std::vector<skc::Entry> e;
      for (skc::Index j = 0; j < 4; ++j) e.push_back({c * 4 + j, 10.0 + rng.uniform()});
      e.push_back({100 + rng.below(kDim - 100), rng.uniform()});
      points.push_back(skc::SparseVector::from_unsorted(kDim, e));
    }
  }
  const auto data = skc::WeightedSet::unweighted(kDim, points);

  skc::CoresetConfig cfg;
  cfg.k = kClusters;
  cfg.epsilon = 0.2;
  cfg.fixed_m = 50;
  const auto build = skc::build_kmean_coreset(data, cfg);
  const auto& s = build.coreset;
  std::printf("n=%zu coreset=%zu max nnz=%zu additive=%.4g\n", data.size(), s.size(), s.base.max_sparsity(),
              s.base.additive());

  for (std::uint64_t q = 0; q < 5; ++q) {
    const auto centers = skc::kmeanspp_seed(data, kClusters, q);
    const double full = skc::cost(data, centers);
    const double approx = skc::cost(s, centers);
    std::printf("Q%llu full=%.6g coreset=%.6g ratio=%.6f\n", static_cast<unsigned long long>(q), full, approx,
                approx / full);
  }
}
