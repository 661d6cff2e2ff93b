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


#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"

namespace skc {
namespace {

using testing::Gen;

SamplingConfig sampling(std::size_t size, std::uint64_t seed, std::size_t bicriteria_k = 1) {
  SamplingConfig cfg;
  cfg.size = size;
  cfg.rng_seed = seed;
  cfg.bicriteria_k = bicriteria_k;
  cfg.solver.rng_seed = seed;
  return cfg;
}

TEST(UniformCoresetTest, DrawsAreInputPointsWithEqualWeights) {
  Gen g(51);
  const auto set = g.set(8, 6, 3, false, true);
  const auto s = uniform_coreset(set, sampling(20, 3));
  ASSERT_EQ(s.size(), 20u);
  EXPECT_EQ(s.method, "uniform");
  EXPECT_EQ(s.base.additive(), set.additive());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto src = (*s.provenance)[i].at(0).index;
    EXPECT_EQ(s.base.point(i), set.point(src));
    EXPECT_DOUBLE_EQ(s.base.weight(i), 8.0 / 20.0);
  }
  EXPECT_EQ(uniform_coreset(set, sampling(20, 3)), s);
  EXPECT_THROW(uniform_coreset(WeightedSet(3), sampling(2, 0)), InvalidArgument);
  EXPECT_THROW(uniform_coreset(set, sampling(0, 0)), InvalidArgument);
}

TEST(UniformCoresetTest, WeightedInputDrawsByWeight) {
  const auto set = WeightedSet(1, {SparseVector(1, {{0, 1.0}}), SparseVector(1, {{0, 2.0}})}, {1.0, 3.0});
  const auto s = uniform_coreset(set, sampling(4000, 9));
  std::size_t second = 0;
  for (std::size_t i = 0; i < s.size(); ++i) second += (*s.provenance)[i][0].index == 1 ? 1 : 0;
  EXPECT_NEAR(second / 4000.0, 0.75, 0.03);
  for (double w : s.base.weights()) EXPECT_DOUBLE_EQ(w, 4.0 / 4000.0);
}

TEST(UniformCoresetTest, MissesIsolatedClusters) {
  const auto set = testing::isolated_set();
  int missed = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto s = uniform_coreset(set, sampling(10, seed));
    std::set<std::size_t> clusters;
    for (const auto& t : *s.provenance) clusters.insert(testing::isolated_cluster_of(t[0].index));
    std::size_t singletons = clusters.size() - (clusters.count(0) ? 1 : 0);
    missed += singletons < 6 ? 1 : 0;
  }
  EXPECT_GE(missed, 500);
}

TEST(SensitivityTest, EquidistantPointsReduceToUniform) {
  const auto set = WeightedSet::unweighted(
      2, {SparseVector(2, {{0, 1.0}}), SparseVector(2, {{0, -1.0}}), SparseVector(2, {{1, 1.0}}),
          SparseVector(2, {{1, -1.0}})});
  const auto dist = sensitivity_distribution(set, sampling(10, 0));
  for (double p : dist.prob) EXPECT_DOUBLE_EQ(p, 0.25);
}

TEST(SensitivityTest, AllPointsOnCentersFallsBackToWeights) {
  const auto set = WeightedSet(1, {SparseVector(1, {{0, 1.0}}), SparseVector(1, {{0, 5.0}})}, {1.0, 3.0});
  const auto dist = sensitivity_distribution(set, sampling(10, 0, 2));
  EXPECT_DOUBLE_EQ(dist.prob[0], 0.25);
  EXPECT_DOUBLE_EQ(dist.prob[1], 0.75);
}

TEST(SensitivityTest, WeightsAreInverseProbability) {
  Gen g(52);
  const auto set = g.set(30, 5, 3);
  const auto cfg = sampling(50, 4, 3);
  const auto dist = sensitivity_distribution(set, cfg);
  const auto s = sensitivity_coreset(set, cfg);
  EXPECT_EQ(s.method, "sensitivity");
  EXPECT_EQ(s.built_for_k, 3u);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto src = (*s.provenance)[i][0].index;
    EXPECT_DOUBLE_EQ(s.base.weight(i), set.weight(src) / (50 * dist.prob[src]));
  }
  // Expected total weight is W exactly: sum_p pr(p) * u(p) / pr(p) = W.
  double expect = 0;
  for (std::size_t i = 0; i < set.size(); ++i) expect += dist.prob[i] * set.weight(i) / dist.prob[i];
  EXPECT_NEAR(expect, set.total_weight(), 1e-9 * set.total_weight());
  EXPECT_EQ(sensitivity_coreset(set, cfg), s);
}

TEST(SensitivityTest, IsolatedPointsGetHigherProbabilityAndRepeat) {
  const auto set = testing::isolated_set();
  const auto dist = sensitivity_distribution(set, sampling(10, 1, 7));
  double max_big = 0, min_single = 1;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (testing::isolated_cluster_of(i) == 0) max_big = std::max(max_big, dist.prob[i]);
    else min_single = std::min(min_single, dist.prob[i]);
  }
  EXPECT_GT(min_single, 2 * max_big);
  int repeats = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = sensitivity_coreset(set, sampling(10, seed, 7));
    std::set<std::size_t> distinct;
    for (const auto& t : *s.provenance) distinct.insert(t[0].index);
    repeats += distinct.size() < s.size() ? 1 : 0;
  }
  EXPECT_GT(repeats, 50);
}

TEST(SamplersTest, UnbiasedForFixedQuery) {
  Gen g(53);
  const auto set = g.set(40, 6, 4);
  const auto q = g.centers(set, 3);
  const double want = cost(set, q);
  for (int method = 0; method < 2; ++method) {
    double sum = 0, weight = 0;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
      const auto cfg = sampling(15, seed, 3);
      const auto s = method == 0 ? uniform_coreset(set, cfg) : sensitivity_coreset(set, cfg);
      sum += cost(s, q);
      weight += s.base.total_weight();
    }
    EXPECT_LE(std::abs(sum / 2000 / want - 1), 0.02) << "method " << method;
    EXPECT_LE(std::abs(weight / 2000 / set.total_weight() - 1), 0.02);
  }
}

}  // namespace
}  // namespace skc
