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
using testing::rel_err;

SparseVector scalar(double x) { return SparseVector::from_dense(std::vector<double>{x}); }

TEST(CostTest, Examples) {
  const SparseVector p(3, {{0, 1.0}, {2, -2.0}});
  EXPECT_EQ(cost(WeightedSet::unweighted(3, {p}), CenterSet({p})), 0.0);
  const auto pair = WeightedSet::unweighted(1, {scalar(0.0), scalar(2.0)});
  EXPECT_EQ(cost(pair, CenterSet({scalar(1.0)})), 2.0);
  EXPECT_EQ(cost(pair.with_additive(0.5), CenterSet({scalar(1.0)})), 2.5);
  EXPECT_THROW(cost(pair, CenterSet({SparseVector(2)})), DimensionMismatch);
}

TEST(CostTest, MatchesDenseOracle) {
  Gen g(21);
  for (int trial = 0; trial < 60; ++trial) {
    const auto set = g.set(g.index(1, 20), g.index(1, 8), 8);
    const auto q = g.centers(set, g.index(1, 3));
    EXPECT_LE(rel_err(cost(set, q), testing::dense_cost(set, testing::dense_centers(q))), 1e-10);
  }
}

TEST(CostTest, NearCoincidentPointsWithLargeNorm) {
  // Norm-expansion distance estimates cancel here; the exact re-check must win.
  const SparseVector a(2, {{0, 1e8}, {1, 1.0}});
  const SparseVector b(2, {{0, 1e8}, {1, 1.0 + 1e-6}});
  const SparseVector c(2, {{0, 1e8 + 1e-3}});
  const auto set = WeightedSet::unweighted(2, {a});
  const CenterSet q({c, b});
  const auto part = partition(set, q);
  EXPECT_EQ(part.assignment[0], 1u);
  EXPECT_DOUBLE_EQ(cost(set, q), dist_sq(a, b));
}

TEST(PartitionTest, SingleCenterKeepsEverything) {
  Gen g(22);
  const auto set = g.set(12, 5, 3);
  const auto part = partition(set, CenterSet({g.sparse(5, 3)}));
  ASSERT_EQ(part.parts.size(), 1u);
  EXPECT_EQ(part.parts[0], set);
}

TEST(PartitionTest, FarClustersAndTies) {
  const auto set = WeightedSet(1, {scalar(-100), scalar(-101), scalar(100), scalar(0)}, {1, 1, 1, 1}, 3.0);
  const auto part = partition(set, CenterSet({scalar(-100), scalar(100)}));
  ASSERT_EQ(part.parts.size(), 2u);
  // 0 is equidistant: lowest center index wins.
  EXPECT_EQ(part.assignment, (std::vector<std::size_t>{0, 0, 1, 0}));
  EXPECT_EQ(part.members[0], (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(part.parts[0].additive(), 1.5);
  EXPECT_EQ(part.parts[1].additive(), 1.5);
}

TEST(PartitionTest, EmptyPartsAreDroppedAndAdditiveConserved) {
  const auto set = WeightedSet(1, {scalar(1), scalar(2)}, {1, 1}, 6.0);
  const auto part = partition(set, CenterSet({scalar(1), scalar(50), scalar(2)}));
  ASSERT_EQ(part.parts.size(), 2u);
  EXPECT_EQ(part.part_center, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(part.parts[0].additive() + part.parts[1].additive(), 6.0);
}

TEST(PartitionTest, AssignmentIsNearestAndCostsDecompose) {
  Gen g(23);
  for (int trial = 0; trial < 40; ++trial) {
    const auto set = g.set(g.index(1, 30), g.index(1, 10), 6);
    const auto q = g.centers(set, g.index(1, 5));
    const auto part = partition(set, q);
    for (std::size_t i = 0; i < set.size(); ++i) {
      const double got = dist_sq(set.point(i), q[part.assignment[i]]);
      for (std::size_t c = 0; c < q.k(); ++c) {
        const double d = dist_sq(set.point(i), q[c]);
        EXPECT_LE(got, d);
        if (c < part.assignment[i]) EXPECT_LT(got, d);
      }
    }
    double by_parts = 0, by_identity = set.additive();
    std::size_t total = 0;
    for (std::size_t p = 0; p < part.parts.size(); ++p) {
      const auto& s = part.parts[p];
      const auto& center = q[part.part_center[p]];
      total += s.size();
      by_parts += cost(s, CenterSet({center}));
      by_identity += weighted_variance(s) + s.total_weight() * dist_sq(weighted_mean(s), center);
    }
    EXPECT_EQ(total, set.size());
    EXPECT_LE(rel_err(by_parts, cost(set, q)), 1e-12);
    EXPECT_LE(rel_err(by_identity, cost(set, q)), 1e-9);
  }
}

TEST(LloydStepTest, FixedPointAndEmptyCluster) {
  const auto set = WeightedSet::unweighted(1, {scalar(0), scalar(2), scalar(10), scalar(12)});
  const CenterSet fixed({scalar(1), scalar(11)});
  EXPECT_EQ(lloyd_step(set, fixed), fixed);
  // Duplicate centers: the second copy owns nothing and stays put.
  const CenterSet dup({scalar(5), scalar(5)});
  const auto next = lloyd_step(set, dup);
  EXPECT_EQ(next[0], scalar(6));
  EXPECT_EQ(next[1], scalar(5));
}

TEST(LloydStepTest, NeverIncreasesCost) {
  Gen g(24);
  for (int trial = 0; trial < 40; ++trial) {
    const auto set = g.set(g.index(2, 40), g.index(1, 12), 6);
    auto q = g.centers(set, g.index(1, 4));
    for (int step = 0; step < 5; ++step) {
      const double before = cost(set, q);
      q = lloyd_step(set, q);
      EXPECT_LE(cost(set, q), before * (1 + 1e-12));
    }
  }
}

TEST(KMeansPPTest, SingletonAndDeterminism) {
  const SparseVector p(4, {{3, 2.0}});
  EXPECT_EQ(kmeanspp_seed(WeightedSet::unweighted(4, {p}), 1, 99)[0], p);
  Gen g(25);
  const auto set = g.set(30, 10, 4);
  EXPECT_EQ(kmeanspp_seed(set, 5, 7), kmeanspp_seed(set, 5, 7));
  EXPECT_THROW(kmeanspp_seed(set, 0, 7), InvalidArgument);
}

TEST(KMeansPPTest, CoversSeparatedClusters) {
  const auto set = testing::isolated_set();
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto q = kmeanspp_seed(set, 7, seed);
    std::set<std::size_t> clusters;
    for (std::size_t c = 0; c < q.k(); ++c) {
      for (std::size_t i = 0; i < set.size(); ++i) {
        if (q[c] == set.point(i)) clusters.insert(testing::isolated_cluster_of(i));
      }
    }
    covered += clusters.size() == 7 ? 1 : 0;
  }
  EXPECT_GE(covered, 190);
}

TEST(SolveKMeansTest, Examples) {
  Gen g(26);
  const auto distinct = WeightedSet(1, {scalar(0), scalar(5), scalar(9)}, {1, 2, 3}, 0.25);
  EXPECT_EQ(solve_kmeans(distinct, 3, {SolverMethod::kmeanspp_then_lloyd, 10, 1, 0, 0}).cost, 0.25);
  for (int trial = 0; trial < 10; ++trial) {
    const auto set = g.set(g.index(1, 25), 6, 4);
    const auto r = solve_kmeans(set, 1, {SolverMethod::lloyd, 5, 1, 3, 0});
    EXPECT_LE(rel_err(r.cost, set.additive() + weighted_variance(set)), 1e-9);
    EXPECT_EQ(r.centers[0], weighted_mean(set));
  }
}

TEST(SolveKMeansTest, ReturnedCostIsCostOfCentersAndDeterministic) {
  Gen g(27);
  for (int trial = 0; trial < 20; ++trial) {
    const auto set = g.set(g.index(3, 40), 8, 5);
    const SolverConfig cfg{SolverMethod::kmeanspp_then_lloyd, 20, 4, 5, 1e-9};
    const auto a = solve_kmeans(set, 3, cfg);
    const auto b = solve_kmeans(set, 3, cfg);
    EXPECT_EQ(a.cost, cost(set, a.centers));
    EXPECT_EQ(a.centers, b.centers);
    EXPECT_EQ(a.cost, b.cost);
    SolverConfig more = cfg;
    more.restarts = 9;
    EXPECT_LE(solve_kmeans(set, 3, more).cost, a.cost);
  }
}

TEST(SolveKMeansTest, AgainstPartitionEnumeration) {
  Gen g(28);
  int matched = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto set = g.set(g.index(3, 8), g.index(1, 4), 4);
    const double opt = testing::enumerate_opt(set, 2);
    const auto r = solve_kmeans(set, 2, {SolverMethod::kmeanspp_then_lloyd, 50, 50, 1, 0});
    EXPECT_GE(r.cost, opt * (1 - 1e-9));
    matched += rel_err(r.cost, opt) <= 1e-9 ? 1 : 0;
  }
  EXPECT_GE(matched, 18);
}

TEST(ExhaustiveTest, MatchesPartitionEnumeration) {
  Gen g(29);
  for (int trial = 0; trial < 40; ++trial) {
    const auto set = g.set(g.index(1, 9), g.index(1, 4), 4);
    const std::size_t k = g.index(1, 4);
    const auto sol = exhaustive_kmeans(set, k);
    EXPECT_LE(rel_err(sol.cost, testing::enumerate_opt(set, k)), 1e-9) << "trial " << trial;
    const auto r = solve_kmeans(set, k, {SolverMethod::exhaustive, 1, 1, 0, 0});
    EXPECT_LE(rel_err(r.cost, sol.cost), 1e-9);
    EXPECT_EQ(r.centers.k(), k);
  }
  EXPECT_THROW(exhaustive_kmeans(g.set(kExhaustiveMaxPoints + 1, 2, 2), 2), InvalidArgument);
}

TEST(ApproxOptTest, Examples) {
  Gen g(30);
  const auto set = g.set(6, 4, 3);
  const SolverConfig cfg{SolverMethod::kmeanspp_then_lloyd, 10, 10, 0, 0};
  EXPECT_EQ(approx_opt(set, 6, cfg), set.additive());
  EXPECT_EQ(approx_opt(set, 60, cfg), set.additive());
  EXPECT_THROW(approx_opt(set, 0, cfg), InvalidArgument);

  int monotone = 0, close = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = g.set(g.index(3, 8), 4, 3);
    monotone += approx_opt(s, 1, cfg) >= approx_opt(s, 3, cfg) ? 1 : 0;
    const double ratio = approx_opt(s, 2, {SolverMethod::kmeanspp_then_lloyd, 20, 50, 0, 0}) / testing::enumerate_opt(s, 2);
    close += ratio >= 1 - 1e-9 && ratio <= 1.5 ? 1 : 0;
  }
  EXPECT_GE(monotone, 19);
  EXPECT_EQ(close, 20);
}

}  // namespace
}  // namespace skc
