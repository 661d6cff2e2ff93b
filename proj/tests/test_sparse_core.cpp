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

#include "oracles.hpp"

namespace skc {
namespace {

using testing::dense;
using testing::Gen;
using testing::rel_err;

TEST(SparseVectorTest, RejectsMalformedEntries) {
  EXPECT_THROW(SparseVector(0), InvalidArgument);
  EXPECT_THROW(SparseVector(3, {{3, 1.0}}), InvalidArgument);
  EXPECT_THROW(SparseVector(3, {{1, 1.0}, {1, 2.0}}), InvalidArgument);
  EXPECT_THROW(SparseVector(3, {{2, 1.0}, {1, 2.0}}), InvalidArgument);
  EXPECT_THROW(SparseVector(3, {{1, 0.0}}), InvalidArgument);
  EXPECT_THROW(SparseVector(3, {{1, std::nan("")}}), InvalidArgument);
  EXPECT_THROW(SparseVector::from_unsorted(3, {{1, 1.0}, {1, 1.0}}), InvalidArgument);
}

TEST(SparseVectorTest, FromUnsortedSortsAndDropsZeros) {
  const auto v = SparseVector::from_unsorted(10, {{7, 2.0}, {3, 0.0}, {0, 1.5}});
  ASSERT_EQ(v.nnz(), 2u);
  EXPECT_EQ(v.entry(0).index, 0u);
  EXPECT_EQ(v.entry(1).index, 7u);
  EXPECT_EQ(v[7], 2.0);
  EXPECT_EQ(v[3], 0.0);
}

TEST(DistSqTest, Basics) {
  const SparseVector a(2, {{0, 3.0}});
  const SparseVector b(2, {{1, 4.0}});
  EXPECT_EQ(dist_sq(a, b), 25.0);
  EXPECT_EQ(dist_sq(a, a), 0.0);
  EXPECT_THROW(dist_sq(a, SparseVector(3)), DimensionMismatch);
}

TEST(DistSqTest, MatchesDenseOracle) {
  Gen g(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Index d = g.index(1, 64);
    const auto a = g.sparse(d, 12, 5.0);
    const auto b = g.sparse(d, 12, 5.0);
    const double want = testing::dense_dist_sq(dense(a), dense(b));
    EXPECT_LE(rel_err(dist_sq(a, b), want), 1e-12) << "trial " << trial;
    double dot_want = 0;
    for (Index j = 0; j < d; ++j) dot_want += a[j] * b[j];
    EXPECT_NEAR(dot(a, b), dot_want, 1e-12 * (1 + std::abs(dot_want)));
  }
}

TEST(SparseAccumulatorTest, DropsCancellationResidue) {
  SparseAccumulator acc(4);
  acc.add(SparseVector(4, {{0, 1.0}, {1, 0.1}}), 1.0);
  acc.add(SparseVector(4, {{1, 0.1}}), -1.0);
  const auto v = std::move(acc).finish();
  EXPECT_EQ(v.nnz(), 1u);
  EXPECT_EQ(v[0], 1.0);
}

TEST(WeightedSetTest, ValidatesInvariants) {
  const SparseVector p(2, {{0, 1.0}});
  EXPECT_THROW(WeightedSet(2, {p}, {1.0, 2.0}), InvalidArgument);
  EXPECT_THROW(WeightedSet(2, {p}, {0.0}), InvalidArgument);
  EXPECT_THROW(WeightedSet(2, {p}, {-1.0}), InvalidArgument);
  EXPECT_THROW(WeightedSet(2, {p}, {1.0}, -0.5), InvalidArgument);
  EXPECT_THROW(WeightedSet(3, {p}, {1.0}), DimensionMismatch);
  const auto u = WeightedSet::unweighted(2, {p, p});
  EXPECT_EQ(u.total_weight(), 2.0);
  EXPECT_EQ(u.additive(), 0.0);
}

TEST(WeightedMeanTest, Examples) {
  const SparseVector p(5, {{1, 2.5}, {4, -1.0}});
  EXPECT_EQ(weighted_mean(WeightedSet(5, {p}, {7.0})), p);
  const auto pair = WeightedSet(1, {SparseVector(1, {{0, 1.0}}), SparseVector(1, {{0, 3.0}})}, {2.0, 2.0});
  EXPECT_EQ(weighted_mean(pair), SparseVector(1, {{0, 2.0}}));
  EXPECT_THROW(weighted_mean(WeightedSet(3)), InvalidArgument);
  EXPECT_THROW(weighted_variance(WeightedSet(3)), InvalidArgument);
}

TEST(WeightedMeanTest, MatchesDenseAccumulation) {
  Gen g(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto set = g.set(10, g.index(1, 40), 6);
    const auto mu = dense(weighted_mean(set));
    const auto want = testing::dense_mean(set);
    for (std::size_t j = 0; j < want.size(); ++j) {
      EXPECT_NEAR(mu[j], want[j], 1e-12 * (1 + std::abs(want[j])));
    }
  }
}

TEST(WeightedMeanTest, ScaleEquivariant) {
  Gen g(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto set = g.set(15, 20, 5);
    std::vector<double> scaled = set.weights();
    const double c = g.uniform(0.01, 100.0);
    for (auto& w : scaled) w *= c;
    const auto a = dense(weighted_mean(set));
    const auto b = dense(weighted_mean(WeightedSet(set.dim(), set.points(), scaled)));
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-12 * (1 + std::abs(a[j])));
  }
}

TEST(WeightedVarianceTest, Examples) {
  const SparseVector p(3, {{2, 4.0}});
  EXPECT_EQ(weighted_variance(WeightedSet::unweighted(3, {p, p, p})), 0.0);
  const auto pair = WeightedSet::unweighted(1, {SparseVector(1, {{0, -1.0}}), SparseVector(1, {{0, 1.0}})});
  EXPECT_EQ(weighted_variance(pair), 2.0);
}

TEST(WeightedVarianceTest, MatchesDenseOracleAndExcludesAdditive) {
  Gen g(14);
  for (int trial = 0; trial < 30; ++trial) {
    const auto set = g.set(g.index(1, 30), g.index(1, 64), 8);
    EXPECT_LE(rel_err(weighted_variance(set), testing::dense_variance(set)), 1e-10);
    const CenterSet mu({weighted_mean(set)});
    EXPECT_LE(rel_err(cost(set, mu) - set.additive(), weighted_variance(set)), 1e-9);
  }
}

// cost(P,{x}) = cost(P,{mu}) + W * ||mu - x||^2 for every x.
TEST(CenterOfMassIdentity, HoldsOnRandomSets) {
  Gen g(15);
  for (int trial = 0; trial < 200; ++trial) {
    const auto set = g.set(g.index(1, 50), g.index(1, 32), 6);
    const auto mu = weighted_mean(set);
    const auto x = g.sparse(set.dim(), 8, 10.0);
    const double lhs = cost(set, CenterSet({x}));
    const double rhs = cost(set, CenterSet({mu})) + dist_sq(mu, x) * set.total_weight();
    EXPECT_LE(rel_err(lhs, rhs), 1e-9) << "trial " << trial;
  }
}

}  // namespace
}  // namespace skc
