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

#include <filesystem>
#include <sstream>

#include "oracles.hpp"

namespace skc {
namespace {

using testing::Gen;

// Seven gaussian-ish blobs of very different sizes in d = 50, 3 non-zeros each.
WeightedSet seven_blobs(std::uint64_t seed) {
  Gen g(seed);
  const std::size_t sizes[7] = {1200, 800, 400, 200, 60, 20, 8};
  std::vector<SparseVector> pts;
  for (std::size_t c = 0; c < 7; ++c) {
    for (std::size_t i = 0; i < sizes[c]; ++i) {
      std::vector<Entry> e;
      for (Index j = 0; j < 3; ++j) e.push_back({c * 7 + j, 20.0 * static_cast<double>(c + 1) + g.uniform(-1, 1)});
      pts.push_back(SparseVector::from_unsorted(50, e));
    }
  }
  return WeightedSet::unweighted(50, std::move(pts));
}

TEST(QuantileTest, TypeSeven) {
  const std::vector<double> xs{4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(quantile(xs, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile(xs, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile(xs, 0.75), 3.25);
  EXPECT_DOUBLE_EQ(quantile({7}, 0.25), 7.0);
  EXPECT_DOUBLE_EQ(quantile(xs, 1.0), 4.0);
  EXPECT_THROW(quantile({}, 0.5), InvalidArgument);
}

TEST(AggregateTest, OneRowPerMethodSizeAndK) {
  std::vector<std::tuple<std::string, std::size_t, EvalReport>> cells;
  for (const char* m : {"ours", "uniform"})
    for (std::size_t size : {10u, 20u})
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        EvalReport r;
        r.method = m;
        r.k = 2;
        r.eps_hat = static_cast<double>(seed) / 10;
        r.wall_ms["build"] = 1.0;
        r.wall_ms["solve"] = 2.0;
        r.wall_ms["baseline"] = 100.0;
        cells.emplace_back(m, size, r);
      }
  const auto rows = aggregate(cells);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.seed_count, 3u);
    EXPECT_DOUBLE_EQ(r.median_eps, 0.1);
    EXPECT_DOUBLE_EQ(r.q1_eps, 0.05);
    EXPECT_DOUBLE_EQ(r.median_ms, 3.0);
  }
  std::ostringstream os;
  write_aggregate_csv(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "method,size,k,seed_count,median_eps,q1_eps,q3_eps,median_ms");
  EXPECT_NE(os.str().find("ours,10,2,3,0.1,0.05,0.15000000000000002,3\n"), std::string::npos);
}

TEST(EvalReportTest, JsonRoundTrip) {
  EvalReport r;
  r.method = "sensitivity";
  r.coreset_size = 12;
  r.k = 3;
  r.cost_on_full = 10.5;
  r.baseline_cost = 10.0;
  r.eps_hat = 0.05;
  r.wall_ms["solve"] = 1.25;
  r.seed = 99;
  r.metadata["note"] = "x";
  const nlohmann::json j = r;
  const auto back = j.get<EvalReport>();
  EXPECT_EQ(back.method, r.method);
  EXPECT_EQ(back.coreset_size, r.coreset_size);
  EXPECT_EQ(back.cost_on_full, r.cost_on_full);
  EXPECT_EQ(back.wall_ms, r.wall_ms);
  EXPECT_EQ(back.metadata, r.metadata);
}

TEST(EvaluateTest, FullInputAsCoresetGivesZeroError) {
  const auto set = seven_blobs(1);
  Coreset c;
  c.base = set;
  EvalSettings s;
  s.k = 7;
  s.solver_iters = s.baseline.max_iterations;
  s.restarts = s.baseline.restarts;
  s.seed = s.baseline.seed;
  const auto r = evaluate(set, c, s);
  EXPECT_LE(std::abs(r.eps_hat), 1e-9);
  EXPECT_EQ(r.eps_hat, r.cost_on_full / r.baseline_cost - 1);
  EXPECT_GE(r.eps_hat, -1.0);
}

TEST(EvaluateTest, BaselineCacheIsReused) {
  const auto path = (std::filesystem::temp_directory_path() / "skc_eval_cache_test.json").string();
  std::filesystem::remove(path);
  const auto set = seven_blobs(2);
  BaselineSpec spec;
  spec.restarts = 3;
  bool hit = true;
  double first = 0;
  {
    BaselineCache cache(path);
    first = baseline_cost(set, 7, spec, &cache, &hit);
    EXPECT_FALSE(hit);
  }
  BaselineCache reread(path);
  EXPECT_EQ(baseline_cost(set, 7, spec, &reread, &hit), first);
  EXPECT_TRUE(hit);
  spec.seed = 1;
  baseline_cost(set, 7, spec, &reread, &hit);
  EXPECT_FALSE(hit);
  std::filesystem::remove(path);
}

TEST(BuildCoresetTest, DeterministicAndModeConsistent) {
  const auto set = seven_blobs(3);
  BuildSpec spec;
  spec.k = 7;
  spec.size = 40;
  spec.seed = 5;
  for (auto m : {Method::ours, Method::uniform, Method::sensitivity}) {
    spec.method = m;
    const auto a = build_coreset(set, spec);
    EXPECT_EQ(a.coreset, build_coreset(set, spec).coreset);
    EXPECT_EQ(a.coreset.method, to_string(m));
    EXPECT_LE(a.coreset.size(), 40u);
  }
  spec.method = Method::ours;
  spec.streaming = true;
  spec.leaf_size = 500;
  const auto streamed = build_coreset(set, spec);
  spec.machines = 1;
  const std::vector<WeightedSet> one{set};
  const auto dist = distributed_run(one, 1, [&] { return CoresetTree(set.dim(), make_reducer(spec), 500); });
  EXPECT_EQ(streamed.coreset, dist.coreset);
  EXPECT_GT(streamed.max_live_buckets, 0u);

  spec.machines = 3;
  const auto three = build_coreset(set, spec);
  ASSERT_TRUE(three.distributed);
  EXPECT_EQ(three.distributed->shard_sizes.size(), 3u);

  BuildSpec bad;
  bad.method = Method::uniform;
  EXPECT_THROW(build_coreset(set, bad), InvalidArgument);
}

TEST(EvaluateTest, OursBeatsUniformOnUnevenClusters) {
  const auto set = seven_blobs(4);
  std::vector<double> ours, uniform;
  EvalSettings s;
  s.k = 7;
  BaselineCache cache;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    s.seed = seed;
    BuildSpec spec;
    spec.k = 7;
    spec.size = 100;
    spec.seed = seed;
    spec.method = Method::ours;
    ours.push_back(evaluate(set, build_coreset(set, spec).coreset, s, &cache).eps_hat);
    spec.method = Method::uniform;
    uniform.push_back(evaluate(set, build_coreset(set, spec).coreset, s, &cache).eps_hat);
  }
  EXPECT_LT(quantile(ours, 0.5), quantile(uniform, 0.5));
}

TEST(EvaluateTest, IsolatedClusterFixtureSweep) {
  const auto set = testing::isolated_set();
  std::vector<double> ours, uniform;
  EvalSettings s;
  s.k = 7;
  BaselineCache cache;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    s.seed = seed;
    BuildSpec spec;
    spec.k = 7;
    spec.size = 7;
    spec.seed = seed;
    ours.push_back(evaluate(set, build_coreset(set, spec).coreset, s, &cache).eps_hat);
    spec.method = Method::uniform;
    uniform.push_back(evaluate(set, build_coreset(set, spec).coreset, s, &cache).eps_hat);
  }
  EXPECT_LE(quantile(ours, 1.0), 0.01);
  EXPECT_GT(quantile(uniform, 0.5), 0.5);
}

}  // namespace
}  // namespace skc
