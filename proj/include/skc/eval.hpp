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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "skc/baselines.hpp"
#include "skc/coreset.hpp"
#include "skc/errors.hpp"
#include "skc/io.hpp"
#include "skc/kmeans.hpp"
#include "skc/streaming.hpp"

namespace skc {

enum class Method { ours, uniform, sensitivity };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::ours: return "ours";
    case Method::uniform: return "uniform";
    case Method::sensitivity: return "sensitivity";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  if (s == "ours") return Method::ours;
  if (s == "uniform") return Method::uniform;
  if (s == "sensitivity") return Method::sensitivity;
  throw InvalidArgument("unknown method '" + std::string(s) + "'");
}

/// What to build and how. Either size or epsilon drives "ours": with a size
/// the construction uses m = size clusters, otherwise m is selected from epsilon.
struct BuildSpec {
  Method method = Method::ours;
  std::size_t k = 1;
  std::optional<std::size_t> size;
  double epsilon = 0.2;
  std::uint64_t seed = 0;
  OneMeanMethod one_mean = OneMeanMethod::frank_wolfe;
  /// Clustering used inside the construction.
  SolverMethod construction_solver = SolverMethod::kmeanspp_then_lloyd;
  std::size_t construction_iterations = 3;
  bool streaming = false;
  /// 0 picks 2 * size, or the config default when no size is given.
  std::size_t leaf_size = 0;
  std::size_t machines = 1;

  void validate() const {
    if (k < 1) throw InvalidArgument("k must be >= 1");
    if (size && *size < 1) throw InvalidArgument("size must be >= 1");
    if (method != Method::ours && !size) throw InvalidArgument(std::string(to_string(method)) + " needs a size");
    if (machines < 1) throw InvalidArgument("machines must be >= 1");
  }
};

inline CoresetConfig coreset_config(const BuildSpec& spec) {
  CoresetConfig cfg;
  cfg.epsilon = spec.epsilon;
  cfg.k = spec.k;
  cfg.one_mean = spec.one_mean;
  cfg.fixed_m = spec.size;
  cfg.solver = {spec.construction_solver, spec.construction_iterations, 1, derive_seed(spec.seed, 1), 0.0};
  return cfg;
}

inline SamplingConfig sampling_config(const BuildSpec& spec) {
  SamplingConfig cfg;
  cfg.size = spec.size.value_or(1);
  cfg.rng_seed = derive_seed(spec.seed, 2);
  cfg.bicriteria_k = spec.k;
  cfg.solver = {spec.construction_solver, spec.construction_iterations, 1, derive_seed(spec.seed, 3), 0.0};
  return cfg;
}

inline Reducer make_reducer(const BuildSpec& spec) {
  switch (spec.method) {
    case Method::ours: return kmean_reducer(coreset_config(spec));
    case Method::uniform: return uniform_reducer(sampling_config(spec));
    case Method::sensitivity: return sensitivity_reducer(sampling_config(spec));
  }
  throw InvalidArgument("unknown method");
}

inline std::size_t resolve_leaf_size(const BuildSpec& spec) {
  if (spec.leaf_size > 0) return spec.leaf_size;
  if (spec.size) return std::max<std::size_t>(2, 2 * *spec.size);
  return default_leaf_size(coreset_config(spec));
}

struct BuildOutcome {
  Coreset coreset;
  double build_ms = 0.0;
  /// Set for distributed runs.
  std::optional<DistributedResult> distributed;
  std::size_t max_live_buckets = 0;
};

/// Round-robin split: point i goes to shard i mod M.
inline std::vector<WeightedSet> round_robin_shards(const WeightedSet& set, std::size_t machines) {
  std::vector<std::vector<SparseVector>> pts(machines);
  std::vector<std::vector<double>> ws(machines);
  for (std::size_t i = 0; i < set.size(); ++i) {
    pts[i % machines].push_back(set.point(i));
    ws[i % machines].push_back(set.weight(i));
  }
  std::vector<WeightedSet> out;
  for (std::size_t m = 0; m < machines; ++m) out.emplace_back(set.dim(), std::move(pts[m]), std::move(ws[m]));
  return out;
}

inline BuildOutcome build_coreset(const WeightedSet& set, const BuildSpec& spec,
                                  const CoresetTree::Hook& trace = {}) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  BuildOutcome out;
  if (!spec.streaming && spec.machines == 1) {
    out.coreset = make_reducer(spec)(set, 0);
  } else if (spec.machines == 1) {
    CoresetTree tree(set.dim(), make_reducer(spec), resolve_leaf_size(spec));
    tree.set_hook([&](const TreeSnapshot& s) {
      out.max_live_buckets = std::max(out.max_live_buckets, s.live_buckets);
      if (trace) trace(s);
    });
    for (std::size_t i = 0; i < set.size(); ++i) tree.insert(set.point(i), set.weight(i));
    out.coreset = tree.finalize();
  } else {
    if (set.additive() != 0.0) throw InvalidArgument("distributed input must have zero additive weight");
    const auto shards = round_robin_shards(set, spec.machines);
    const std::size_t leaf = resolve_leaf_size(spec);
    out.distributed = distributed_run(shards, spec.machines, [&] {
      return CoresetTree(set.dim(), make_reducer(spec), leaf);
    });
    out.coreset = out.distributed->coreset;
  }
  out.build_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

/// Solver used for the full-data reference cost C_k.
struct BaselineSpec {
  std::size_t restarts = 25;
  std::size_t max_iterations = 1000;
  double tol = 1e-9;
  std::uint64_t seed = 0;

  SolverConfig solver() const {
    return {SolverMethod::kmeanspp_then_lloyd, max_iterations, restarts, seed, tol};
  }
};

/// JSON file of previously computed reference costs, keyed by the input
/// fingerprint and the solver settings.
class BaselineCache {
 public:
  BaselineCache() = default;
  explicit BaselineCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;
    try {
      data_ = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("baseline cache " + path_ + ": " + e.what(), 0);
    }
    if (!data_.is_object()) throw ParseError("baseline cache " + path_ + ": expected an object", 0);
  }

  static std::string key(const WeightedSet& set, std::size_t k, const BaselineSpec& b) {
    return "k=" + std::to_string(k) + ";n=" + std::to_string(set.size()) + ";dim=" + std::to_string(set.dim()) +
           ";w=" + format_double(set.total_weight()) + ";nnz=" + std::to_string(total_nnz(set)) +
           ";restarts=" + std::to_string(b.restarts) + ";iters=" + std::to_string(b.max_iterations) +
           ";tol=" + format_double(b.tol) + ";seed=" + std::to_string(b.seed);
  }

  std::optional<double> get(const std::string& key) const {
    if (!data_.contains(key)) return std::nullopt;
    return data_.at(key).get<double>();
  }

  void put(const std::string& key, double value) {
    data_[key] = value;
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::trunc);
    if (!out) throw IoError("cannot write baseline cache " + path_);
    out << data_.dump(2) << '\n';
    if (!out) throw IoError("cannot write baseline cache " + path_);
  }

 private:
  static std::size_t total_nnz(const WeightedSet& set) {
    std::size_t n = 0;
    for (const auto& p : set.points()) n += p.nnz();
    return n;
  }

  std::string path_;
  nlohmann::json data_ = nlohmann::json::object();
};

struct EvalSettings {
  std::size_t k = 1;
  std::size_t solver_iters = 300;
  std::size_t restarts = 10;
  double tol = 1e-9;
  std::uint64_t seed = 0;
  BaselineSpec baseline{};
};

struct EvalReport {
  std::string method;
  std::size_t coreset_size = 0;
  std::size_t k = 0;
  /// C_t: cost on the full input of the centers solved on the coreset.
  double cost_on_full = 0.0;
  /// C_k: reference cost of solving on the full input.
  double baseline_cost = 0.0;
  double eps_hat = 0.0;
  std::map<std::string, double> wall_ms;
  std::uint64_t seed = 0;
  nlohmann::json metadata = nlohmann::json::object();
};

inline void to_json(nlohmann::json& j, const EvalReport& r) {
  j = nlohmann::json{{"method", r.method},
                     {"coreset_size", r.coreset_size},
                     {"k", r.k},
                     {"cost_on_full", r.cost_on_full},
                     {"baseline_cost", r.baseline_cost},
                     {"eps_hat", r.eps_hat},
                     {"wall_ms", r.wall_ms},
                     {"seed", r.seed},
                     {"metadata", r.metadata}};
}

inline void from_json(const nlohmann::json& j, EvalReport& r) {
  j.at("method").get_to(r.method);
  j.at("coreset_size").get_to(r.coreset_size);
  j.at("k").get_to(r.k);
  j.at("cost_on_full").get_to(r.cost_on_full);
  j.at("baseline_cost").get_to(r.baseline_cost);
  j.at("eps_hat").get_to(r.eps_hat);
  j.at("wall_ms").get_to(r.wall_ms);
  j.at("seed").get_to(r.seed);
  if (j.contains("metadata")) r.metadata = j.at("metadata");
}

inline double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

/// C_k, from the cache when present.
inline double baseline_cost(const WeightedSet& full, std::size_t k, const BaselineSpec& spec,
                            BaselineCache* cache = nullptr, bool* hit = nullptr) {
  const std::string key = BaselineCache::key(full, k, spec);
  if (cache) {
    if (auto v = cache->get(key)) {
      if (hit) *hit = true;
      return *v;
    }
  }
  if (hit) *hit = false;
  const double c = solve_kmeans(full, k, spec.solver()).cost;
  if (cache) cache->put(key, c);
  return c;
}

/// Solves k-means on the coreset and scores the centers on the full input.
inline EvalReport evaluate(const WeightedSet& full, const Coreset& coreset, const EvalSettings& s,
                           BaselineCache* cache = nullptr) {
  if (s.k < 1) throw InvalidArgument("k must be >= 1");
  check_same_dim(full.dim(), coreset.base.dim());
  if (coreset.base.empty()) throw InvalidArgument("empty coreset");
  EvalReport r;
  r.method = coreset.method;
  r.coreset_size = coreset.size();
  r.k = s.k;
  r.seed = s.seed;

  auto t0 = std::chrono::steady_clock::now();
  const SolverConfig solver{SolverMethod::kmeanspp_then_lloyd, s.solver_iters, s.restarts, s.seed, s.tol};
  const auto sol = solve_kmeans(coreset.base, s.k, solver);
  r.wall_ms["solve"] = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  r.cost_on_full = cost(full, sol.centers);
  r.wall_ms["evaluate"] = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  bool hit = false;
  r.baseline_cost = baseline_cost(full, s.k, s.baseline, cache, &hit);
  r.wall_ms["baseline"] = ms_since(t0);

  r.eps_hat = r.cost_on_full / r.baseline_cost - 1.0;
  r.metadata["baseline"] = {{"restarts", s.baseline.restarts},
                            {"max_iterations", s.baseline.max_iterations},
                            {"tol", s.baseline.tol},
                            {"seed", s.baseline.seed},
                            {"cached", hit}};
  r.metadata["coreset_solver"] = {{"restarts", s.restarts}, {"max_iterations", s.solver_iters}, {"tol", s.tol}};
  r.metadata["coreset"] = {{"epsilon", coreset.epsilon},
                           {"built_for_k", coreset.built_for_k},
                           {"depth", coreset.depth},
                           {"additive", coreset.base.additive()}};
  r.metadata["input"] = {{"n", full.size()}, {"dim", full.dim()}};
  return r;
}

/// Type 7 sample quantile (linear interpolation between order statistics).
inline double quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw InvalidArgument("quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= xs.size()) return xs.back();
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[lo + 1] - xs[lo]);
}

struct AggregateRow {
  std::string method;
  std::size_t size = 0;
  std::size_t k = 0;
  std::size_t seed_count = 0;
  double median_eps = 0.0;
  double q1_eps = 0.0;
  double q3_eps = 0.0;
  double median_ms = 0.0;
};

/// One row per (method, requested size, k). Time is build plus coreset solve.
inline std::vector<AggregateRow> aggregate(const std::vector<std::tuple<std::string, std::size_t, EvalReport>>& cells) {
  std::map<std::tuple<std::string, std::size_t, std::size_t>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& [method, size, r] : cells) {
    auto& g = groups[{method, size, r.k}];
    g.first.push_back(r.eps_hat);
    double ms = 0.0;
    for (const char* phase : {"build", "solve"}) {
      auto it = r.wall_ms.find(phase);
      if (it != r.wall_ms.end()) ms += it->second;
    }
    g.second.push_back(ms);
  }
  std::vector<AggregateRow> rows;
  for (const auto& [key, g] : groups) {
    rows.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), g.first.size(), quantile(g.first, 0.5),
                    quantile(g.first, 0.25), quantile(g.first, 0.75), quantile(g.second, 0.5)});
  }
  return rows;
}

inline void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
  os << "method,size,k,seed_count,median_eps,q1_eps,q3_eps,median_ms\n";
  for (const auto& r : rows) {
    os << r.method << ',' << r.size << ',' << r.k << ',' << r.seed_count << ',' << format_double(r.median_eps) << ','
       << format_double(r.q1_eps) << ',' << format_double(r.q3_eps) << ',' << format_double(r.median_ms) << '\n';
  }
  if (!os) throw IoError("write failed");
}

}  // namespace skc
