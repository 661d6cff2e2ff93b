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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "skc/coreset.hpp"
#include "skc/errors.hpp"
#include "skc/kmeans.hpp"
#include "skc/rng.hpp"
#include "skc/summation.hpp"
#include "skc/weighted_set.hpp"

namespace skc {

struct SamplingConfig {
  /// Number of i.i.d. draws m.
  std::size_t size = 100;
  std::uint64_t rng_seed = 0;
  /// Centers in the rough clustering that drives sensitivity sampling.
  std::size_t bicriteria_k = 1;
  SolverConfig solver{SolverMethod::kmeanspp_then_lloyd, 3, 1, 0, 0.0};

  void validate() const {
    if (size < 1) throw InvalidArgument("SamplingConfig: size must be >= 1");
    if (bicriteria_k < 1) throw InvalidArgument("SamplingConfig: bicriteria_k must be >= 1");
    solver.validate();
  }
};

namespace detail {

// m i.i.d. draws from `prob`; a draw of point i gets weight u(i) / (m * pr(i)).
inline Coreset draw_importance_sample(const WeightedSet& set, const std::vector<double>& prob,
                                      const SamplingConfig& cfg, const char* method) {
  DiscreteSampler sampler(prob);
  Rng rng(cfg.rng_seed);
  const double total = sampler.total();
  const double m = static_cast<double>(cfg.size);
  std::vector<SparseVector> pts;
  std::vector<double> ws;
  Provenance prov;
  pts.reserve(cfg.size);
  ws.reserve(cfg.size);
  prov.reserve(cfg.size);
  for (std::size_t d = 0; d < cfg.size; ++d) {
    const std::size_t i = sampler(rng);
    pts.push_back(set.point(i));
    ws.push_back(set.weight(i) * total / (m * prob[i]));
    prov.push_back({{i, 1.0}});
  }
  Coreset c;
  c.base = WeightedSet(set.dim(), std::move(pts), std::move(ws), set.additive());
  c.epsilon = 0.0;
  c.built_for_k = cfg.bicriteria_k;
  c.provenance = std::move(prov);
  c.method = method;
  return c;
}

}  // namespace detail

/// Uniform sampling: m draws with probability proportional to u(p), each
/// weighted W/m. Unbiased for any fixed Q.
inline Coreset uniform_coreset(const WeightedSet& set, const SamplingConfig& cfg) {
  cfg.validate();
  if (set.empty()) throw InvalidArgument("uniform_coreset: empty set");
  return detail::draw_importance_sample(set, set.weights(), cfg, "uniform");
}

struct SensitivityDistribution {
  CenterSet bicriteria;
  /// Normalized sampling probability per input point.
  std::vector<double> prob;
};

/// Sampling distribution of sensitivity sampling:
///   pr(p) ~ u(p) * d^2(p,B) / sum u d^2  +  u(p) / W(cluster of p)
/// where B is a rough bicriteria_k-means solution. The first term favors
/// points far from B, the second gives every cluster of B the same total
/// mass. If all points sit on B it degenerates to pr ~ u(p).
inline SensitivityDistribution sensitivity_distribution(const WeightedSet& set, const SamplingConfig& cfg) {
  cfg.validate();
  if (set.empty()) throw InvalidArgument("sensitivity_coreset: empty set");
  SensitivityDistribution out;
  out.bicriteria = solve_kmeans(set, cfg.bicriteria_k, cfg.solver).centers;
  const auto a = detail::assign(set, out.bicriteria);
  const std::size_t n = set.size();

  CompensatedSum spread;
  for (std::size_t i = 0; i < n; ++i) spread.add(set.weight(i) * a.dist_sq[i]);
  const double total_spread = spread.value();

  out.prob.assign(n, 0.0);
  if (!(total_spread > 0.0)) {
    const double w = set.total_weight();
    for (std::size_t i = 0; i < n; ++i) out.prob[i] = set.weight(i) / w;
    return out;
  }
  std::vector<CompensatedSum> cluster_mass(out.bicriteria.k());
  for (std::size_t i = 0; i < n; ++i) cluster_mass[a.center[i]].add(set.weight(i));
  CompensatedSum norm;
  for (std::size_t i = 0; i < n; ++i) {
    out.prob[i] = set.weight(i) * a.dist_sq[i] / total_spread + set.weight(i) / cluster_mass[a.center[i]].value();
    norm.add(out.prob[i]);
  }
  const double z = norm.value();
  for (double& p : out.prob) p /= z;
  return out;
}

/// Sensitivity (importance) sampling: m i.i.d. draws from
/// sensitivity_distribution, each weighted u(p) / (m * pr(p)).
inline Coreset sensitivity_coreset(const WeightedSet& set, const SamplingConfig& cfg) {
  const auto dist = sensitivity_distribution(set, cfg);
  return detail::draw_importance_sample(set, dist.prob, cfg, "sensitivity");
}

}  // namespace skc
