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
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "skc/errors.hpp"
#include "skc/frank_wolfe.hpp"
#include "skc/kmeans.hpp"
#include "skc/summation.hpp"
#include "skc/weighted_set.hpp"

namespace skc {

/// Per coreset point: the input points it combines.
using Provenance = std::vector<std::vector<ConvexTerm>>;

/// A weighted set S = (S', w, phi) standing in for a larger input.
struct Coreset {
  WeightedSet base;
  /// Error parameter the construction was run with (0 for exact 1-mean coresets).
  double epsilon = 0.0;
  std::size_t built_for_k = 1;
  /// Indices refer to the points of the set the coreset was built from.
  std::optional<Provenance> provenance;
  /// "ours", "uniform" or "sensitivity".
  std::string method = "ours";
  /// Reduce layers on the deepest path (merge-and-reduce trees); the
  /// reported guarantee is epsilon * depth.
  std::size_t depth = 1;

  std::size_t size() const noexcept { return base.size(); }
  double guarantee() const noexcept { return epsilon * static_cast<double>(depth); }

  friend bool operator==(const Coreset&, const Coreset&) = default;
};

enum class OneMeanMethod { exact_mean, frank_wolfe };

inline const char* to_string(OneMeanMethod m) {
  return m == OneMeanMethod::exact_mean ? "exact_mean" : "frank_wolfe";
}

struct CoresetConfig {
  double epsilon = 0.2;
  std::size_t k = 1;
  OneMeanMethod one_mean = OneMeanMethod::frank_wolfe;
  SolverConfig solver{};
  /// Upper limit for t in m = k^t, on top of the ceil(1/eps^2) bound.
  std::size_t max_t = 64;
  /// Skip m-selection and use this many clusters.
  std::optional<std::size_t> fixed_m;
  FrankWolfeOptions frank_wolfe{};

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("CoresetConfig: epsilon must be in (0, 1)");
    if (k < 1) throw InvalidArgument("CoresetConfig: k must be >= 1");
    if (max_t < 1) throw InvalidArgument("CoresetConfig: max_t must be >= 1");
    if (fixed_m && *fixed_m < 1) throw InvalidArgument("CoresetConfig: fixed_m must be >= 1");
    solver.validate();
  }
};

struct MSelection {
  std::size_t t = 0;
  std::size_t m = 1;
  /// opt(P, k^i) estimates for i = 0, 1, ... as far as evaluated.
  std::vector<double> opt_estimates;
  /// No t in range passed the stopping test (possible only with heuristic
  /// opt); t is then the one with the smallest gap.
  bool forced = false;
};

namespace detail {

inline std::size_t capped_power(std::size_t k, std::size_t t, std::size_t cap) {
  std::size_t m = 1;
  for (std::size_t i = 0; i < t; ++i) {
    if (m >= cap) return cap;
    if (k > 1 && m > cap / k) return cap;
    m *= k;
  }
  return std::min(m, cap);
}

}  // namespace detail

/// Smallest t >= 0 with opt(P,k^t) - opt(P,k^(t+1)) <= eps^2 * opt(P,k),
/// opt evaluated with cfg.solver. Searches t <= min(max_t, ceil(1/eps^2)),
/// where the exact test is known to succeed. Any eps > 0 is accepted here.
inline MSelection select_m(const WeightedSet& set, const CoresetConfig& cfg) {
  if (set.empty()) throw InvalidArgument("select_m: empty set");
  if (!(cfg.epsilon > 0.0)) throw InvalidArgument("select_m: epsilon must be positive");
  if (cfg.k < 1) throw InvalidArgument("select_m: k must be >= 1");
  const std::size_t n = set.size();
  const std::size_t t_cap = std::min(cfg.max_t, ceil_div_eps_sq(1.0, cfg.epsilon));

  MSelection out;
  auto opt = [&](std::size_t t) {
    while (out.opt_estimates.size() <= t) {
      const std::size_t m = detail::capped_power(cfg.k, out.opt_estimates.size(), n);
      out.opt_estimates.push_back(approx_opt(set, m, cfg.solver));
    }
    return out.opt_estimates[t];
  };

  const double threshold = cfg.epsilon * cfg.epsilon * opt(1);
  double best_gap = std::numeric_limits<double>::infinity();
  std::size_t best_t = 0;
  for (std::size_t t = 0; t <= t_cap; ++t) {
    const double gap = opt(t) - opt(t + 1);
    if (gap <= threshold) {
      out.t = t;
      out.m = detail::capped_power(cfg.k, t, n);
      return out;
    }
    if (gap < best_gap) {
      best_gap = gap;
      best_t = t;
    }
  }
  out.t = best_t;
  out.m = detail::capped_power(cfg.k, best_t, n);
  out.forced = true;
  return out;
}

/// (1,0)-coreset: the weighted mean with the whole mass, and the variance
/// folded into the additive weight. cost(S,{q}) = cost(P,{q}) for every q.
inline Coreset one_mean_coreset_exact(const WeightedSet& part) {
  if (part.empty()) throw InvalidArgument("one_mean_coreset_exact: empty set");
  SparseVector mu = weighted_mean(part);
  const double var = weighted_sq_dist_sum(part, mu);
  Coreset c;
  c.base = WeightedSet(part.dim(), {std::move(mu)}, {part.total_weight()}, var + part.additive());
  c.epsilon = 0.0;
  c.built_for_k = 1;
  return c;
}

/// Sparse (1,eps)-coreset: the Frank-Wolfe approximation x of the mean
/// carries the whole mass, phi = variance + rho. The residual W*||x-mu||^2
/// is not folded into phi; the stopping rule bounds it instead.
inline Coreset one_mean_coreset_sparse(const WeightedSet& part, double epsilon,
                                       const FrankWolfeOptions& opt = {}) {
  if (part.empty()) throw InvalidArgument("one_mean_coreset_sparse: empty set");
  auto fw = frank_wolfe_mean(part, epsilon, opt);
  const double var = weighted_variance(part);
  Coreset c;
  c.base = WeightedSet(part.dim(), {std::move(fw.point)}, {part.total_weight()}, var + part.additive());
  c.epsilon = epsilon;
  c.built_for_k = 1;
  c.provenance = Provenance{std::move(fw.coeffs)};
  return c;
}

struct CoresetBuildInfo {
  std::size_t m = 0;
  std::optional<MSelection> selection;
  /// Parts whose Frank-Wolfe run stopped at max_iter above target.
  std::size_t fw_unconverged = 0;
};

struct CoresetBuild {
  Coreset coreset;
  CoresetBuildInfo info;
};

/// k-means coreset: pick m = k^t, partition P by an m-means solution, and
/// replace every part by its 1-mean coreset. Output points come in part
/// order (center index order), one per non-empty part.
inline CoresetBuild build_kmean_coreset(const WeightedSet& set, const CoresetConfig& cfg) {
  cfg.validate();
  if (set.empty()) throw InvalidArgument("kmean_coreset: empty set");
  const std::size_t n = set.size();

  CoresetBuild out;
  if (cfg.fixed_m) {
    out.info.m = std::min(*cfg.fixed_m, n);
  } else {
    out.info.selection = select_m(set, cfg);
    out.info.m = out.info.selection->m;
  }

  Partition parts;
  if (out.info.m >= n) {
    // The m-means of P are its points: every point is its own part.
    const double share = set.additive() / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      parts.parts.emplace_back(set.dim(), std::vector<SparseVector>{set.point(i)},
                               std::vector<double>{set.weight(i)}, share);
      parts.part_center.push_back(i);
      parts.members.push_back({i});
      parts.assignment.push_back(i);
    }
  } else {
    const auto sol = solve_kmeans(set, out.info.m, cfg.solver);
    parts = partition(set, sol.centers);
  }

  std::vector<SparseVector> points;
  std::vector<double> weights;
  Provenance provenance;
  CompensatedSum phi_parts, var_sum, additive_parts;
  const bool sparse = cfg.one_mean == OneMeanMethod::frank_wolfe;
  for (std::size_t i = 0; i < parts.parts.size(); ++i) {
    const WeightedSet& part = parts.parts[i];
    additive_parts.add(part.additive());
    Coreset one;
    if (sparse) {
      auto fw = frank_wolfe_mean(part, cfg.epsilon, cfg.frank_wolfe);
      if (!fw.target_met) ++out.info.fw_unconverged;
      const double var = weighted_variance(part);
      std::vector<ConvexTerm> terms = std::move(fw.coeffs);
      for (auto& term : terms) term.index = parts.members[i][term.index];
      provenance.push_back(std::move(terms));
      one.base = WeightedSet(part.dim(), {std::move(fw.point)}, {part.total_weight()}, var + part.additive());
      var_sum.add(var);
    } else {
      SparseVector mu = weighted_mean(part);
      const double var = weighted_sq_dist_sum(part, mu);
      one.base = WeightedSet(part.dim(), {std::move(mu)}, {part.total_weight()}, var + part.additive());
      var_sum.add(var);
    }
    // Single-point S_i: cost(S_i, mu(S_i)) is its additive weight.
    phi_parts.add(one.base.additive());
    points.push_back(one.base.point(0));
    weights.push_back(one.base.weight(0));
  }

  const double rho = set.additive();
  if (std::fabs(additive_parts.value() - rho) > 1e-12 * std::max(1.0, rho)) {
    throw std::logic_error("kmean_coreset: additive weight not conserved by the partition");
  }
  // Same quantity as phi_parts, but with rho added once so phi >= rho holds exactly.
  const double phi = rho + var_sum.value();
  if (std::fabs(phi - phi_parts.value()) > 1e-9 * std::max(1.0, phi)) {
    throw std::logic_error("kmean_coreset: additive weight bookkeeping mismatch");
  }

  Coreset& c = out.coreset;
  c.base = WeightedSet(set.dim(), std::move(points), std::move(weights), phi);
  c.epsilon = cfg.epsilon;
  c.built_for_k = cfg.k;
  if (sparse) c.provenance = std::move(provenance);
  c.method = "ours";
  c.depth = 1;
  return out;
}

inline Coreset kmean_coreset(const WeightedSet& set, const CoresetConfig& cfg) {
  return build_kmean_coreset(set, cfg).coreset;
}

/// Evaluates cost(S, Q) for a coreset.
inline double cost(const Coreset& s, const CenterSet& centers) { return cost(s.base, centers); }

}  // namespace skc
