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
#include <limits>
#include <vector>

#include "skc/errors.hpp"
#include "skc/sparse_vector.hpp"
#include "skc/summation.hpp"
#include "skc/weighted_set.hpp"

namespace skc {

/// ceil(c / eps^2), robust to eps^2 rounding just below an integer ratio.
inline std::size_t ceil_div_eps_sq(double c, double eps) {
  return static_cast<std::size_t>(std::ceil(c / (eps * eps) - 1e-9));
}

enum class FrankWolfeStep {
  line_search,  ///< exact minimizer along the segment (closed form for the quadratic)
  open_loop,    ///< classic 2 / (iter + 2)
};

struct FrankWolfeOptions {
  /// 0 selects ceil(16 / eps^2).
  std::size_t max_iter = 0;
  FrankWolfeStep step = FrankWolfeStep::line_search;
  /// Stop once W * f(x) <= stop_factor * eps^2 * weighted_variance.
  double stop_factor = 1.0 / 16.0;
  bool record_trace = false;
};

struct ConvexTerm {
  std::size_t index;  // point index in the input set
  double coeff;
  friend bool operator==(const ConvexTerm&, const ConvexTerm&) = default;
};

struct FrankWolfeResult {
  /// Positive coefficients summing to one, ascending by index.
  std::vector<ConvexTerm> coeffs;
  /// The combination sum coeff * p, materialized.
  SparseVector point;
  /// ||point - mu||^2
  double achieved = 0.0;
  std::size_t iterations = 0;
  bool target_met = false;
  /// f(x_T) for T = 0..iterations, when requested.
  std::vector<double> trace;
};

/// Sparse approximation of the weighted mean by Frank-Wolfe over the convex
/// hull of the points. Minimizes f(x) = ||x - mu||^2 starting from the input
/// point nearest mu; each iteration adds at most one vertex, so the support
/// never exceeds iterations + 1 points and nnz(x) <= s(P) * (iterations + 1).
///
/// Runs in a compact coordinate system over the union of the points'
/// supports, O(nnz(P)) per iteration.
inline FrankWolfeResult frank_wolfe_mean(const WeightedSet& set, double epsilon,
                                         const FrankWolfeOptions& opt = {}) {
  if (set.empty()) throw InvalidArgument("frank_wolfe_mean: empty set");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("frank_wolfe_mean: epsilon must be in (0,1)");
  const std::size_t max_iter = opt.max_iter > 0 ? opt.max_iter : ceil_div_eps_sq(16.0, epsilon);
  const std::size_t n = set.size();

  const SparseVector mu = weighted_mean(set);
  const double total_w = set.total_weight();
  const double variance = weighted_sq_dist_sum(set, mu);
  const double target = opt.stop_factor * epsilon * epsilon * variance / total_w;

  // Compact coordinates.
  std::vector<Index> support;
  for (const auto& p : set.points()) support.insert(support.end(), p.indices().begin(), p.indices().end());
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  const std::size_t dim = support.size();
  auto local = [&](Index idx) {
    return static_cast<std::size_t>(std::lower_bound(support.begin(), support.end(), idx) - support.begin());
  };
  std::vector<std::vector<std::pair<std::size_t, double>>> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = set.point(i);
    for (std::size_t e = 0; e < p.nnz(); ++e) pts[i].push_back({local(p.indices()[e]), p.values()[e]});
  }
  std::vector<double> mu_d(dim, 0.0);
  for (std::size_t e = 0; e < mu.nnz(); ++e) mu_d[local(mu.indices()[e])] = mu.values()[e];

  std::size_t start = 0;
  double start_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = dist_sq(set.point(i), mu);
    if (d < start_d) {
      start_d = d;
      start = i;
    }
  }

  std::vector<double> alpha(n, 0.0);
  alpha[start] = 1.0;
  std::vector<double> x(dim, 0.0);
  for (auto [c, v] : pts[start]) x[c] = v;

  auto objective = [&] {
    double s = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double d = x[c] - mu_d[c];
      s += d * d;
    }
    return s;
  };

  FrankWolfeResult out;
  double f = objective();
  if (opt.record_trace) out.trace.push_back(f);
  std::vector<double> grad(dim);
  std::size_t iter = 0;
  while (f > target && iter < max_iter) {
    for (std::size_t c = 0; c < dim; ++c) grad[c] = x[c] - mu_d[c];
    // Linear minimization oracle over the vertices.
    std::size_t vertex = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (auto [c, v] : pts[i]) s += v * grad[c];
      if (s < best) {
        best = s;
        vertex = i;
      }
    }
    double x_grad = 0.0;
    for (std::size_t c = 0; c < dim; ++c) x_grad += x[c] * grad[c];
    const double gap = x_grad - best;
    if (!(gap > 0.0)) break;

    double gamma;
    if (opt.step == FrankWolfeStep::line_search) {
      // f(x + g (v - x)) = f - 2 g gap + g^2 ||v - x||^2
      std::vector<double>& dir = grad;  // reuse
      std::fill(dir.begin(), dir.end(), 0.0);
      for (auto [c, v] : pts[vertex]) dir[c] = v;
      double dd = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double d = dir[c] - x[c];
        dd += d * d;
      }
      if (!(dd > 0.0)) break;
      gamma = std::clamp(gap / dd, 0.0, 1.0);
    } else {
      gamma = 2.0 / (static_cast<double>(iter) + 2.0);
    }

    for (double& xc : x) xc *= (1.0 - gamma);
    for (auto [c, v] : pts[vertex]) x[c] += gamma * v;
    for (double& a : alpha) a *= (1.0 - gamma);
    alpha[vertex] += gamma;
    ++iter;
    f = objective();
    if (opt.record_trace) out.trace.push_back(f);
  }

  CompensatedSum mass;
  for (double a : alpha) {
    if (a > 0.0) mass.add(a);
  }
  const double norm = mass.value();
  SparseAccumulator acc(set.dim());
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] > 0.0) {
      out.coeffs.push_back({i, alpha[i] / norm});
      acc.add(set.point(i), alpha[i] / norm);
    }
  }
  out.point = out.coeffs.size() == 1 ? set.point(out.coeffs[0].index) : std::move(acc).finish();
  out.achieved = dist_sq(out.point, mu);
  out.iterations = iter;
  out.target_met = f <= target || out.achieved <= target;
  return out;
}

}  // namespace skc
