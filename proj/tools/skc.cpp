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


// skc: build, stream, evaluate and compare k-means coresets.
//
// Exit codes: 0 ok, 2 bad flags, 3 IO or parse error, 4 algorithm failure.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "skc.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kBadFlags = 2;
constexpr int kIoError = 3;
constexpr int kAlgorithmError = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputFlags {
  std::string path;
  std::string format = "pairs";
  std::uint64_t dim = 0;
  int index_base = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("--input", path, "Input points")->required();
    cmd->add_option("--format", format, "pairs, triplets or dense_csv")
        ->check(CLI::IsMember({"pairs", "triplets", "dense_csv"}));
    cmd->add_option("--dim", dim, "Dimension (required for pairs and triplets)");
    cmd->add_option("--index-base", index_base, "0 or 1")->check(CLI::IsMember({0, 1}));
  }

  skc::StreamFormat format_spec() const {
    skc::StreamFormat f{skc::parse_format_kind(format), dim, index_base};
    if (f.kind != skc::FormatKind::dense_csv && dim == 0) throw UsageError("--dim is required for " + format);
    return f;
  }

  skc::WeightedSet load() const {
    const auto fmt = format_spec();
    return skc::read_points_file(path, fmt);
  }
};

struct BuildFlags {
  std::size_t k = 1;
  double epsilon = 0.2;
  std::size_t size = 0;
  std::string method = "ours";
  std::uint64_t seed = 0;
  std::string one_mean = "frank_wolfe";
  std::string solver = "kmeanspp";
  std::size_t construction_iters = 3;

  void add(CLI::App* cmd) {
    cmd->add_option("--k", k, "Number of centers")->check(CLI::PositiveNumber);
    cmd->add_option("--epsilon", epsilon, "Error parameter (ours without --size)");
    cmd->add_option("--size", size, "Target coreset size");
    cmd->add_option("--method", method)->check(CLI::IsMember({"ours", "uniform", "sensitivity"}));
    cmd->add_option("--seed", seed);
    cmd->add_option("--one-mean", one_mean)->check(CLI::IsMember({"frank_wolfe", "exact_mean"}));
    cmd->add_option("--solver", solver, "Clustering inside the construction")
        ->check(CLI::IsMember({"kmeanspp", "lloyd", "exhaustive"}));
    cmd->add_option("--construction-iters", construction_iters)->check(CLI::PositiveNumber);
  }

  skc::BuildSpec spec() const {
    skc::BuildSpec s;
    s.method = skc::parse_method(method);
    s.k = k;
    if (size > 0) s.size = size;
    s.epsilon = epsilon;
    s.seed = seed;
    s.one_mean = one_mean == "exact_mean" ? skc::OneMeanMethod::exact_mean : skc::OneMeanMethod::frank_wolfe;
    s.construction_solver = solver == "exhaustive" ? skc::SolverMethod::exhaustive
                            : solver == "lloyd"    ? skc::SolverMethod::lloyd
                                                   : skc::SolverMethod::kmeanspp_then_lloyd;
    s.construction_iterations = construction_iters;
    if (s.method == skc::Method::ours && !s.size && !(epsilon > 0.0 && epsilon < 1.0)) {
      throw UsageError("--epsilon must be in (0, 1)");
    }
    try {
      s.validate();
    } catch (const skc::InvalidArgument& e) {
      throw UsageError(e.what());
    }
    return s;
  }
};

struct EvalFlags {
  std::size_t solver_iters = 300;
  std::size_t restarts = 10;
  std::uint64_t baseline_seed = 0;
  std::string baseline_cache;

  void add(CLI::App* cmd) {
    cmd->add_option("--solver-iters", solver_iters, "Lloyd iterations on the coreset")->check(CLI::PositiveNumber);
    cmd->add_option("--restarts", restarts, "Restarts on the coreset")->check(CLI::PositiveNumber);
    cmd->add_option("--baseline-seed", baseline_seed, "Seed of the full-data reference solve");
    cmd->add_option("--baseline-cache", baseline_cache, "JSON cache of reference costs");
  }

  skc::EvalSettings settings(std::size_t k, std::uint64_t seed) const {
    skc::EvalSettings s;
    s.k = k;
    s.solver_iters = solver_iters;
    s.restarts = restarts;
    s.seed = seed;
    s.baseline.seed = baseline_seed;
    return s;
  }
};

void write_json(const std::string& path, const nlohmann::json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw skc::IoError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw skc::IoError("write failed: " + path);
}

// Runs one command body and maps exceptions to exit codes.
template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    std::cerr << "skc: " << e.what() << '\n';
    return kBadFlags;
  } catch (const skc::ParseError& e) {
    std::cerr << "skc: parse error: " << e.what() << '\n';
    return kIoError;
  } catch (const skc::IoError& e) {
    std::cerr << "skc: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "skc: " << e.what() << '\n';
    return kAlgorithmError;
  }
}

int cmd_build(const InputFlags& in, const BuildFlags& bf, const std::string& out) {
  return guarded([&] {
    const auto spec = bf.spec();
    const auto set = in.load();
    const auto res = skc::build_coreset(set, spec);
    skc::write_coreset_file(out, res.coreset);
    std::cout << nlohmann::json{{"coreset_size", res.coreset.size()},
                                {"method", res.coreset.method},
                                {"build_ms", res.build_ms}}
                     .dump()
              << '\n';
    return kOk;
  });
}

int cmd_stream(const InputFlags& in, const BuildFlags& bf, const std::string& out, std::size_t leaf_size,
               std::size_t machines, const std::string& trace_path) {
  return guarded([&] {
    auto spec = bf.spec();
    spec.streaming = true;
    spec.leaf_size = leaf_size;
    spec.machines = machines;
    if (!trace_path.empty() && machines != 1) throw UsageError("--trace needs --machines 1");
    const auto set = in.load();

    std::ofstream trace;
    if (!trace_path.empty()) {
      trace.open(trace_path, std::ios::trunc);
      if (!trace) throw skc::IoError("cannot open " + trace_path);
      trace << "points_seen,live_buckets,resident_points\n";
    }
    skc::CoresetTree::Hook hook;
    if (trace.is_open()) {
      hook = [&](const skc::TreeSnapshot& s) {
        trace << s.points_seen << ',' << s.live_buckets << ',' << s.resident_points << '\n';
      };
    }
    const auto res = skc::build_coreset(set, spec, hook);
    if (trace.is_open() && !trace.flush()) throw skc::IoError("write failed: " + trace_path);
    skc::write_coreset_file(out, res.coreset);

    const std::size_t leaf = skc::resolve_leaf_size(spec);
    nlohmann::json summary{{"points_seen", set.size()},
                           {"coreset_size", res.coreset.size()},
                           {"leaf_size", leaf},
                           {"machines", machines},
                           {"depth", res.coreset.depth},
                           {"guarantee", res.coreset.guarantee()},
                           {"build_ms", res.build_ms}};
    if (res.distributed) {
      summary["communicated_points"] = res.distributed->communicated_points;
      summary["communicated_nnz"] = res.distributed->communicated_nnz;
      summary["shard_coreset_sizes"] = res.distributed->shard_sizes;
    } else {
      summary["communicated_points"] = 0;
      summary["max_live_buckets"] = res.max_live_buckets;
      summary["live_bucket_bound"] = skc::live_bucket_bound(set.size(), leaf);
    }
    std::cout << summary.dump(2) << '\n';
    return kOk;
  });
}

int cmd_eval(const InputFlags& in, const EvalFlags& ef, const std::string& coreset_path, std::size_t k,
             std::uint64_t seed, const std::string& out) {
  return guarded([&] {
    in.format_spec();
    const auto set = in.load();
    const auto coreset = skc::read_coreset_file(coreset_path);
    skc::BaselineCache cache = ef.baseline_cache.empty() ? skc::BaselineCache() : skc::BaselineCache(ef.baseline_cache);
    auto report = skc::evaluate(set, coreset, ef.settings(k, seed), &cache);
    report.metadata["input"]["path"] = in.path;
    report.metadata["coreset_path"] = coreset_path;
    write_json(out, report);
    return kOk;
  });
}

struct CompareFlags {
  std::vector<std::size_t> k_list{1};
  std::vector<std::size_t> sizes{100};
  std::vector<std::string> methods{"ours", "uniform", "sensitivity"};
  std::vector<std::uint64_t> seeds{0};
  bool streaming = false;
  std::size_t leaf_size = 0;
  std::size_t machines = 1;
  std::string out_dir;
  std::size_t jobs = 1;
};

int cmd_compare(const InputFlags& in, const BuildFlags& bf, const EvalFlags& ef, const CompareFlags& cf) {
  return guarded([&] {
    in.format_spec();
    BuildFlags base = bf;
    base.size = cf.sizes.empty() ? 1 : cf.sizes.front();
    const skc::BuildSpec proto = base.spec();
    if (cf.methods.empty() || cf.sizes.empty() || cf.k_list.empty() || cf.seeds.empty()) {
      throw UsageError("empty sweep");
    }
    for (auto s : cf.sizes) {
      if (s == 0) throw UsageError("--sizes must be positive");
    }
    for (auto k : cf.k_list) {
      if (k == 0) throw UsageError("--k-list must be positive");
    }
    const auto set = in.load();
    std::error_code ec;
    std::filesystem::create_directories(cf.out_dir, ec);
    if (ec) throw skc::IoError("cannot create " + cf.out_dir + ": " + ec.message());

    skc::BaselineCache cache = ef.baseline_cache.empty() ? skc::BaselineCache() : skc::BaselineCache(ef.baseline_cache);
    // Reference costs first, so the cells only read the cache.
    for (auto k : cf.k_list) skc::baseline_cost(set, k, ef.settings(k, 0).baseline, &cache);

    struct Cell {
      std::string method;
      std::size_t size;
      std::size_t k;
      std::uint64_t seed;
      std::optional<skc::EvalReport> report;
      std::string error;
    };
    std::vector<Cell> cells;
    for (const auto& m : cf.methods)
      for (auto size : cf.sizes)
        for (auto k : cf.k_list)
          for (auto seed : cf.seeds) cells.push_back({m, size, k, seed, std::nullopt, {}});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
        Cell& c = cells[i];
        try {
          skc::BuildSpec spec = proto;
          spec.method = skc::parse_method(c.method);
          spec.size = c.size;
          spec.k = c.k;
          spec.seed = c.seed;
          spec.streaming = cf.streaming;
          spec.leaf_size = cf.leaf_size;
          spec.machines = cf.machines;
          const auto built = skc::build_coreset(set, spec);
          auto r = skc::evaluate(set, built.coreset, ef.settings(c.k, c.seed), &cache);
          r.wall_ms["build"] = built.build_ms;
          r.metadata["requested_size"] = c.size;
          r.metadata["streaming"] = cf.streaming;
          r.metadata["machines"] = cf.machines;
          c.report = std::move(r);
        } catch (const std::exception& e) {
          c.error = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < std::max<std::size_t>(1, cf.jobs); ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<std::tuple<std::string, std::size_t, skc::EvalReport>> ok;
    for (const auto& c : cells) {
      const std::string name = c.method + "_m" + std::to_string(c.size) + "_k" + std::to_string(c.k) + "_s" +
                               std::to_string(c.seed) + ".json";
      const std::string path = (std::filesystem::path(cf.out_dir) / name).string();
      if (c.report) {
        write_json(path, *c.report);
        ok.emplace_back(c.method, c.size, *c.report);
      } else {
        write_json(path, nlohmann::json{{"method", c.method},
                                        {"requested_size", c.size},
                                        {"k", c.k},
                                        {"seed", c.seed},
                                        {"error", c.error}});
        std::cerr << "skc: cell " << name << " failed: " << c.error << '\n';
      }
    }
    const std::string agg = (std::filesystem::path(cf.out_dir) / "aggregate.csv").string();
    std::ofstream os(agg, std::ios::trunc);
    if (!os) throw skc::IoError("cannot open " + agg);
    skc::write_aggregate_csv(os, skc::aggregate(ok));
    return ok.empty() ? kAlgorithmError : kOk;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-means coresets for sparse data"};
  app.require_subcommand(1);

  InputFlags in;
  BuildFlags bf;
  EvalFlags ef;
  CompareFlags cf;
  std::string out;
  std::string coreset_path;
  std::string trace_path;
  std::size_t leaf_size = 0;
  std::size_t machines = 1;
  std::size_t eval_k = 1;
  std::uint64_t eval_seed = 0;

  auto* build = app.add_subcommand("build", "Build a coreset offline");
  in.add(build);
  bf.add(build);
  build->add_option("--out", out, "Coreset file")->required();

  auto* stream = app.add_subcommand("stream", "Build a coreset with the merge-and-reduce tree");
  in.add(stream);
  bf.add(stream);
  stream->add_option("--out", out, "Coreset file")->required();
  stream->add_option("--leaf-size", leaf_size, "Points per leaf (default 2 * size)");
  stream->add_option("--machines", machines, "Simulated machines")->check(CLI::PositiveNumber);
  stream->add_option("--trace", trace_path, "CSV of points_seen,live_buckets,resident_points");

  auto* eval = app.add_subcommand("eval", "Score a coreset against the full input");
  in.add(eval);
  ef.add(eval);
  eval->add_option("--coreset", coreset_path)->required();
  eval->add_option("--k", eval_k)->check(CLI::PositiveNumber);
  eval->add_option("--seed", eval_seed);
  eval->add_option("--out", out, "Report JSON (stdout when omitted)");

  auto* compare = app.add_subcommand("compare", "Sweep methods, sizes, k and seeds");
  in.add(compare);
  ef.add(compare);
  compare->add_option("--epsilon", bf.epsilon);
  compare->add_option("--one-mean", bf.one_mean)->check(CLI::IsMember({"frank_wolfe", "exact_mean"}));
  compare->add_option("--solver", bf.solver)->check(CLI::IsMember({"kmeanspp", "lloyd", "exhaustive"}));
  compare->add_option("--construction-iters", bf.construction_iters)->check(CLI::PositiveNumber);
  compare->add_option("--k-list", cf.k_list)->delimiter(',');
  compare->add_option("--sizes", cf.sizes)->delimiter(',');
  compare->add_option("--methods", cf.methods)->delimiter(',')->check(CLI::IsMember({"ours", "uniform", "sensitivity"}));
  compare->add_option("--seeds", cf.seeds, "Seed list")->delimiter(',');
  compare->add_flag("--streaming", cf.streaming, "Build through the merge-and-reduce tree");
  compare->add_option("--leaf-size", cf.leaf_size);
  compare->add_option("--machines", cf.machines)->check(CLI::PositiveNumber);
  compare->add_option("--jobs", cf.jobs)->check(CLI::PositiveNumber);
  compare->add_option("--out", cf.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadFlags;
  }

  if (*build) return cmd_build(in, bf, out);
  if (*stream) return cmd_stream(in, bf, out, leaf_size, machines, trace_path);
  if (*eval) return cmd_eval(in, ef, coreset_path, eval_k, eval_seed, out);
  if (*compare) return cmd_compare(in, bf, ef, cf);
  return kBadFlags;
}
