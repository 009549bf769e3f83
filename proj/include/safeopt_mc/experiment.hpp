#pragma once

#include <Eigen/Core>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "safeopt_mc/bench/plant.hpp"
#include "safeopt_mc/bench/synthetic.hpp"
#include "safeopt_mc/contexts.hpp"
#include "safeopt_mc/io/config.hpp"
#include "safeopt_mc/io/trace_csv.hpp"
#include "safeopt_mc/optimizer.hpp"
#include "safeopt_mc/oracle.hpp"
#include "safeopt_mc/rng.hpp"
#include "safeopt_mc/ucb.hpp"

namespace safeopt_mc {

namespace fs = std::filesystem;
using nlohmann::json;

/// Everything needed to run one seed of an experiment.
struct Problem {
  ParameterDomain domain;
  SurrogateKernelSpec model;
  IndexSet seed;
  std::vector<double> lipschitz;
  std::optional<bench::SyntheticInstance> instance;  // synthetic only
  double reference_cost = 0.0;                       // plant only: noise-free C(a0)
  bench::PerformanceMap performance;                 // plant only
};

inline ParameterDomain make_domain(const io::DomainConfig& d) {
  return ParameterDomain::grid(d.lower, d.upper, d.counts, d.metric_scales);
}

inline IndexSet locate(const ParameterDomain& domain, const std::vector<Eigen::VectorXd>& points,
                       const std::string& field) {
  IndexSet out;
  for (const auto& p : points) {
    if (p.size() != domain.dim()) throw ConfigError(field, "seed point has the wrong dimension");
    const auto idx = domain.find(p, 1e-9);
    if (!idx) throw ConfigError(field, "seed point is not on the domain grid");
    out.push_back(*idx);
  }
  return normalized(out);
}

inline SurrogateKernelSpec model_spec(const std::vector<io::OutputConfig>& outputs, double reference_cost) {
  SurrogateKernelSpec s;
  for (const auto& o : outputs) {
    KernelSpec k = o.kernel;
    double noise = o.noise_std;
    if (o.relative_to_reference_cost) {
      k.prior_variance *= reference_cost * reference_cost;
      noise *= reference_cost;
    }
    s.per_output.push_back(k);
    s.noise_std.push_back(noise);
    s.prior_mean.push_back(o.prior_mean);
  }
  return s;
}

/// Resolves the per-seed problem: draws the synthetic instance or computes
/// the plant's reference cost, and fixes the initial safe set.
inline Problem make_problem(const io::ExperimentConfig& c, std::uint64_t seed) {
  Problem p{make_domain(c.domain), {}, {}, c.algorithm.lipschitz, std::nullopt, 0.0, {}};
  const auto& b = c.benchmark;
  if (b.kind == io::BenchmarkKind::Synthetic) {
    SurrogateKernelSpec gen = model_spec(b.generator, 1.0);
    gen.prior_mean.clear();
    p.instance = bench::sample_synthetic(derive_seed(seed, Stream::SyntheticDraw), gen, p.domain, b.unsafe_fraction);
    p.model = model_spec(c.outputs, 1.0);
    if (b.prior_mean_from_offset) {
      for (std::size_t i = 0; i < p.model.prior_mean.size(); ++i) p.model.prior_mean[i] -= p.instance->offsets[i];
    }
    if (c.algorithm.empirical_lipschitz) {
      p.lipschitz = p.instance->lipschitz;
      // Entry 0 is unused; constraint constants must stay positive.
      for (std::size_t i = 1; i < p.lipschitz.size(); ++i) p.lipschitz[i] = std::max(p.lipschitz[i], 1e-12);
    }
    p.seed = c.seed_safest ? IndexSet{p.instance->safest_point()} : locate(p.domain, c.seed_points, "seed_points");
  } else {
    bench::PlantSpec plant = b.plant;
    p.reference_cost = bench::noise_free_cost(plant, b.initial, b.reference_speed);
    p.performance = {p.reference_cost, b.performance_fraction, b.sign};
    p.model = model_spec(c.outputs, p.reference_cost);
    std::vector<Eigen::VectorXd> pts = c.seed_points;
    if (c.context && !c.context->schedule.front().seed_points.empty()) pts = c.context->schedule.front().seed_points;
    p.seed = locate(p.domain, pts, "seed_points");
  }
  return p;
}

/// Evaluator for the configured benchmark. `rng` must outlive it.
inline Evaluator make_evaluator(const io::ExperimentConfig& c, const Problem& p, std::mt19937_64& rng) {
  const auto& b = c.benchmark;
  if (b.kind == io::BenchmarkKind::Synthetic) return p.instance->evaluator(rng);
  const bench::PlantSpec plant = b.plant;
  const bench::PerformanceMap perf = p.performance;
  if (b.kind == io::BenchmarkKind::Step) {
    return [plant, perf, &rng](const Eigen::VectorXd& a, const Eigen::VectorXd&) {
      return bench::simulate_step(plant, a, perf, rng);
    };
  }
  const double nominal = b.reference_speed;
  return [plant, perf, nominal, &rng](const Eigen::VectorXd& a, const Eigen::VectorXd& z) {
    return bench::simulate_circle(plant, a, z.size() > 0 ? z[0] : nominal, perf, rng);
  };
}

struct SeedRun {
  std::uint64_t seed = 0;
  RunTrace trace;
  io::TraceShape shape;
  json summary;
  bool ok = true;
};

namespace detail {

inline void annotate_oracle_gap(RunTrace& trace, const Problem& p, double f_star) {
  for (auto& e : trace.entries) e.oracle_gap = f_star - p.instance->truth.f(e.best_point);
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

template <class Opt>
void run_safeopt_stages(const io::ExperimentConfig& c, Opt& opt, const Evaluator& evaluate) {
  const StopRule first{c.context ? c.context->schedule.front().iterations : c.iterations, c.width_threshold};
  opt.run(evaluate, first);
  if (!c.context) return;
  for (std::size_t k = 1; k < c.context->schedule.size(); ++k) {
    const auto& stage = c.context->schedule[k];
    std::optional<IndexSet> seed;
    if (!stage.seed_points.empty()) {
      seed = locate(opt.domain(), stage.seed_points, "context.schedule[" + std::to_string(k) + "].seed_points");
    }
    opt.set_context(stage.value, seed);
    opt.run(evaluate, StopRule{stage.iterations, c.width_threshold});
  }
}

}  // namespace detail

/// Runs one seed and returns its trace and JSON summary. Runtime failures
/// are recorded in both rather than thrown.
inline SeedRun run_seed(const io::ExperimentConfig& c, std::uint64_t seed) {
  SeedRun out;
  out.seed = seed;
  const Problem p = make_problem(c, seed);
  const int q1 = p.model.output_count();
  out.shape = {p.domain.dim(), c.context ? c.context->spec.dim() : 0, q1};

  std::mt19937_64 rng(derive_seed(seed, c.benchmark.kind == io::BenchmarkKind::Synthetic ? Stream::ModelNoise
                                                                                          : Stream::PlantNoise));
  const Evaluator evaluate = make_evaluator(c, p, rng);

  AlgoConfig algo;
  algo.mode = c.algorithm.mode;
  algo.lipschitz = p.lipschitz;
  algo.epsilon = c.algorithm.epsilon;
  algo.beta = c.algorithm.beta;
  algo.scale_by_prior_std = c.algorithm.scale_by_prior_std;
  algo.intervals = c.algorithm.intervals;

  std::size_t final_point = 0;
  Eigen::VectorXd final_context;
  double final_lower = 0.0;
  try {
    if (c.algorithm.optimizer == io::OptimizerKind::Ucb) {
      UcbOptimizer<SurrogateKernel> opt(p.domain, SurrogateKernel(p.model), algo.beta);
      try {
        opt.run(evaluate, c.iterations);
      } catch (...) {
        out.trace = opt.trace();
        throw;
      }
      out.trace = opt.trace();
      final_point = opt.best_estimate();
    } else if (c.context) {
      ContextualKernel kernel(p.model, c.context->spec);
      SafeOptimizer<ContextualKernel> opt(p.domain, kernel, p.seed, algo, c.context->schedule.front().value);
      try {
        detail::run_safeopt_stages(c, opt, evaluate);
      } catch (...) {
        out.trace = opt.trace();
        throw;
      }
      out.trace = opt.trace();
      final_point = opt.best_estimate();
      final_lower = opt.confidence().l(final_point, 0);
      final_context = opt.context();
    } else {
      SafeOptimizer<SurrogateKernel> opt(p.domain, SurrogateKernel(p.model), p.seed, algo);
      try {
        detail::run_safeopt_stages(c, opt, evaluate);
      } catch (...) {
        out.trace = opt.trace();
        throw;
      }
      out.trace = opt.trace();
      final_point = opt.best_estimate();
      final_lower = opt.confidence().l(final_point, 0);
    }
  } catch (const std::exception& e) {
    out.ok = false;
    if (out.trace.failure.empty()) out.trace.failure = e.what();
    if (out.trace.stop == StopReason::None || out.trace.stop == StopReason::MaxIterations) {
      out.trace.stop = StopReason::EvaluatorFailure;
    }
  }

  json s;
  s["seed"] = seed;
  s["name"] = c.name;
  s["benchmark"] = io::to_string(c.benchmark.kind);
  s["optimizer"] = c.algorithm.optimizer == io::OptimizerKind::SafeOpt ? "safeopt" : "ucb";
  s["iterations"] = out.trace.size();
  s["stop"] = to_string(out.trace.stop);
  s["failure"] = out.trace.failure;
  std::size_t violations = 0;
  for (const auto& e : out.trace.entries) violations += e.violation ? 1 : 0;
  s["violations"] = violations;
  s["epsilon"] = c.algorithm.epsilon;
  if (out.ok) {
    s["final_best_point"] = final_point;
    s["final_best"] = detail::to_std(p.domain[final_point]);
    if (c.algorithm.optimizer == io::OptimizerKind::SafeOpt) s["final_best_lower"] = final_lower;
    if (final_context.size() > 0) s["final_context"] = detail::to_std(final_context);
  }
  if (p.instance) {
    const double f_star =
        oracle::baseline_optimum(p.seed, p.instance->truth, p.domain, p.lipschitz, c.algorithm.epsilon);
    detail::annotate_oracle_gap(out.trace, p, f_star);
    s["f_star"] = f_star;
    s["unsafe_fraction"] = p.instance->unsafe_fraction();
    if (out.ok) {
      s["final_f"] = p.instance->truth.f(final_point);
      s["oracle_gap"] = f_star - p.instance->truth.f(final_point);
    }
  } else {
    s["reference_cost"] = p.reference_cost;
    if (out.ok) {
      const double speed = final_context.size() > 0 ? final_context[0] : c.benchmark.reference_speed;
      const double cost = bench::noise_free_cost(c.benchmark.plant, p.domain[final_point], speed);
      s["final_cost"] = cost;
      if (final_context.size() == 0) s["improvement"] = 1.0 - cost / p.reference_cost;
    }
  }
  out.summary = s;
  return out;
}

inline void write_truth_table(std::ostream& out, const ParameterDomain& domain, const oracle::GroundTruth& truth) {
  out << "point";
  for (Eigen::Index k = 0; k < domain.dim(); ++k) out << ",a_" << k;
  out << ",f";
  for (int i = 1; i < truth.output_count(); ++i) out << ",g_" << i;
  out << '\n';
  for (std::size_t a = 0; a < domain.size(); ++a) {
    out << a;
    for (Eigen::Index k = 0; k < domain.dim(); ++k) out << ',' << io::format_double(domain[a][k]);
    for (int i = 0; i < truth.output_count(); ++i) out << ',' << io::format_double(truth.values(Eigen::Index(a), i));
    out << '\n';
  }
}

inline void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
  out << text;
}

/// Runs every configured seed and writes trace_seed<k>.csv,
/// summary_seed<k>.json (plus truth_seed<k>.csv for synthetic benchmarks)
/// and an aggregate summary.json into `out_dir`. Returns false when any
/// seed failed.
inline bool run_experiment(const io::ExperimentConfig& c, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  bool ok = true;
  json all = json::array();
  for (std::uint64_t seed : c.seeds) {
    SeedRun r = run_seed(c, seed);
    ok = ok && r.ok;
    std::ostringstream csv;
    io::write_trace(csv, r.trace, r.shape);
    const std::string tag = "seed" + std::to_string(seed);
    write_text(out_dir / ("trace_" + tag + ".csv"), csv.str());
    write_text(out_dir / ("summary_" + tag + ".json"), r.summary.dump(2) + "\n");
    if (c.benchmark.kind == io::BenchmarkKind::Synthetic) {
      const Problem p = make_problem(c, seed);
      std::ostringstream truth;
      write_truth_table(truth, p.domain, p.instance->truth);
      write_text(out_dir / ("truth_" + tag + ".csv"), truth.str());
    }
    all.push_back(r.summary);
  }
  json agg;
  agg["config"] = io::to_json(c);
  agg["runs"] = all;
  write_text(out_dir / "summary.json", agg.dump(2) + "\n");
  return ok;
}

/// Aggregate over every trace_seed*.csv in `dir`. Also writes growth.csv
/// (n, mean |S_n|, min, max) next to the traces.
inline json summarize(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  const std::regex pattern("trace_seed([0-9]+)\\.csv");
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (std::regex_match(entry.path().filename().string(), pattern)) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no traces in '" + dir.string() + "'");

  std::size_t violating = 0, failed = 0;
  std::vector<double> to_eps;
  std::size_t with_gap = 0;
  std::map<int, std::vector<double>> growth;
  for (const auto& f : files) {
    std::ifstream in(f);
    const RunTrace t = io::read_trace(in);
    violating += t.any_violation() ? 1 : 0;
    failed += t.failure.empty() ? 0 : 1;
    for (const auto& e : t.entries) growth[e.iteration].push_back(static_cast<double>(e.safe_size));

    fs::path summary = f;
    summary.replace_filename("summary_" + f.filename().string().substr(6));
    summary.replace_extension(".json");
    double eps = 0.0;
    if (fs::exists(summary)) {
      std::ifstream sin(summary);
      const json s = json::parse(sin);
      eps = s.value("epsilon", 0.0);
    }
    if (!t.entries.empty() && !std::isnan(t.entries.front().oracle_gap)) {
      ++with_gap;
      for (const auto& e : t.entries) {
        if (e.oracle_gap <= eps) {
          to_eps.push_back(e.iteration);
          break;
        }
      }
    }
  }

  std::ostringstream csv;
  csv << "n,mean_safe_size,min_safe_size,max_safe_size\n";
  for (const auto& [n, sizes] : growth) {
    double sum = 0.0;
    for (double s : sizes) sum += s;
    csv << n << ',' << io::format_double(sum / static_cast<double>(sizes.size())) << ','
        << io::format_double(*std::min_element(sizes.begin(), sizes.end())) << ','
        << io::format_double(*std::max_element(sizes.begin(), sizes.end())) << '\n';
  }
  write_text(dir / "growth.csv", csv.str());

  json r;
  r["runs"] = files.size();
  r["violating_runs"] = violating;
  r["violation_rate"] = static_cast<double>(violating) / static_cast<double>(files.size());
  r["failed_runs"] = failed;
  if (with_gap > 0) {
    r["runs_reaching_epsilon"] = to_eps.size();
    if (!to_eps.empty()) {
      std::sort(to_eps.begin(), to_eps.end());
      const std::size_t m = to_eps.size();
      r["median_iterations_to_epsilon"] = m % 2 ? to_eps[m / 2] : 0.5 * (to_eps[m / 2 - 1] + to_eps[m / 2]);
    } else {
      r["median_iterations_to_epsilon"] = nullptr;
    }
  }
  r["growth_csv"] = (dir / "growth.csv").string();
  return r;
}

/// Safely reachable baseline set and its optimum for each configured seed.
/// Only synthetic benchmarks have ground truth.
inline json oracle_report(const io::ExperimentConfig& c, const std::optional<fs::path>& out_dir = std::nullopt) {
  if (c.benchmark.kind != io::BenchmarkKind::Synthetic) {
    throw ConfigError("benchmark.kind", "oracles need a synthetic benchmark (no ground truth for plants)");
  }
  json runs = json::array();
  for (std::uint64_t seed : c.seeds) {
    const Problem p = make_problem(c, seed);
    const auto& truth = p.instance->truth;
    const IndexSet closure = oracle::reach_closure(p.seed, truth, p.domain, p.lipschitz, c.algorithm.epsilon);
    json s;
    s["seed"] = seed;
    s["epsilon"] = c.algorithm.epsilon;
    s["seed_points"] = p.seed;
    s["reachable"] = closure;
    s["reachable_size"] = closure.size();
    s["f_star"] = oracle::baseline_optimum(p.seed, truth, p.domain, p.lipschitz, c.algorithm.epsilon);
    s["lipschitz"] = p.lipschitz;
    s["unsafe_fraction"] = p.instance->unsafe_fraction();
    runs.push_back(s);
    if (out_dir) {
      fs::create_directories(*out_dir);
      std::ostringstream t;
      write_truth_table(t, p.domain, truth);
      write_text(*out_dir / ("truth_seed" + std::to_string(seed) + ".csv"), t.str());
    }
  }
  return runs;
}

}  // namespace safeopt_mc
