#pragma once

#include <Eigen/Core>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "safeopt_mc/bench/plant.hpp"
#include "safeopt_mc/beta.hpp"
#include "safeopt_mc/contexts.hpp"
#include "safeopt_mc/errors.hpp"
#include "safeopt_mc/kernel.hpp"
#include "safeopt_mc/optimizer.hpp"

namespace safeopt_mc::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Model hyperparameters for one output.
struct OutputConfig {
  std::string name;
  KernelSpec kernel;
  double noise_std = 0.1;
  double prior_mean = 0.0;
  /// Plant benchmarks only: prior std and noise are fractions of C(a0).
  bool relative_to_reference_cost = false;
};

enum class BenchmarkKind { Step, Circle, Synthetic };

inline std::string to_string(BenchmarkKind k) {
  switch (k) {
    case BenchmarkKind::Step: return "step";
    case BenchmarkKind::Circle: return "circle";
    case BenchmarkKind::Synthetic: return "synthetic";
  }
  return "?";
}

struct BenchmarkConfig {
  BenchmarkKind kind = BenchmarkKind::Step;
  // Plant benchmarks.
  bench::PlantSpec plant;
  Eigen::VectorXd initial;  // a0
  double performance_fraction = 0.75;
  bench::PerformanceSign sign = bench::PerformanceSign::Maximize;
  double reference_speed = 1.0;  // circle speed used for C(a0) and non-contextual runs
  // Synthetic benchmark.
  std::vector<OutputConfig> generator;
  double unsafe_fraction = 0.4;
  /// Set each constraint's model prior mean to minus the instance offset,
  /// i.e. the prior the instance was actually drawn from.
  bool prior_mean_from_offset = true;
};

struct DomainConfig {
  Eigen::VectorXd lower, upper;
  std::vector<int> counts;
  Eigen::VectorXd metric_scales;  // empty: all ones
};

enum class OptimizerKind { SafeOpt, Ucb };

struct AlgorithmConfig {
  OptimizerKind optimizer = OptimizerKind::SafeOpt;
  SafeSetMode mode = SafeSetMode::GPDirect;
  std::vector<double> lipschitz;
  bool empirical_lipschitz = false;
  double epsilon = 0.0;
  BetaSchedule beta;
  bool scale_by_prior_std = true;
  std::optional<IntervalMode> intervals;
};

struct ContextStage {
  Eigen::VectorXd value;
  int iterations = 0;
  std::vector<Eigen::VectorXd> seed_points;  // empty: certified by the GP
};

struct ContextConfig {
  ContextSpec spec;
  std::vector<ContextStage> schedule;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string name = "experiment";
  BenchmarkConfig benchmark;
  DomainConfig domain;
  std::vector<OutputConfig> outputs;
  AlgorithmConfig algorithm;
  std::vector<Eigen::VectorXd> seed_points;
  bool seed_safest = false;  // synthetic only: seed at argmax_a min_i g_i(a)
  std::vector<std::uint64_t> seeds{0};
  int iterations = 30;
  double width_threshold = 0.0;
  std::optional<ContextConfig> context;
  std::string output_dir = "out";
};

namespace detail {

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) {
      throw ConfigError(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
    }
  }
}

inline std::string path(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

template <class T>
T get(const json& j, const std::string& where, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path(where, key), e.what());
  }
}

template <class T>
T require(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) throw ConfigError(path(where, key), "missing required field");
  return get<T>(j, where, key, T{});
}

inline Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> from_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

inline Eigen::VectorXd vector_field(const json& j, const std::string& where, const char* key) {
  return to_vector(require<std::vector<double>>(j, where, key));
}

inline std::vector<Eigen::VectorXd> points_field(const json& j, const std::string& where, const char* key) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& p : get<std::vector<std::vector<double>>>(j, where, key, {})) out.push_back(to_vector(p));
  return out;
}

inline KernelSpec parse_kernel(const json& j, const std::string& where) {
  check_keys(j, where, {"family", "prior_std", "lengthscales"});
  KernelSpec k;
  try {
    k.family = kernel_family_from_string(get<std::string>(j, where, "family", "matern32"));
  } catch (const ContractViolation& e) {
    throw ConfigError(path(where, "family"), e.what());
  }
  const double s = require<double>(j, where, "prior_std");
  k.prior_variance = s * s;
  k.lengthscales = vector_field(j, where, "lengthscales");
  try {
    k.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(where, e.what());
  }
  return k;
}

inline json kernel_json(const KernelSpec& k) {
  return {{"family", to_string(k.family)}, {"prior_std", k.prior_std()}, {"lengthscales", from_vector(k.lengthscales)}};
}

inline std::vector<OutputConfig> parse_outputs(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where, "expected a non-empty array");
  std::vector<OutputConfig> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    const json& o = j[i];
    check_keys(o, w, {"name", "kernel", "noise_std", "prior_mean", "relative_to_reference_cost"});
    OutputConfig c;
    c.name = get<std::string>(o, w, "name", i == 0 ? "performance" : "constraint" + std::to_string(i));
    if (!o.contains("kernel")) throw ConfigError(path(w, "kernel"), "missing required field");
    c.kernel = parse_kernel(o["kernel"], path(w, "kernel"));
    c.noise_std = require<double>(o, w, "noise_std");
    if (!(c.noise_std > 0.0)) throw ConfigError(path(w, "noise_std"), "must be positive");
    c.prior_mean = get<double>(o, w, "prior_mean", 0.0);
    c.relative_to_reference_cost = get<bool>(o, w, "relative_to_reference_cost", false);
    out.push_back(c);
  }
  return out;
}

inline json outputs_json(const std::vector<OutputConfig>& outs) {
  json a = json::array();
  for (const auto& o : outs) {
    a.push_back({{"name", o.name},
                 {"kernel", kernel_json(o.kernel)},
                 {"noise_std", o.noise_std},
                 {"prior_mean", o.prior_mean},
                 {"relative_to_reference_cost", o.relative_to_reference_cost}});
  }
  return a;
}

inline std::vector<std::vector<double>> points_json(const std::vector<Eigen::VectorXd>& pts) {
  std::vector<std::vector<double>> out;
  for (const auto& p : pts) out.push_back(from_vector(p));
  return out;
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& root) {
  using namespace detail;
  check_keys(root, "", {"schema_version", "name", "benchmark", "domain", "outputs", "algorithm", "seed_points",
                        "seeds", "iterations", "width_threshold", "context", "output_dir"});
  ExperimentConfig c;
  c.schema_version = require<int>(root, "", "schema_version");
  if (c.schema_version != kSchemaVersion) {
    throw ConfigError("schema_version", "unsupported version " + std::to_string(c.schema_version));
  }
  c.name = get<std::string>(root, "", "name", c.name);
  c.output_dir = get<std::string>(root, "", "output_dir", c.output_dir);
  c.iterations = get<int>(root, "", "iterations", c.iterations);
  if (c.iterations < 0) throw ConfigError("iterations", "must be >= 0");
  c.width_threshold = get<double>(root, "", "width_threshold", 0.0);

  // Benchmark.
  if (!root.contains("benchmark")) throw ConfigError("benchmark", "missing required field");
  const json& b = root["benchmark"];
  check_keys(b, "benchmark", {"kind", "lag", "position_noise", "velocity_noise", "disturbance", "substeps", "initial",
                              "performance_fraction", "performance_sign", "reference_speed", "radius",
                              "circle_duration", "rate_limit", "rmse_limit", "generator", "unsafe_fraction",
                              "prior_mean_from_offset"});
  const std::string kind = require<std::string>(b, "benchmark", "kind");
  if (kind == "step") {
    c.benchmark.kind = BenchmarkKind::Step;
  } else if (kind == "circle") {
    c.benchmark.kind = BenchmarkKind::Circle;
  } else if (kind == "synthetic") {
    c.benchmark.kind = BenchmarkKind::Synthetic;
  } else {
    throw ConfigError("benchmark.kind", "expected step, circle or synthetic, got '" + kind + "'");
  }
  auto& bc = c.benchmark;
  if (bc.kind == BenchmarkKind::Synthetic) {
    for (const char* k : {"lag", "position_noise", "velocity_noise", "disturbance", "substeps", "initial", "performance_fraction",
                          "performance_sign", "reference_speed", "radius", "circle_duration", "rate_limit",
                          "rmse_limit"}) {
      if (b.contains(k)) throw ConfigError(path("benchmark", k), "not used by the synthetic benchmark");
    }
    if (!b.contains("generator")) throw ConfigError("benchmark.generator", "missing required field");
    bc.generator = parse_outputs(b["generator"], "benchmark.generator");
    bc.unsafe_fraction = get<double>(b, "benchmark", "unsafe_fraction", bc.unsafe_fraction);
    if (!(bc.unsafe_fraction >= 0.0 && bc.unsafe_fraction < 1.0)) {
      throw ConfigError("benchmark.unsafe_fraction", "must lie in [0, 1)");
    }
    bc.prior_mean_from_offset = get<bool>(b, "benchmark", "prior_mean_from_offset", true);
  } else {
    for (const char* k : {"generator", "unsafe_fraction", "prior_mean_from_offset"}) {
      if (b.contains(k)) throw ConfigError(path("benchmark", k), "only used by the synthetic benchmark");
    }
    bc.plant.reference = bc.kind == BenchmarkKind::Step ? bench::Reference::Step : bench::Reference::Circle;
    bc.plant.lag = get<double>(b, "benchmark", "lag", bc.plant.lag);
    bc.plant.position_noise = get<double>(b, "benchmark", "position_noise", bc.plant.position_noise);
    bc.plant.velocity_noise = get<double>(b, "benchmark", "velocity_noise", bc.plant.velocity_noise);
    bc.plant.disturbance = get<double>(b, "benchmark", "disturbance", bc.plant.disturbance);
    bc.plant.substeps = get<int>(b, "benchmark", "substeps", bc.plant.substeps);
    bc.plant.radius = get<double>(b, "benchmark", "radius", bc.plant.radius);
    bc.plant.circle_duration = get<double>(b, "benchmark", "circle_duration", bc.plant.circle_duration);
    bc.plant.rate_limit = get<double>(b, "benchmark", "rate_limit", bc.plant.rate_limit);
    bc.plant.rmse_limit = get<double>(b, "benchmark", "rmse_limit", bc.plant.rmse_limit);
    try {
      bc.plant.validate();
    } catch (const ContractViolation& e) {
      throw ConfigError("benchmark", e.what());
    }
    bc.initial = vector_field(b, "benchmark", "initial");
    if (bc.initial.size() != 2) throw ConfigError("benchmark.initial", "plant parameters are (tau, zeta)");
    bc.performance_fraction = get<double>(b, "benchmark", "performance_fraction", bc.performance_fraction);
    const std::string sign = get<std::string>(b, "benchmark", "performance_sign", "maximize");
    if (sign == "maximize") {
      bc.sign = bench::PerformanceSign::Maximize;
    } else if (sign == "literal") {
      bc.sign = bench::PerformanceSign::Literal;
    } else {
      throw ConfigError("benchmark.performance_sign", "expected maximize or literal");
    }
    bc.reference_speed = get<double>(b, "benchmark", "reference_speed", bc.reference_speed);
  }

  // Domain.
  if (!root.contains("domain")) throw ConfigError("domain", "missing required field");
  const json& d = root["domain"];
  check_keys(d, "domain", {"lower", "upper", "counts", "metric_scales"});
  c.domain.lower = vector_field(d, "domain", "lower");
  c.domain.upper = vector_field(d, "domain", "upper");
  c.domain.counts = require<std::vector<int>>(d, "domain", "counts");
  c.domain.metric_scales = detail::to_vector(get<std::vector<double>>(d, "domain", "metric_scales", {}));
  if (c.domain.upper.size() != c.domain.lower.size() ||
      static_cast<Eigen::Index>(c.domain.counts.size()) != c.domain.lower.size()) {
    throw ConfigError("domain", "lower, upper and counts must have the same length");
  }
  for (int n : c.domain.counts) {
    if (n < 1) throw ConfigError("domain.counts", "counts must be >= 1");
  }

  // Outputs.
  if (!root.contains("outputs")) throw ConfigError("outputs", "missing required field");
  c.outputs = parse_outputs(root["outputs"], "outputs");
  const std::size_t expected_outputs = bc.kind == BenchmarkKind::Step     ? 2
                                       : bc.kind == BenchmarkKind::Circle ? 3
                                                                          : bc.generator.size();
  if (c.outputs.size() != expected_outputs) {
    throw ConfigError("outputs", "benchmark produces " + std::to_string(expected_outputs) + " outputs, got " +
                                     std::to_string(c.outputs.size()));
  }
  for (std::size_t i = 0; i < c.outputs.size(); ++i) {
    if (c.outputs[i].kernel.dim() != c.domain.lower.size()) {
      throw ConfigError("outputs[" + std::to_string(i) + "].kernel.lengthscales", "must match the domain dimension");
    }
  }
  for (std::size_t i = 0; i < bc.generator.size(); ++i) {
    if (bc.generator[i].kernel.dim() != c.domain.lower.size()) {
      throw ConfigError("benchmark.generator[" + std::to_string(i) + "].kernel.lengthscales",
                        "must match the domain dimension");
    }
  }

  // Algorithm.
  if (!root.contains("algorithm")) throw ConfigError("algorithm", "missing required field");
  const json& a = root["algorithm"];
  check_keys(a, "algorithm",
             {"optimizer", "mode", "lipschitz", "epsilon", "beta", "scale_by_prior_std", "interval_mode"});
  auto& ac = c.algorithm;
  const std::string opt = get<std::string>(a, "algorithm", "optimizer", "safeopt");
  if (opt == "safeopt") {
    ac.optimizer = OptimizerKind::SafeOpt;
  } else if (opt == "ucb") {
    ac.optimizer = OptimizerKind::Ucb;
  } else {
    throw ConfigError("algorithm.optimizer", "expected safeopt or ucb");
  }
  const std::string mode = get<std::string>(a, "algorithm", "mode", "gp_direct");
  if (mode == "gp_direct") {
    ac.mode = SafeSetMode::GPDirect;
  } else if (mode == "lipschitz") {
    ac.mode = SafeSetMode::Lipschitz;
  } else {
    throw ConfigError("algorithm.mode", "expected gp_direct or lipschitz");
  }
  if (a.contains("lipschitz") && a["lipschitz"].is_string()) {
    if (a["lipschitz"].get<std::string>() != "empirical" || bc.kind != BenchmarkKind::Synthetic) {
      throw ConfigError("algorithm.lipschitz", "'empirical' is the only string value and needs a synthetic benchmark");
    }
    ac.empirical_lipschitz = true;
  } else {
    ac.lipschitz = require<std::vector<double>>(a, "algorithm", "lipschitz");
    if (ac.lipschitz.size() != c.outputs.size()) {
      throw ConfigError("algorithm.lipschitz", "need one constant per output (entry 0 is unused)");
    }
    for (std::size_t i = 1; i < ac.lipschitz.size(); ++i) {
      if (!(ac.lipschitz[i] > 0.0)) throw ConfigError("algorithm.lipschitz", "constants must be positive");
    }
  }
  ac.epsilon = get<double>(a, "algorithm", "epsilon", 0.0);
  if (!(ac.epsilon >= 0.0)) throw ConfigError("algorithm.epsilon", "must be >= 0");
  ac.scale_by_prior_std = get<bool>(a, "algorithm", "scale_by_prior_std", true);
  if (a.contains("interval_mode")) {
    const std::string im = get<std::string>(a, "algorithm", "interval_mode", "");
    if (im == "contained") {
      ac.intervals = IntervalMode::Contained;
    } else if (im == "direct") {
      ac.intervals = IntervalMode::Direct;
    } else {
      throw ConfigError("algorithm.interval_mode", "expected contained or direct");
    }
  }
  if (!a.contains("beta")) throw ConfigError("algorithm.beta", "missing required field");
  const json& be = a["beta"];
  check_keys(be, "algorithm.beta", {"mode", "sqrt_beta", "delta", "pi_rule", "horizon"});
  const std::string bm = require<std::string>(be, "algorithm.beta", "mode");
  if (bm == "constant") {
    ac.beta = BetaSchedule::constant(require<double>(be, "algorithm.beta", "sqrt_beta"));
    if (!(ac.beta.sqrt_beta > 0.0)) throw ConfigError("algorithm.beta.sqrt_beta", "must be positive");
  } else if (bm == "union_bound") {
    const double delta = get<double>(be, "algorithm.beta", "delta", 0.05);
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("algorithm.beta.delta", "must lie in (0, 1)");
    const std::string rule = get<std::string>(be, "algorithm.beta", "pi_rule", "basel");
    PiRule pr = PiRule::Basel;
    if (rule == "horizon") {
      pr = PiRule::Horizon;
    } else if (rule != "basel") {
      throw ConfigError("algorithm.beta.pi_rule", "expected basel or horizon");
    }
    ac.beta = BetaSchedule::union_bound(delta, pr, get<int>(be, "algorithm.beta", "horizon", c.iterations));
  } else {
    throw ConfigError("algorithm.beta.mode", "expected constant or union_bound");
  }

  // Seeds and initial safe set.
  if (root.contains("seed_points") && root["seed_points"].is_string()) {
    if (root["seed_points"].get<std::string>() != "safest" || bc.kind != BenchmarkKind::Synthetic) {
      throw ConfigError("seed_points", "'safest' is the only string value and needs a synthetic benchmark");
    }
    c.seed_safest = true;
  } else {
    c.seed_points = points_field(root, "", "seed_points");
    if (c.seed_points.empty() && bc.kind != BenchmarkKind::Synthetic) c.seed_points.push_back(bc.initial);
    if (c.seed_points.empty()) throw ConfigError("seed_points", "an initial safe set is required");
  }
  if (root.contains("seeds")) {
    const json& s = root["seeds"];
    if (s.is_array()) {
      c.seeds = get<std::vector<std::uint64_t>>(root, "", "seeds", {});
    } else {
      check_keys(s, "seeds", {"first", "count"});
      const auto first = get<std::uint64_t>(s, "seeds", "first", 0);
      const auto count = require<std::uint64_t>(s, "seeds", "count");
      c.seeds.clear();
      for (std::uint64_t k = 0; k < count; ++k) c.seeds.push_back(first + k);
    }
    if (c.seeds.empty()) throw ConfigError("seeds", "need at least one seed");
  }

  // Context.
  if (root.contains("context")) {
    const json& x = root["context"];
    check_keys(x, "context", {"labels", "units", "kernel", "lower", "upper", "schedule"});
    ContextConfig cc;
    cc.spec.labels = require<std::vector<std::string>>(x, "context", "labels");
    cc.spec.units = get<std::vector<std::string>>(x, "context", "units", std::vector<std::string>(cc.spec.labels.size()));
    if (!x.contains("kernel")) throw ConfigError("context.kernel", "missing required field");
    cc.spec.kernel = parse_kernel(x["kernel"], "context.kernel");
    cc.spec.lower = vector_field(x, "context", "lower");
    cc.spec.upper = vector_field(x, "context", "upper");
    try {
      cc.spec.validate();
    } catch (const ContractViolation& e) {
      throw ConfigError("context", e.what());
    }
    if (!x.contains("schedule") || !x["schedule"].is_array() || x["schedule"].empty()) {
      throw ConfigError("context.schedule", "need a non-empty list of stages");
    }
    for (std::size_t k = 0; k < x["schedule"].size(); ++k) {
      const std::string w = "context.schedule[" + std::to_string(k) + "]";
      const json& st = x["schedule"][k];
      check_keys(st, w, {"value", "iterations", "seed_points"});
      ContextStage stage;
      stage.value = vector_field(st, w, "value");
      if (!cc.spec.contains(stage.value)) throw ConfigError(path(w, "value"), "outside the declared context bounds");
      stage.iterations = require<int>(st, w, "iterations");
      if (stage.iterations < 0) throw ConfigError(path(w, "iterations"), "must be >= 0");
      stage.seed_points = points_field(st, w, "seed_points");
      cc.schedule.push_back(stage);
    }
    if (bc.kind != BenchmarkKind::Circle) throw ConfigError("context", "contexts are supported for the circle benchmark");
    if (cc.spec.dim() != 1) throw ConfigError("context.kernel", "the circle benchmark has one context (speed)");
    if (ac.optimizer != OptimizerKind::SafeOpt) throw ConfigError("context", "contexts need the safeopt optimizer");
    c.context = cc;
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("<file>", "cannot open '" + file + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

/// Fully resolved configuration, defaults included.
inline json to_json(const ExperimentConfig& c) {
  using namespace detail;
  json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  const auto& bc = c.benchmark;
  json b;
  b["kind"] = to_string(bc.kind);
  if (bc.kind == BenchmarkKind::Synthetic) {
    b["generator"] = outputs_json(bc.generator);
    b["unsafe_fraction"] = bc.unsafe_fraction;
    b["prior_mean_from_offset"] = bc.prior_mean_from_offset;
  } else {
    b["lag"] = bc.plant.lag;
    b["position_noise"] = bc.plant.position_noise;
    b["velocity_noise"] = bc.plant.velocity_noise;
    b["disturbance"] = bc.plant.disturbance;
    b["substeps"] = bc.plant.substeps;
    b["radius"] = bc.plant.radius;
    b["circle_duration"] = bc.plant.circle_duration;
    b["rate_limit"] = bc.plant.rate_limit;
    b["rmse_limit"] = bc.plant.rmse_limit;
    b["initial"] = from_vector(bc.initial);
    b["performance_fraction"] = bc.performance_fraction;
    b["performance_sign"] = bc.sign == bench::PerformanceSign::Maximize ? "maximize" : "literal";
    b["reference_speed"] = bc.reference_speed;
  }
  j["benchmark"] = b;
  j["domain"] = {{"lower", from_vector(c.domain.lower)}, {"upper", from_vector(c.domain.upper)},
                 {"counts", c.domain.counts}};
  if (c.domain.metric_scales.size() > 0) j["domain"]["metric_scales"] = from_vector(c.domain.metric_scales);
  j["outputs"] = outputs_json(c.outputs);
  const auto& ac = c.algorithm;
  json a;
  a["optimizer"] = ac.optimizer == OptimizerKind::SafeOpt ? "safeopt" : "ucb";
  a["mode"] = ac.mode == SafeSetMode::GPDirect ? "gp_direct" : "lipschitz";
  if (ac.empirical_lipschitz) {
    a["lipschitz"] = "empirical";
  } else {
    a["lipschitz"] = ac.lipschitz;
  }
  a["epsilon"] = ac.epsilon;
  a["scale_by_prior_std"] = ac.scale_by_prior_std;
  if (ac.intervals) a["interval_mode"] = *ac.intervals == IntervalMode::Contained ? "contained" : "direct";
  if (ac.beta.mode == BetaMode::Constant) {
    a["beta"] = {{"mode", "constant"}, {"sqrt_beta", ac.beta.sqrt_beta}};
  } else {
    a["beta"] = {{"mode", "union_bound"},
                 {"delta", ac.beta.delta},
                 {"pi_rule", ac.beta.pi_rule == PiRule::Basel ? "basel" : "horizon"},
                 {"horizon", ac.beta.horizon}};
  }
  j["algorithm"] = a;
  if (c.seed_safest) {
    j["seed_points"] = "safest";
  } else {
    j["seed_points"] = points_json(c.seed_points);
  }
  j["seeds"] = c.seeds;
  j["iterations"] = c.iterations;
  j["width_threshold"] = c.width_threshold;
  if (c.context) {
    const auto& cc = *c.context;
    json x;
    x["labels"] = cc.spec.labels;
    x["units"] = cc.spec.units;
    x["kernel"] = kernel_json(cc.spec.kernel);
    x["lower"] = from_vector(cc.spec.lower);
    x["upper"] = from_vector(cc.spec.upper);
    x["schedule"] = json::array();
    for (const auto& st : cc.schedule) {
      json s{{"value", from_vector(st.value)}, {"iterations", st.iterations}};
      if (!st.seed_points.empty()) s["seed_points"] = points_json(st.seed_points);
      x["schedule"].push_back(s);
    }
    j["context"] = x;
  }
  j["output_dir"] = c.output_dir;
  return j;
}

}  // namespace safeopt_mc::io
