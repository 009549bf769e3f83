#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "safeopt_mc/io/config.hpp"
#include "safeopt_mc/io/trace_csv.hpp"

using namespace safeopt_mc;
using namespace safeopt_mc::io;

namespace {

json synthetic_config() {
  return json::parse(R"({
    "schema_version": 1,
    "benchmark": {"kind": "synthetic", "generator": [
      {"kernel": {"family": "squared_exponential", "prior_std": 1.0, "lengthscales": [0.25]}, "noise_std": 0.01},
      {"kernel": {"family": "squared_exponential", "prior_std": 1.0, "lengthscales": [0.25]}, "noise_std": 0.01}]},
    "domain": {"lower": [0.0], "upper": [1.0], "counts": [20]},
    "outputs": [
      {"kernel": {"family": "squared_exponential", "prior_std": 1.0, "lengthscales": [0.25]}, "noise_std": 0.01},
      {"kernel": {"family": "squared_exponential", "prior_std": 1.0, "lengthscales": [0.25]}, "noise_std": 0.01}],
    "algorithm": {"mode": "lipschitz", "lipschitz": "empirical", "beta": {"mode": "union_bound"}},
    "seed_points": "safest",
    "seeds": {"first": 3, "count": 4}
  })");
}

std::string error_field(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST(Config, ParsesSyntheticExample) {
  const auto c = parse_config(synthetic_config());
  EXPECT_EQ(c.benchmark.kind, BenchmarkKind::Synthetic);
  EXPECT_TRUE(c.seed_safest);
  EXPECT_TRUE(c.algorithm.empirical_lipschitz);
  EXPECT_EQ(c.algorithm.beta.mode, BetaMode::UnionBound);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{3, 4, 5, 6}));
  EXPECT_EQ(c.iterations, 30);
}

TEST(Config, ResolvedConfigRoundTrips) {
  const auto c = parse_config(synthetic_config());
  const auto again = parse_config(to_json(c));
  EXPECT_EQ(to_json(c), to_json(again));
}

TEST(Config, ErrorsNameTheField) {
  auto j = synthetic_config();
  j["algorithm"]["lipschtz"] = 1.0;
  EXPECT_EQ(error_field(j), "algorithm.lipschtz");

  j = synthetic_config();
  j["schema_version"] = 2;
  EXPECT_EQ(error_field(j), "schema_version");

  j = synthetic_config();
  j["outputs"][1]["noise_std"] = -1.0;
  EXPECT_EQ(error_field(j), "outputs[1].noise_std");

  j = synthetic_config();
  j["outputs"][1]["kernel"]["family"] = "rbf2";
  EXPECT_EQ(error_field(j), "outputs[1].kernel.family");

  j = synthetic_config();
  j["outputs"].erase(1);
  EXPECT_EQ(error_field(j), "outputs");

  j = synthetic_config();
  j["benchmark"]["lag"] = 0.1;
  EXPECT_EQ(error_field(j), "benchmark.lag");

  j = synthetic_config();
  j["domain"]["counts"] = {20, 3};
  EXPECT_EQ(error_field(j), "domain");

  j = synthetic_config();
  j["algorithm"]["beta"]["delta"] = 1.5;
  EXPECT_EQ(error_field(j), "algorithm.beta.delta");
}

TEST(Config, ContextsNeedTheCircleBenchmark) {
  auto j = synthetic_config();
  j["context"] = json::parse(R"({"labels": ["speed"], "kernel": {"prior_std": 1.0, "lengthscales": [0.5]},
    "lower": [0.5], "upper": [2.0], "schedule": [{"value": [1.0], "iterations": 5}]})");
  EXPECT_EQ(error_field(j), "context");
  j["context"]["schedule"][0]["value"] = {3.0};
  EXPECT_EQ(error_field(j), "context.schedule[0].value");
}

TEST(Config, MissingFileIsAConfigError) { EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError); }

TEST(TraceCsv, DoublesRoundTripExactly) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, std::numeric_limits<double>::denorm_min()}) {
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_TRUE(std::isnan(parse_double(format_double(std::nan("")))));
  EXPECT_EQ(parse_double(format_double(-std::numeric_limits<double>::infinity())),
            -std::numeric_limits<double>::infinity());
  EXPECT_THROW(parse_double("1.0x"), ContractViolation);
}

TEST(TraceCsv, TraceRoundTrips) {
  RunTrace t;
  for (int k = 1; k <= 3; ++k) {
    TraceEntry e;
    e.iteration = k;
    e.point = static_cast<std::size_t>(10 + k);
    e.parameter = Eigen::Vector2d(0.1 * k, 1.0 / 3.0);
    e.context = Eigen::VectorXd::Constant(1, 1.25);
    e.output = k % 2;
    e.width = 0.7 / k;
    e.observations = {std::sin(k), std::cos(k)};
    e.safe_size = 5u + k;
    e.maximizer_size = 2;
    e.expander_size = 1;
    e.best_point = 4;
    e.best = Eigen::Vector2d(0.2, 0.4);
    e.best_lower = -0.125;
    e.misspecifications = 1;
    e.violation = k == 2;
    e.failed = false;
    e.oracle_gap = k == 3 ? std::nan("") : 0.01 * k;
    t.entries.push_back(e);
  }
  t.stop = StopReason::EvaluatorFailure;
  t.failure = "plant offline\nsecond line";
  const TraceShape shape{2, 1, 2};
  std::ostringstream out;
  write_trace(out, t, shape);
  std::istringstream in(out.str());
  TraceShape read_shape;
  RunTrace back = read_trace(in, &read_shape);
  EXPECT_EQ(read_shape.parameter_dim, 2);
  EXPECT_EQ(read_shape.context_dim, 1);
  EXPECT_EQ(read_shape.outputs, 2);
  EXPECT_EQ(back.failure, "plant offline second line");
  back.failure = t.failure;
  EXPECT_EQ(back, t);
  // Writing the parsed trace gives the same bytes.
  std::ostringstream again;
  t.failure = "plant offline second line";
  write_trace(again, back, shape);
  std::ostringstream first;
  write_trace(first, t, shape);
  EXPECT_EQ(again.str(), first.str());
}

TEST(TraceCsv, ShapeMismatchIsRejected) {
  RunTrace t;
  TraceEntry e;
  e.parameter = Eigen::VectorXd::Zero(1);
  e.best = Eigen::VectorXd::Zero(1);
  e.observations = {1.0};
  t.entries.push_back(e);
  std::ostringstream out;
  EXPECT_THROW(write_trace(out, t, TraceShape{1, 0, 2}), ContractViolation);
  std::istringstream bad("n,point\n");
  EXPECT_THROW(read_trace(bad), ContractViolation);
}
