#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "safeopt_mc/optimizer.hpp"

using namespace safeopt_mc;

namespace {

Eigen::VectorXd vec1(double x) { return Eigen::VectorXd::Constant(1, x); }

// f peaks at 0.7, g is safe on [0.2, 0.8].
double f_true(double x) { return std::exp(-20.0 * (x - 0.7) * (x - 0.7)); }
double g_true(double x) { return 0.3 - 3.0 * (x - 0.5) * (x - 0.5); }

ParameterDomain unit_line(int n) { return ParameterDomain::grid(vec1(0.0), vec1(1.0), {n}); }

SurrogateKernel toy_kernel() {
  SurrogateKernelSpec s;
  s.per_output = {KernelSpec::squared_exponential(1.0, vec1(0.2)), KernelSpec::squared_exponential(0.5, vec1(0.2))};
  s.noise_std = {0.01, 0.01};
  return SurrogateKernel(s);
}

Evaluator toy_evaluator() {
  return [](const Eigen::VectorXd& a, const Eigen::VectorXd&) {
    EvaluationResult r;
    r.truth = {f_true(a[0]), g_true(a[0])};
    r.observed = r.truth;
    return r;
  };
}

AlgoConfig lipschitz_config() {
  AlgoConfig c;
  c.mode = SafeSetMode::Lipschitz;
  c.lipschitz = {0.0, 1.8};
  c.beta = BetaSchedule::constant(2.0);
  return c;
}

}  // namespace

TEST(SafeOptimizer, StaysSafeAndFindsTheOptimum) {
  const auto d = unit_line(41);
  SafeOptimizer<SurrogateKernel> opt(d, toy_kernel(), {20}, lipschitz_config());
  IndexSet previous = opt.seed();
  for (int k = 0; k < 25; ++k) {
    const TraceEntry e = opt.step(toy_evaluator());
    EXPECT_FALSE(e.violation) << "iteration " << e.iteration;
    EXPECT_TRUE(is_subset(previous, opt.safe_set()));
    previous = opt.safe_set();
  }
  const std::size_t best = opt.best_estimate();
  EXPECT_GE(g_true(d[best][0]), 0.0);
  EXPECT_NEAR(d[best][0], 0.7, 0.051);
}

TEST(SafeOptimizer, GpDirectModeKeepsSeed) {
  auto cfg = lipschitz_config();
  cfg.mode = SafeSetMode::GPDirect;
  SafeOptimizer<SurrogateKernel> opt(unit_line(21), toy_kernel(), {10}, cfg);
  opt.prepare();
  EXPECT_EQ(opt.safe_set(), (IndexSet{10}));
  opt.run(toy_evaluator(), StopRule{10, 0.0});
  EXPECT_TRUE(is_subset(IndexSet{10}, opt.safe_set()));
  EXPECT_FALSE(opt.trace().any_violation());
}

TEST(SafeOptimizer, EvaluatorFailureIsRecordedAndExcluded) {
  SafeOptimizer<SurrogateKernel> opt(unit_line(11), toy_kernel(), {5}, lipschitz_config());
  const Evaluator broken = [](const Eigen::VectorXd&, const Eigen::VectorXd&) -> EvaluationResult {
    throw std::runtime_error("plant offline");
  };
  EXPECT_THROW(opt.run(broken, StopRule{5, 0.0}), std::runtime_error);
  ASSERT_EQ(opt.trace().size(), 1u);
  EXPECT_TRUE(opt.trace().entries[0].failed);
  EXPECT_TRUE(std::isnan(opt.trace().entries[0].observations[0]));
  EXPECT_EQ(opt.trace().stop, StopReason::EvaluatorFailure);
  EXPECT_EQ(opt.trace().failure, "plant offline");
  EXPECT_EQ(opt.evaluations(), 0);
  // The only safe point failed, so nothing is left to propose.
  EXPECT_THROW(opt.propose(), NoCandidatesError);
}

TEST(SafeOptimizer, WrongOutputCountIsRejected) {
  SafeOptimizer<SurrogateKernel> opt(unit_line(11), toy_kernel(), {5}, lipschitz_config());
  const Evaluator short_eval = [](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    EvaluationResult r;
    r.observed = {1.0};
    return r;
  };
  EXPECT_THROW(opt.step(short_eval), ContractViolation);
}

TEST(SafeOptimizer, WidthThresholdStopsTheRun) {
  SafeOptimizer<SurrogateKernel> opt(unit_line(11), toy_kernel(), {5}, lipschitz_config());
  const auto& t = opt.run(toy_evaluator(), StopRule{100, 1e6});
  EXPECT_EQ(t.stop, StopReason::WidthBelowThreshold);
  EXPECT_TRUE(t.entries.empty());
}

TEST(SafeOptimizer, HorizonRuleClampsIteration) {
  auto cfg = lipschitz_config();
  cfg.beta = BetaSchedule::union_bound(0.05, PiRule::Horizon, 2);
  SafeOptimizer<SurrogateKernel> opt(unit_line(11), toy_kernel(), {5}, cfg);
  const double b1 = opt.current_beta();
  opt.run(toy_evaluator(), StopRule{4, 0.0});
  EXPECT_DOUBLE_EQ(opt.current_beta(), b1);
}

TEST(SafeOptimizer, ConstructorValidation) {
  auto cfg = lipschitz_config();
  cfg.lipschitz = {0.0};
  EXPECT_THROW(SafeOptimizer<SurrogateKernel>(unit_line(5), toy_kernel(), {0}, cfg), ContractViolation);
  EXPECT_THROW(SafeOptimizer<SurrogateKernel>(unit_line(5), toy_kernel(), {}, lipschitz_config()),
               ContractViolation);
  EXPECT_THROW(SafeOptimizer<SurrogateKernel>(unit_line(5), toy_kernel(), {9}, lipschitz_config()),
               ContractViolation);
}

TEST(SafeOptimizer, ConfidenceIntervalsShrinkInContainedMode) {
  SafeOptimizer<SurrogateKernel> opt(unit_line(31), toy_kernel(), {15}, lipschitz_config());
  opt.prepare();
  ConfidenceState prev = opt.confidence();
  for (int k = 0; k < 15; ++k) {
    opt.step(toy_evaluator());
    opt.prepare();
    const auto& cur = opt.confidence();
    EXPECT_TRUE((cur.lower.array() >= prev.lower.array()).all());
    EXPECT_TRUE((cur.upper.array() <= prev.upper.array()).all());
    prev = cur;
  }
}
