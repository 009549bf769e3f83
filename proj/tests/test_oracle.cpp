#include <gtest/gtest.h>

#include "safeopt_mc/bench/synthetic.hpp"
#include "safeopt_mc/oracle.hpp"

using namespace safeopt_mc;

namespace {

ParameterDomain line(int n) {
  return ParameterDomain::grid(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, static_cast<double>(n - 1)),
                               {n});
}

oracle::GroundTruth table(std::initializer_list<double> f, std::initializer_list<double> g) {
  oracle::GroundTruth t;
  t.values.resize(static_cast<Eigen::Index>(f.size()), 2);
  Eigen::Index r = 0;
  for (double v : f) t.values(r++, 0) = v;
  r = 0;
  for (double v : g) t.values(r++, 1) = v;
  return t;
}

}  // namespace

TEST(Reach, OneStepUsesOnlyTheCurrentSet) {
  // g = 2 at the seed, L = 1, eps = 0.5: reach covers distance 1.5.
  const auto truth = table({0, 0, 0, 0, 0}, {0.1, 0.1, 2.0, 0.1, 0.1});
  const std::vector<double> L{0.0, 1.0};
  EXPECT_EQ(oracle::reach_operator({2}, truth, line(5), L, 0.5), (IndexSet{1, 2, 3}));
}

TEST(Reach, ClosureIsFixedPoint) {
  const auto truth = table({1, 2, 3, 4, 5, 6}, {3.0, 3.0, 3.0, 3.0, -1.0, 3.0});
  const std::vector<double> L{0.0, 1.0};
  const auto d = line(6);
  const auto closure = oracle::reach_closure({0}, truth, d, L, 0.0);
  // Point 4 is reachable (g_3 - L*1 >= 0) but cannot certify point 5 on its own;
  // point 3 does certify point 5 at distance 2.
  EXPECT_EQ(closure, (IndexSet{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(oracle::reach_operator(closure, truth, d, L, 0.0), closure);
  EXPECT_DOUBLE_EQ(oracle::baseline_optimum({0}, truth, d, L, 0.0), 6.0);
  // A large epsilon shrinks the reachable set.
  EXPECT_EQ(oracle::reach_closure({0}, truth, d, L, 2.5), (IndexSet{0}));
  EXPECT_DOUBLE_EQ(oracle::baseline_optimum({0}, truth, d, L, 2.5), 1.0);
}

TEST(Reach, EveryConstraintMustCertify) {
  oracle::GroundTruth t;
  t.values.resize(3, 3);
  t.values << 0, 2, 0.5, 0, 2, 0.5, 0, 2, 0.5;
  const std::vector<double> L{0.0, 1.0, 1.0};
  EXPECT_EQ(oracle::reach_closure({0}, t, line(3), L, 0.0), (IndexSet{0}));
  EXPECT_THROW(oracle::reach_closure({}, t, line(3), L, 0.0), ContractViolation);
}

TEST(Reach, ClosureNeverLeavesTheSafeRegionWithValidLipschitz) {
  SurrogateKernelSpec gen;
  gen.per_output = {KernelSpec::squared_exponential(1.0, Eigen::VectorXd::Constant(1, 0.2)),
                    KernelSpec::squared_exponential(1.0, Eigen::VectorXd::Constant(1, 0.2))};
  gen.noise_std = {0.01, 0.01};
  const auto d = ParameterDomain::grid(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1), {60});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = bench::sample_synthetic(seed, gen, d, 0.4);
    const auto closure = oracle::reach_closure({inst.safest_point()}, inst.truth, d, inst.lipschitz, 0.0);
    for (std::size_t a : closure) EXPECT_TRUE(inst.truth.safe(a)) << "seed " << seed << " point " << a;
  }
}

TEST(GroundTruth, Validate) {
  auto t = table({0, 0}, {1, 1});
  EXPECT_THROW(t.validate(line(3)), ContractViolation);
  t.values(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(t.validate(line(2)), ContractViolation);
}
