#include <gtest/gtest.h>

#include <cmath>

#include "safeopt_mc/kernel.hpp"

using namespace safeopt_mc;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

SurrogateKernelSpec two_outputs() {
  SurrogateKernelSpec s;
  s.per_output = {KernelSpec::matern32(2.0, vec({0.5})), KernelSpec::squared_exponential(0.5, vec({0.3}))};
  s.noise_std = {0.1, 0.05};
  return s;
}

}  // namespace

TEST(Kernel, MaternAtUnitScaledDistance) {
  const auto k = KernelSpec::matern32(1.0, vec({0.25}));
  const double expected = (1.0 + std::sqrt(3.0)) * std::exp(-std::sqrt(3.0));
  EXPECT_NEAR(kernel_eval(k, vec({1.0}), vec({1.25})), expected, 1e-15);
  EXPECT_NEAR(expected, 0.4834, 1e-3);
}

TEST(Kernel, SelfCovarianceIsPriorVariance) {
  const auto m = KernelSpec::matern32(0.7, vec({0.1, 0.2}));
  const auto se = KernelSpec::squared_exponential(0.7, vec({0.1, 0.2}));
  const auto x = vec({0.3, -1.0});
  EXPECT_DOUBLE_EQ(kernel_eval(m, x, x), 0.49);
  EXPECT_DOUBLE_EQ(kernel_eval(se, x, x), 0.49);
}

TEST(Kernel, SquaredExponentialForm) {
  const auto se = KernelSpec::squared_exponential(1.0, vec({2.0}));
  EXPECT_NEAR(kernel_eval(se, vec({0.0}), vec({2.0})), std::exp(-0.5), 1e-15);
}

TEST(Kernel, AnisotropicLengthscales) {
  const auto k = KernelSpec::squared_exponential(1.0, vec({1.0, 10.0}));
  EXPECT_NEAR(scaled_distance(k, vec({0.0, 0.0}), vec({0.0, 10.0})), 1.0, 1e-15);
  EXPECT_NEAR(scaled_distance(k, vec({0.0, 0.0}), vec({1.0, 0.0})), 1.0, 1e-15);
}

TEST(Kernel, DecaysWithDistance) {
  const auto k = KernelSpec::matern32(1.0, vec({0.3}));
  double prev = kernel_eval(k, vec({0.0}), vec({0.0}));
  for (double d = 0.1; d < 5.0; d += 0.1) {
    const double v = kernel_eval(k, vec({0.0}), vec({d}));
    EXPECT_LT(v, prev);
    EXPECT_GT(v, 0.0);
    prev = v;
  }
  EXPECT_LT(kernel_eval(k, vec({0.0}), vec({100.0})), 1e-100);
}

TEST(Kernel, DimensionMismatchThrows) {
  const auto k = KernelSpec::matern32(1.0, vec({0.3}));
  EXPECT_THROW(kernel_eval(k, vec({0.0, 1.0}), vec({0.0})), ContractViolation);
}

TEST(Kernel, InvalidHyperparametersRejected) {
  EXPECT_THROW(KernelSpec::matern32(0.0, vec({1.0})).validate(), ContractViolation);
  EXPECT_THROW(KernelSpec::matern32(1.0, vec({-1.0})).validate(), ContractViolation);
  EXPECT_THROW(kernel_family_from_string("rbf2"), ContractViolation);
  EXPECT_EQ(kernel_family_from_string("se"), KernelFamily::SquaredExponential);
}

TEST(SurrogateKernel, BlockDiagonalWithoutCrossTerms) {
  const SurrogateKernel k(two_outputs());
  EXPECT_DOUBLE_EQ(k(vec({0.1}), 0, vec({0.1}), 1), 0.0);
  EXPECT_DOUBLE_EQ(k(vec({0.1}), 0, vec({0.1}), 0), 4.0);
  EXPECT_DOUBLE_EQ(k(vec({0.1}), 1, vec({0.1}), 1), 0.25);
  EXPECT_DOUBLE_EQ(k.noise_variance(1), 0.0025);
  EXPECT_EQ(k.output_count(), 2);
}

TEST(SurrogateKernel, CrossTermIsSymmetric) {
  auto spec = two_outputs();
  spec.set_cross_term(1, 0, KernelSpec::squared_exponential(0.3, vec({0.4})));
  const SurrogateKernel k(spec);
  const auto a = vec({0.1}), b = vec({0.35});
  EXPECT_GT(k(a, 0, b, 1), 0.0);
  EXPECT_DOUBLE_EQ(k(a, 0, b, 1), k(b, 1, a, 0));
}

TEST(SurrogateKernel, ValidationErrors) {
  auto spec = two_outputs();
  spec.noise_std = {0.1};
  EXPECT_THROW(SurrogateKernel{spec}, ContractViolation);
  spec = two_outputs();
  spec.noise_std[1] = 0.0;
  EXPECT_THROW(SurrogateKernel{spec}, ContractViolation);
  spec = two_outputs();
  spec.per_output[1].lengthscales = vec({0.1, 0.2});
  EXPECT_THROW(SurrogateKernel{spec}, ContractViolation);
  const SurrogateKernel ok(two_outputs());
  EXPECT_THROW(ok(vec({0.0}), 2, vec({0.0}), 0), ContractViolation);
}
