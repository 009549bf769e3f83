#include <gtest/gtest.h>

#include <cmath>

#include "safeopt_mc/bench/plant.hpp"
#include "safeopt_mc/bench/synthetic.hpp"
#include "safeopt_mc/rng.hpp"

using namespace safeopt_mc;
using namespace safeopt_mc::bench;

namespace {

Eigen::VectorXd params(double tau, double zeta) {
  Eigen::VectorXd a(2);
  a << tau, zeta;
  return a;
}

SurrogateKernelSpec generator() {
  SurrogateKernelSpec s;
  s.per_output = {KernelSpec::squared_exponential(1.0, Eigen::VectorXd::Constant(1, 0.25)),
                  KernelSpec::squared_exponential(1.0, Eigen::VectorXd::Constant(1, 0.25))};
  s.noise_std = {0.01, 0.01};
  return s;
}

}  // namespace

TEST(Rng, DerivedSeedsDifferByStreamAndIndex) {
  EXPECT_NE(derive_seed(1, Stream::SyntheticDraw), derive_seed(1, Stream::ModelNoise));
  EXPECT_NE(derive_seed(1, Stream::PlantNoise, 0), derive_seed(1, Stream::PlantNoise, 1));
  EXPECT_NE(derive_seed(1, Stream::PlantNoise), derive_seed(2, Stream::PlantNoise));
  EXPECT_EQ(derive_seed(7, Stream::ModelNoise, 3), derive_seed(7, Stream::ModelNoise, 3));
  // Reference value of the splitmix64 finalizer.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Synthetic, SameSeedSameInstance) {
  const auto d = ParameterDomain::grid(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1), {40});
  const auto a = sample_synthetic(5, generator(), d, 0.4);
  const auto b = sample_synthetic(5, generator(), d, 0.4);
  const auto c = sample_synthetic(6, generator(), d, 0.4);
  EXPECT_EQ(a.truth.values, b.truth.values);
  EXPECT_NE(a.truth.values, c.truth.values);
}

TEST(Synthetic, UnsafeFractionAndLipschitz) {
  const auto d = ParameterDomain::grid(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1), {50});
  for (std::uint64_t seed = 1; seed < 6; ++seed) {
    const auto inst = sample_synthetic(seed, generator(), d, 0.4);
    EXPECT_NEAR(inst.unsafe_fraction(), 0.4, 1e-12);
    EXPECT_TRUE(inst.truth.safe(inst.safest_point()));
    EXPECT_DOUBLE_EQ(inst.offsets[0], 0.0);
    for (std::size_t a = 0; a + 1 < d.size(); ++a) {
      const double slope = std::abs(inst.truth.g(a + 1, 1) - inst.truth.g(a, 1)) / d.distance(a, a + 1);
      EXPECT_LE(slope, inst.lipschitz[1] + 1e-12);
    }
  }
}

TEST(Synthetic, NoiseIsCenteredOnTruth) {
  const auto d = ParameterDomain::grid(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1), {10});
  const auto inst = sample_synthetic(3, generator(), d, 0.0);
  std::mt19937_64 rng(1);
  double sum = 0.0;
  const int n = 4000;
  for (int k = 0; k < n; ++k) sum += inst.evaluate(4, rng).observed[1] - inst.truth.g(4, 1);
  EXPECT_NEAR(sum / n, 0.0, 4.0 * 0.01 / std::sqrt(n));
  EXPECT_THROW(inst.evaluate(10, rng), ContractViolation);
}

TEST(Plant, NoiseFreeRunsIgnoreTheRng) {
  PlantSpec s;
  s.position_noise = s.velocity_noise = s.disturbance = 0.0;
  std::mt19937_64 r1(1), r2(99);
  const auto a = simulate(s, 0.8, 0.7, 0.0, r1);
  const auto b = simulate(s, 0.8, 0.7, 0.0, r2);
  EXPECT_EQ(a.rmse, b.rmse);
  EXPECT_EQ(a.max_rate, b.max_rate);
}

TEST(Plant, SameSeedSameNoisyRun) {
  PlantSpec s;
  s.disturbance = 0.05;
  std::mt19937_64 r1(4), r2(4);
  const auto a = simulate(s, 0.8, 0.7, 0.0, r1);
  const auto b = simulate(s, 0.8, 0.7, 0.0, r2);
  EXPECT_EQ(a.rmse, b.rmse);
  EXPECT_EQ(a.max_rate, b.max_rate);
  EXPECT_NE(a.rmse, noise_free_cost(s, params(0.8, 0.7)));
}

TEST(Plant, CriticallyDampedWithoutLagDoesNotOvershoot) {
  PlantSpec s;
  s.lag = 0.0;
  s.position_noise = s.velocity_noise = 0.0;
  std::mt19937_64 rng(0);
  const auto r = simulate(s, 0.5, 1.0, 0.0, rng, true);
  ASSERT_EQ(static_cast<int>(r.positions.size()), s.samples);
  double peak = 0.0;
  for (const auto& p : r.positions) peak = std::max(peak, p[0]);
  EXPECT_LE(peak, s.step_size + 1e-9);
  EXPECT_NEAR(r.positions.back()[0], s.step_size, 1e-3);
  // The same loop with low damping overshoots.
  const auto u = simulate(s, 0.5, 0.3, 0.0, rng, true);
  double upeak = 0.0;
  for (const auto& p : u.positions) upeak = std::max(upeak, p[0]);
  EXPECT_GT(upeak, s.step_size * 1.2);
}

TEST(Plant, FasterLoopsTrackBetterButTiltFaster) {
  PlantSpec s;
  const double slow = noise_free_cost(s, params(0.9, 0.8));
  const double fast = noise_free_cost(s, params(0.6, 0.8));
  EXPECT_LT(fast, slow);
  s.position_noise = s.velocity_noise = 0.0;
  std::mt19937_64 rng(0);
  EXPECT_GT(simulate(s, 0.6, 0.8, 0.0, rng).max_rate, simulate(s, 0.9, 0.8, 0.0, rng).max_rate);
}

TEST(Plant, CircleTracksAndSpeedHurts) {
  PlantSpec s;
  s.reference = Reference::Circle;
  const double c1 = noise_free_cost(s, params(0.9, 0.8), 1.0);
  const double c2 = noise_free_cost(s, params(0.9, 0.8), 1.8);
  EXPECT_GT(c1, 0.0);
  EXPECT_LT(c1, s.rmse_limit);
  EXPECT_GT(c2, c1);
}

TEST(Plant, DivergenceSaturates) {
  PlantSpec s;
  s.lag = 0.3;
  s.position_noise = s.velocity_noise = 0.0;
  std::mt19937_64 rng(0);
  const auto r = simulate(s, 0.1, 0.05, 0.0, rng);
  EXPECT_TRUE(r.unstable);
  EXPECT_EQ(r.rmse, s.saturated_cost);
  EXPECT_EQ(r.max_rate, s.saturated_rate);
}

TEST(Plant, PerformanceMapSigns) {
  const PerformanceMap m{2.0, 0.75, PerformanceSign::Maximize};
  EXPECT_DOUBLE_EQ(m(1.0), 0.5);
  const PerformanceMap l{2.0, 0.75, PerformanceSign::Literal};
  EXPECT_DOUBLE_EQ(l(1.0), -0.5);
}

TEST(Plant, RejectsBadParameters) {
  PlantSpec s;
  std::mt19937_64 rng(0);
  EXPECT_THROW(simulate(s, -1.0, 0.5, 0.0, rng), ContractViolation);
  s.dt = 0.0;
  EXPECT_THROW(simulate(s, 1.0, 0.5, 0.0, rng), ContractViolation);
}
