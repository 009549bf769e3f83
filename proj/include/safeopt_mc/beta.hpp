#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include "safeopt_mc/errors.hpp"

namespace safeopt_mc {

enum class BetaMode { UnionBound, Constant };

/// How the union-bound weights pi_n (with sum of 1/pi_n equal to one) grow.
enum class PiRule {
  Basel,    ///< pi_n = n^2 pi^2 / 6
  Horizon,  ///< pi_n = T_max for n <= T_max
};

struct BetaSchedule {
  BetaMode mode = BetaMode::Constant;
  double sqrt_beta = 2.0;
  double delta = 0.05;
  PiRule pi_rule = PiRule::Basel;
  int horizon = 0;

  static BetaSchedule constant(double sqrt_beta) {
    BetaSchedule s;
    s.mode = BetaMode::Constant;
    s.sqrt_beta = sqrt_beta;
    return s;
  }

  static BetaSchedule union_bound(double delta, PiRule rule = PiRule::Basel, int horizon = 0) {
    BetaSchedule s;
    s.mode = BetaMode::UnionBound;
    s.delta = delta;
    s.pi_rule = rule;
    s.horizon = horizon;
    return s;
  }
};

/// Confidence scaling beta_n for iteration n >= 1.
///
/// Union-bound mode: beta_n = 2 log(|I| |A| pi_n / delta), which makes every
/// interval mu +- beta_n^(1/2) sigma hold jointly with probability 1 - delta
/// when the surrogate is a GP sample.
inline double beta(const BetaSchedule& schedule, int n, std::size_t domain_size, std::size_t output_count) {
  if (n < 1) throw ContractViolation("beta: iteration must be >= 1");
  if (schedule.mode == BetaMode::Constant) {
    if (!(schedule.sqrt_beta > 0.0)) throw ContractViolation("beta: constant sqrt(beta) must be positive");
    return schedule.sqrt_beta * schedule.sqrt_beta;
  }
  if (!(schedule.delta > 0.0 && schedule.delta < 1.0)) {
    throw ContractViolation("beta: delta must lie in (0, 1)");
  }
  if (domain_size == 0 || output_count == 0) throw ContractViolation("beta: empty domain or outputs");
  double pi_n = 0.0;
  if (schedule.pi_rule == PiRule::Basel) {
    pi_n = static_cast<double>(n) * n * std::numbers::pi * std::numbers::pi / 6.0;
  } else {
    if (schedule.horizon < 1) throw ContractViolation("beta: horizon rule needs T_max >= 1");
    if (n > schedule.horizon) throw ContractViolation("beta: iteration exceeds the T_max horizon");
    pi_n = static_cast<double>(schedule.horizon);
  }
  return 2.0 * std::log(static_cast<double>(output_count) * static_cast<double>(domain_size) * pi_n /
                        schedule.delta);
}

}  // namespace safeopt_mc
