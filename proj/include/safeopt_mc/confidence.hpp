#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "safeopt_mc/domain.hpp"
#include "safeopt_mc/errors.hpp"

namespace safeopt_mc {

/// How new GP confidence intervals combine with the previous ones.
enum class IntervalMode {
  Contained,  ///< C_n = C_{n-1} ∩ Q_n (nested intervals)
  Direct,     ///< C_n = Q_n
};

struct Interval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

/// Result of intersecting an interval with a fresh confidence interval.
struct Containment {
  Interval interval;
  bool misspecified = false;
};

/// Intersects `previous` with `fresh`. An empty intersection means the model
/// contradicts its own earlier bounds; the interval then collapses onto the
/// boundary of `previous` closest to `fresh`, which keeps C_n inside C_{n-1}.
inline Containment contain(const Interval& previous, const Interval& fresh) {
  Interval r{std::max(previous.lower, fresh.lower), std::min(previous.upper, fresh.upper)};
  if (r.lower <= r.upper) return {r, false};
  const double p = fresh.lower > previous.upper ? previous.upper : previous.lower;
  return {{p, p}, true};
}

/// Per-(point, output) confidence bounds l_i(a), u_i(a) over one domain slice.
struct ConfidenceState {
  Eigen::MatrixXd lower;  // rows: domain points, cols: outputs
  Eigen::MatrixXd upper;
  int iteration = 0;
  std::size_t misspecifications = 0;

  /// C_0: [0, inf) for constraint outputs at seed points, R elsewhere.
  static ConfidenceState initial(std::size_t points, int outputs, const IndexSet& seed) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    ConfidenceState s;
    s.lower = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(points), outputs, -inf);
    s.upper = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(points), outputs, inf);
    for (std::size_t a : seed) {
      if (a >= points) throw ContractViolation("seed index outside the domain");
      for (int i = 1; i < outputs; ++i) s.lower(static_cast<Eigen::Index>(a), i) = 0.0;
    }
    return s;
  }

  std::size_t point_count() const { return static_cast<std::size_t>(lower.rows()); }
  int output_count() const { return static_cast<int>(lower.cols()); }

  double l(std::size_t a, int i) const { return lower(static_cast<Eigen::Index>(a), i); }
  double u(std::size_t a, int i) const { return upper(static_cast<Eigen::Index>(a), i); }
  double width(std::size_t a, int i) const { return u(a, i) - l(a, i); }
};

/// Folds Q_n = [mu ± beta^(1/2) sigma] into the state and advances the
/// iteration counter. `mean` and `stddev` share the state's shape.
inline void update_confidence(ConfidenceState& state, const Eigen::MatrixXd& mean,
                              const Eigen::MatrixXd& stddev, double beta, IntervalMode mode) {
  if (mean.rows() != state.lower.rows() || mean.cols() != state.lower.cols() ||
      stddev.rows() != mean.rows() || stddev.cols() != mean.cols()) {
    throw ContractViolation("posterior shape does not match the confidence state");
  }
  if (!(beta >= 0.0)) throw ContractViolation("beta must be non-negative");
  const double scale = std::sqrt(beta);
  for (Eigen::Index a = 0; a < mean.rows(); ++a) {
    for (Eigen::Index i = 0; i < mean.cols(); ++i) {
      const Interval fresh{mean(a, i) - scale * stddev(a, i), mean(a, i) + scale * stddev(a, i)};
      if (mode == IntervalMode::Direct) {
        state.lower(a, i) = fresh.lower;
        state.upper(a, i) = fresh.upper;
        continue;
      }
      const auto c = contain({state.lower(a, i), state.upper(a, i)}, fresh);
      state.lower(a, i) = c.interval.lower;
      state.upper(a, i) = c.interval.upper;
      if (c.misspecified) ++state.misspecifications;
    }
  }
  ++state.iteration;
}

}  // namespace safeopt_mc
