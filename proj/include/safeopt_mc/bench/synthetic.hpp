#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "safeopt_mc/domain.hpp"
#include "safeopt_mc/errors.hpp"
#include "safeopt_mc/gaussian_process.hpp"
#include "safeopt_mc/kernel.hpp"
#include "safeopt_mc/oracle.hpp"
#include "safeopt_mc/trace.hpp"

namespace safeopt_mc::bench {

/// A GP sample tabulated on a finite domain, optionally shifted so that a
/// chosen fraction of each constraint is negative.
struct SyntheticInstance {
  ParameterDomain domain;
  std::uint64_t seed = 0;
  SurrogateKernelSpec generator;
  oracle::GroundTruth truth;
  /// Amount subtracted from each raw sample (0 for the performance).
  std::vector<double> offsets;
  /// max |v(a) - v(a')| / ||a - a'|| over all pairs, per output.
  std::vector<double> lipschitz;

  int output_count() const { return truth.output_count(); }

  /// Fraction of domain points where some constraint is negative.
  double unsafe_fraction() const {
    std::size_t bad = 0;
    for (std::size_t a = 0; a < truth.size(); ++a) bad += truth.safe(a) ? 0 : 1;
    return static_cast<double>(bad) / static_cast<double>(truth.size());
  }

  /// Point with the largest worst-case constraint value; a natural seed.
  std::size_t safest_point() const {
    std::size_t best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < truth.size(); ++a) {
      double v = std::numeric_limits<double>::infinity();
      for (int i = 1; i < output_count(); ++i) v = std::min(v, truth.g(a, i));
      if (v > best_v) {
        best_v = v;
        best = a;
      }
    }
    return best;
  }

  /// Noisy evaluation using the generator's noise levels.
  EvaluationResult evaluate(std::size_t point, std::mt19937_64& rng) const {
    if (point >= truth.size()) throw ContractViolation("synthetic evaluation outside the domain");
    EvaluationResult r;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < output_count(); ++i) {
      const double t = truth.values(static_cast<Eigen::Index>(point), i);
      r.truth.push_back(t);
      r.observed.push_back(t + generator.noise_std.at(static_cast<std::size_t>(i)) * normal(rng));
    }
    return r;
  }

  /// Evaluator bound to `rng`, which must outlive it.
  Evaluator evaluator(std::mt19937_64& rng) const {
    return [this, &rng](const Eigen::VectorXd& parameter, const Eigen::VectorXd&) {
      const auto point = domain.find(parameter);
      if (!point) throw ContractViolation("synthetic evaluation off the grid");
      return evaluate(*point, rng);
    };
  }
};

inline std::vector<double> empirical_lipschitz(const ParameterDomain& domain, const Eigen::MatrixXd& values) {
  std::vector<double> out(static_cast<std::size_t>(values.cols()), 0.0);
  for (std::size_t a = 0; a < domain.size(); ++a) {
    for (std::size_t b = a + 1; b < domain.size(); ++b) {
      const double d = domain.distance(a, b);
      for (Eigen::Index i = 0; i < values.cols(); ++i) {
        const double slope = std::abs(values(static_cast<Eigen::Index>(a), i) -
                                      values(static_cast<Eigen::Index>(b), i)) / d;
        out[static_cast<std::size_t>(i)] = std::max(out[static_cast<std::size_t>(i)], slope);
      }
    }
  }
  return out;
}

/// Draws every output jointly from the GP prior (zero mean) on the grid.
/// With `unsafe_fraction` in (0, 1) each constraint is shifted down by its
/// empirical quantile so that this fraction of the grid violates it.
inline SyntheticInstance sample_synthetic(std::uint64_t seed, const SurrogateKernelSpec& generator,
                                          const ParameterDomain& domain, double unsafe_fraction = 0.0) {
  generator.validate();
  if (generator.input_dim() != domain.dim()) throw ContractViolation("generator and domain dimensions differ");
  if (domain.size() > 10000) throw ContractViolation("synthetic grids are limited to 10^4 points");
  if (!(unsafe_fraction >= 0.0 && unsafe_fraction < 1.0)) {
    throw ContractViolation("unsafe fraction must lie in [0, 1)");
  }
  const int q1 = generator.output_count();
  const auto n = static_cast<Eigen::Index>(domain.size());
  const Eigen::Index total = n * q1;

  Eigen::MatrixXd gram(total, total);
  double max_prior = 0.0;
  for (int i = 0; i < q1; ++i) {
    max_prior = std::max(max_prior, generator.per_output[static_cast<std::size_t>(i)].prior_variance);
    for (int j = 0; j <= i; ++j) {
      for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
          const double k = surrogate_kernel_eval(generator, domain[static_cast<std::size_t>(a)], i,
                                                 domain[static_cast<std::size_t>(b)], j);
          gram(i * n + a, j * n + b) = k;
          gram(j * n + b, i * n + a) = k;
        }
      }
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    gram.diagonal().array() += kFactorizationJitter * max_prior;
    llt.compute(gram);
    if (llt.info() != Eigen::Success) throw NumericalError("synthetic Gram matrix not positive definite");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(total);
  for (Eigen::Index k = 0; k < total; ++k) z[k] = normal(rng);
  const Eigen::VectorXd draw = llt.matrixL() * z;

  SyntheticInstance inst{domain, seed, generator, {}, {}, {}};
  inst.truth.values.resize(n, q1);
  for (int i = 0; i < q1; ++i) inst.truth.values.col(i) = draw.segment(i * n, n);

  inst.offsets.assign(static_cast<std::size_t>(q1), 0.0);
  if (unsafe_fraction > 0.0) {
    for (int i = 1; i < q1; ++i) {
      std::vector<double> sorted(inst.truth.values.col(i).data(), inst.truth.values.col(i).data() + n);
      std::sort(sorted.begin(), sorted.end());
      const auto k = static_cast<std::size_t>(std::floor(unsafe_fraction * static_cast<double>(n)));
      const double c = sorted[std::min(k, sorted.size() - 1)];
      inst.offsets[static_cast<std::size_t>(i)] = c;
      inst.truth.values.col(i).array() -= c;
    }
  }
  inst.lipschitz = empirical_lipschitz(domain, inst.truth.values);
  return inst;
}

}  // namespace safeopt_mc::bench
