#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <utility>

#include "safeopt_mc/beta.hpp"
#include "safeopt_mc/domain.hpp"
#include "safeopt_mc/gaussian_process.hpp"
#include "safeopt_mc/trace.hpp"

namespace safeopt_mc {

/// GP-UCB over the whole domain: argmax mu(a) + beta^(1/2) sigma(a) on the
/// performance output, first point on ties. Ignores every constraint.
template <SurrogateCovariance Kernel>
std::size_t gp_ucb_select(const GaussianProcess<Kernel>& model, double beta, const ParameterDomain& domain,
                          const Eigen::VectorXd& context = {}) {
  const double scale = std::sqrt(beta);
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd x(domain.dim() + context.size());
  for (std::size_t a = 0; a < domain.size(); ++a) {
    x << domain[a], context;
    const Posterior p = model.predict(x, 0);
    const double v = p.mean + scale * p.stddev();
    if (v > best_value) {
      best_value = v;
      best = a;
    }
  }
  return best;
}

/// Unsafe baseline loop. It observes every output so traces record the
/// constraint values, but selection only looks at the performance UCB.
template <SurrogateCovariance Kernel>
class UcbOptimizer {
 public:
  UcbOptimizer(ParameterDomain domain, Kernel kernel, BetaSchedule schedule, Eigen::VectorXd context = {})
      : domain_(std::move(domain)),
        model_(std::move(kernel)),
        schedule_(schedule),
        context_(std::move(context)) {}

  const GaussianProcess<Kernel>& model() const { return model_; }
  const RunTrace& trace() const { return trace_; }

  TraceEntry step(const Evaluator& evaluate) {
    const int outputs = model_.kernel().output_count();
    const int n = static_cast<int>(trace_.entries.size()) + 1;
    const double b = beta(schedule_, n, domain_.size(), static_cast<std::size_t>(outputs));
    const std::size_t a = gp_ucb_select(model_, b, domain_, context_);

    TraceEntry e;
    e.iteration = n;
    e.point = a;
    e.parameter = domain_[a];
    e.context = context_;
    e.output = 0;
    const Posterior p = model_.predict(input(a), 0);
    e.width = p.mean + std::sqrt(b) * p.stddev();
    e.safe_size = domain_.size();

    e.best_point = best_estimate();
    e.best = domain_[e.best_point];
    const Posterior pb = model_.predict(input(e.best_point), 0);
    e.best_lower = pb.mean - std::sqrt(b) * pb.stddev();

    const EvaluationResult r = evaluate(domain_[a], context_);
    if (static_cast<int>(r.observed.size()) != outputs) {
      throw ContractViolation("evaluator returned the wrong number of values");
    }
    e.observations = r.observed;
    e.violation = r.violates();
    const Eigen::VectorXd x = input(a);
    for (int i = 0; i < outputs; ++i) model_.condition({x, i, r.observed[static_cast<std::size_t>(i)]});
    trace_.entries.push_back(e);
    return e;
  }

  /// Pessimistic estimate over the whole domain with the next beta.
  std::size_t best_estimate() const {
    const int n = static_cast<int>(trace_.entries.size()) + 1;
    const double b = beta(schedule_, n, domain_.size(), static_cast<std::size_t>(model_.kernel().output_count()));
    std::size_t best = 0;
    double best_lower = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < domain_.size(); ++c) {
      const Posterior q = model_.predict(input(c), 0);
      const double l = q.mean - std::sqrt(b) * q.stddev();
      if (l > best_lower) {
        best_lower = l;
        best = c;
      }
    }
    return best;
  }

  const RunTrace& run(const Evaluator& evaluate, int iterations) {
    for (int k = 0; k < iterations; ++k) step(evaluate);
    trace_.stop = StopReason::MaxIterations;
    return trace_;
  }

 private:
  Eigen::VectorXd input(std::size_t a) const {
    Eigen::VectorXd x(domain_.dim() + context_.size());
    x << domain_[a], context_;
    return x;
  }

  ParameterDomain domain_;
  GaussianProcess<Kernel> model_;
  BetaSchedule schedule_;
  Eigen::VectorXd context_;
  RunTrace trace_;
};

}  // namespace safeopt_mc
