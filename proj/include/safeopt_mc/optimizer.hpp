#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "safeopt_mc/beta.hpp"
#include "safeopt_mc/confidence.hpp"
#include "safeopt_mc/domain.hpp"
#include "safeopt_mc/errors.hpp"
#include "safeopt_mc/gaussian_process.hpp"
#include "safeopt_mc/sets.hpp"
#include "safeopt_mc/trace.hpp"

namespace safeopt_mc {

enum class SafeSetMode {
  Lipschitz,  ///< Lipschitz expansion from S_{n-1} on contained intervals
  GPDirect,   ///< S_0 plus every point whose GP lower bounds are all >= 0
};

struct AlgoConfig {
  SafeSetMode mode = SafeSetMode::Lipschitz;
  /// One constant per output; entry 0 (performance) is ignored. Used for the
  /// safe set in Lipschitz mode and for expander scores in both modes.
  std::vector<double> lipschitz;
  double epsilon = 0.0;
  BetaSchedule beta;
  /// Divide widths by each output's prior standard deviation before the argmax.
  bool scale_by_prior_std = false;
  /// Defaults to Contained for Lipschitz mode and Direct for GPDirect mode.
  std::optional<IntervalMode> intervals;

  IntervalMode interval_mode() const {
    if (intervals) return *intervals;
    return mode == SafeSetMode::Lipschitz ? IntervalMode::Contained : IntervalMode::Direct;
  }

  void validate(int outputs) const {
    check_lipschitz(lipschitz, outputs);
    if (!(epsilon >= 0.0)) throw ContractViolation("epsilon must be >= 0");
  }
};

/// Safe Bayesian optimization under multiple unknown constraints over a
/// finite domain. The GP covers (parameter [, context], output); each step
/// evaluates the most uncertain element of G_n ∪ M_n at every output.
///
/// The optimizer needs exclusive access during `step`; the evaluator is
/// called sequentially.
template <SurrogateCovariance Kernel>
class SafeOptimizer {
 public:
  SafeOptimizer(ParameterDomain domain, Kernel kernel, IndexSet seed, AlgoConfig config,
                Eigen::VectorXd context = {})
      : domain_(std::move(domain)),
        model_(std::move(kernel)),
        config_(std::move(config)),
        context_(std::move(context)) {
    outputs_ = model_.kernel().output_count();
    config_.validate(outputs_);
    if (domain_.dim() + context_.size() != model_.kernel().input_dim()) {
      throw ContractViolation("domain and context dimensions do not match the kernel");
    }
    reset_slice(normalized(std::move(seed)));
    output_scale_.assign(static_cast<std::size_t>(outputs_), 1.0);
    for (int i = 0; i < outputs_; ++i) {
      output_scale_[static_cast<std::size_t>(i)] = std::sqrt(model_.kernel().prior_variance(i));
    }
  }

  const ParameterDomain& domain() const { return domain_; }
  const GaussianProcess<Kernel>& model() const { return model_; }
  const AlgoConfig& config() const { return config_; }
  const ConfidenceState& confidence() const { return state_; }
  const IndexSet& seed() const { return seed_; }
  const IndexSet& safe_set() const { return safe_; }
  const IndexSet& maximizer_set() const { return maximizers_; }
  const IndexSet& expander_set() const { return expanders_.expanders; }
  const std::vector<std::size_t>& expander_scores() const { return expanders_.scores; }
  const Eigen::VectorXd& context() const { return context_; }
  const RunTrace& trace() const { return trace_; }
  int output_count() const { return outputs_; }
  /// Number of evaluations made so far; the next iteration is n = evaluations() + 1.
  int evaluations() const { return evaluations_; }

  /// GP input for a domain point in the current context slice.
  Eigen::VectorXd input(std::size_t point) const {
    Eigen::VectorXd x(domain_.dim() + context_.size());
    x << domain_[point], context_;
    return x;
  }

  /// beta_n for the upcoming iteration.
  double current_beta() const {
    int n = evaluations_ + 1;
    // The horizon rule is only defined up to T_max; estimates requested after
    // the last allowed iteration reuse beta_{T_max}.
    if (config_.beta.mode == BetaMode::UnionBound && config_.beta.pi_rule == PiRule::Horizon) {
      n = std::min(n, std::max(1, config_.beta.horizon));
    }
    return beta(config_.beta, n, domain_.size(), static_cast<std::size_t>(outputs_));
  }

  /// Posterior mean and standard deviation of every (point, output) in the slice.
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> slice_posterior() const {
    const auto n = static_cast<Eigen::Index>(domain_.size());
    Eigen::MatrixXd mean(n, outputs_);
    Eigen::MatrixXd sd(n, outputs_);
    for (Eigen::Index a = 0; a < n; ++a) {
      const Eigen::VectorXd x = input(static_cast<std::size_t>(a));
      for (int i = 0; i < outputs_; ++i) {
        const Posterior p = model_.predict(x, i);
        mean(a, i) = p.mean;
        sd(a, i) = p.stddev();
      }
    }
    return {std::move(mean), std::move(sd)};
  }

  /// Brings C_n, S_n, M_n and G_n up to date for the upcoming iteration.
  void prepare() {
    if (prepared_) return;
    const auto [mean, sd] = slice_posterior();
    update_confidence(state_, mean, sd, current_beta(), config_.interval_mode());
    if (config_.mode == SafeSetMode::Lipschitz) {
      safe_ = lipschitz_safe_set(state_, domain_, safe_, seed_, config_.lipschitz);
    } else {
      safe_ = confidence_safe_set(state_, seed_);
    }
    maximizers_ = maximizers(state_, safe_);
    expanders_ = expanders(state_, domain_, safe_, config_.lipschitz);
    prepared_ = true;
  }

  Selection propose() {
    prepare();
    return select_next(state_, maximizers_, expanders_.expanders, width_scale(), failed_points_);
  }

  std::size_t best_estimate() {
    prepare();
    return safeopt_mc::best_estimate(state_, safe_);
  }

  /// Conditions the model on all q+1 values measured at `point`.
  void observe(std::size_t point, const EvaluationResult& result) {
    if (point >= domain_.size()) throw ContractViolation("observed point outside the domain");
    if (static_cast<int>(result.observed.size()) != outputs_) {
      throw ContractViolation("evaluator returned " + std::to_string(result.observed.size()) +
                              " values, expected " + std::to_string(outputs_));
    }
    const Eigen::VectorXd x = input(point);
    for (int i = 0; i < outputs_; ++i) {
      model_.condition({x, i, result.observed[static_cast<std::size_t>(i)]});
    }
    ++evaluations_;
    prepared_ = false;
  }

  /// One pass of the loop: sets, selection, evaluation, model update.
  /// Evaluator failures are recorded and rethrown; the failed point is
  /// not selected again.
  TraceEntry step(const Evaluator& evaluate) {
    const Selection sel = propose();
    TraceEntry e;
    e.iteration = evaluations_ + 1;
    e.point = sel.point;
    e.parameter = domain_[sel.point];
    e.context = context_;
    e.output = sel.output;
    e.width = sel.width;
    e.safe_size = safe_.size();
    e.maximizer_size = maximizers_.size();
    e.expander_size = expanders_.expanders.size();
    e.best_point = safeopt_mc::best_estimate(state_, safe_);
    e.best = domain_[e.best_point];
    e.best_lower = state_.l(e.best_point, 0);
    e.misspecifications = state_.misspecifications;

    EvaluationResult result;
    try {
      result = evaluate(domain_[sel.point], context_);
      if (static_cast<int>(result.observed.size()) != outputs_) {
        throw ContractViolation("evaluator returned the wrong number of values");
      }
      for (double v : result.observed) {
        if (!std::isfinite(v)) throw ContractViolation("evaluator returned a non-finite value");
      }
    } catch (...) {
      e.failed = true;
      e.observations.assign(static_cast<std::size_t>(outputs_), std::numeric_limits<double>::quiet_NaN());
      failed_points_ = set_union(failed_points_, IndexSet{sel.point});
      trace_.entries.push_back(e);
      throw;
    }
    e.observations = result.observed;
    e.violation = result.violates();
    observe(sel.point, result);
    trace_.entries.push_back(e);
    return e;
  }

  /// Steps until `stop.max_iterations` evaluations were made by this call or
  /// the best acquisition width falls below `stop.width_threshold`.
  const RunTrace& run(const Evaluator& evaluate, const StopRule& stop) {
    for (int k = 0; k < stop.max_iterations; ++k) {
      Selection sel;
      try {
        sel = propose();
      } catch (const NoCandidatesError&) {
        trace_.stop = StopReason::NoCandidates;
        return trace_;
      }
      if (sel.width < stop.width_threshold) {
        trace_.stop = StopReason::WidthBelowThreshold;
        return trace_;
      }
      try {
        step(evaluate);
      } catch (const std::exception& ex) {
        trace_.stop = StopReason::EvaluatorFailure;
        trace_.failure = ex.what();
        throw;
      }
    }
    trace_.stop = StopReason::MaxIterations;
    return trace_;
  }

  /// Moves to another context slice. With `seed` the given points are
  /// trusted as safe; otherwise the slice seed is every point whose GP lower
  /// bounds certify all constraints, and an empty certificate is an error.
  void set_context(Eigen::VectorXd z, std::optional<IndexSet> seed = std::nullopt) {
    if (z.size() != context_.size()) throw ContractViolation("context dimension mismatch");
    const Eigen::VectorXd previous = context_;
    context_ = std::move(z);
    IndexSet new_seed;
    if (seed) {
      new_seed = normalized(std::move(*seed));
    } else {
      const auto [mean, sd] = slice_posterior();
      const double scale = std::sqrt(current_beta());
      for (std::size_t a = 0; a < domain_.size(); ++a) {
        bool ok = true;
        for (int i = 1; i < outputs_ && ok; ++i) {
          const auto r = static_cast<Eigen::Index>(a);
          ok = mean(r, i) - scale * sd(r, i) >= 0.0;
        }
        if (ok) new_seed.push_back(a);
      }
      if (new_seed.empty()) {
        context_ = previous;
        throw NoSafeSeedError("no safe seed at context: GP lower bounds certify no parameter");
      }
    }
    reset_slice(std::move(new_seed));
  }

 private:
  std::span<const double> width_scale() const {
    if (!config_.scale_by_prior_std) return {};
    return output_scale_;
  }

  void reset_slice(IndexSet seed) {
    if (seed.empty()) throw ContractViolation("initial safe set must not be empty");
    for (std::size_t a : seed) {
      if (a >= domain_.size()) throw ContractViolation("seed index outside the domain");
    }
    seed_ = std::move(seed);
    safe_ = seed_;
    maximizers_.clear();
    expanders_ = {};
    failed_points_.clear();
    state_ = ConfidenceState::initial(domain_.size(), outputs_, seed_);
    prepared_ = false;
  }

  ParameterDomain domain_;
  GaussianProcess<Kernel> model_;
  AlgoConfig config_;
  Eigen::VectorXd context_;
  int outputs_ = 0;
  int evaluations_ = 0;
  std::vector<double> output_scale_;

  ConfidenceState state_;
  IndexSet seed_;
  IndexSet safe_;
  IndexSet maximizers_;
  ExpanderResult expanders_;
  IndexSet failed_points_;
  bool prepared_ = false;
  RunTrace trace_;
};

}  // namespace safeopt_mc
