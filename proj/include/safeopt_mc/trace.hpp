#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace safeopt_mc {

/// What an experiment returns for one parameter vector: q+1 noisy values
/// (index 0 is the performance) and, for synthetic benchmarks, the
/// noise-free values used to judge safety after the fact.
struct EvaluationResult {
  std::vector<double> observed;
  std::vector<double> truth;
  bool unstable = false;

  /// True when any constraint value (truth if known, else observed) is negative.
  bool violates() const {
    const auto& v = truth.empty() ? observed : truth;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] < 0.0) return true;
    }
    return false;
  }
};

/// Objective evaluator contract: parameter and (possibly empty) context in,
/// q+1 noisy values out. Called sequentially by the optimizer.
using Evaluator = std::function<EvaluationResult(const Eigen::VectorXd& parameter,
                                                 const Eigen::VectorXd& context)>;

/// One row of a run: what was selected, what was observed and the state of
/// the sets that led to the choice.
struct TraceEntry {
  int iteration = 0;
  std::size_t point = 0;
  Eigen::VectorXd parameter;
  Eigen::VectorXd context;
  int output = 0;
  double width = 0.0;
  std::vector<double> observations;
  std::size_t safe_size = 0;
  std::size_t maximizer_size = 0;
  std::size_t expander_size = 0;
  std::size_t best_point = 0;
  Eigen::VectorXd best;
  double best_lower = 0.0;
  std::size_t misspecifications = 0;
  bool violation = false;
  bool failed = false;
  double oracle_gap = std::numeric_limits<double>::quiet_NaN();
};

inline bool operator==(const TraceEntry& a, const TraceEntry& b) {
  auto same = [](double x, double y) { return x == y || (x != x && y != y); };
  auto same_vec = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return x.size() == y.size() && x == y; };
  if (a.observations.size() != b.observations.size()) return false;
  for (std::size_t i = 0; i < a.observations.size(); ++i) {
    if (!same(a.observations[i], b.observations[i])) return false;
  }
  return a.iteration == b.iteration && a.point == b.point && same_vec(a.parameter, b.parameter) &&
         same_vec(a.context, b.context) && a.output == b.output && same(a.width, b.width) &&
         a.safe_size == b.safe_size && a.maximizer_size == b.maximizer_size &&
         a.expander_size == b.expander_size && a.best_point == b.best_point && same_vec(a.best, b.best) &&
         same(a.best_lower, b.best_lower) && a.misspecifications == b.misspecifications &&
         a.violation == b.violation && a.failed == b.failed && same(a.oracle_gap, b.oracle_gap);
}

enum class StopReason { None, MaxIterations, WidthBelowThreshold, NoCandidates, EvaluatorFailure };

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::None: return "none";
    case StopReason::MaxIterations: return "max_iterations";
    case StopReason::WidthBelowThreshold: return "width_below_threshold";
    case StopReason::NoCandidates: return "no_candidates";
    case StopReason::EvaluatorFailure: return "evaluator_failure";
  }
  return "none";
}

/// Append-only record of a run.
struct RunTrace {
  std::vector<TraceEntry> entries;
  StopReason stop = StopReason::None;
  std::string failure;

  std::size_t size() const { return entries.size(); }
  friend bool operator==(const RunTrace&, const RunTrace&) = default;

  bool any_violation() const {
    for (const auto& e : entries) {
      if (e.violation) return true;
    }
    return false;
  }
};

struct StopRule {
  int max_iterations = 30;
  /// Stop once the best acquisition width drops below this; 0 disables.
  double width_threshold = 0.0;
};

}  // namespace safeopt_mc
