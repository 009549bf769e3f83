#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "safeopt_mc/confidence.hpp"
#include "safeopt_mc/domain.hpp"
#include "safeopt_mc/errors.hpp"
#include "safeopt_mc/gaussian_process.hpp"

/// Brute-force references for tests and acceptance runs. Everything here is
/// written for clarity over speed and shares no code with the fast paths
/// beyond basic types.
namespace safeopt_mc::oracle {

/// Noise-free tables of every output over the full domain, known only for
/// synthetic benchmarks. Column 0 is the performance.
struct GroundTruth {
  Eigen::MatrixXd values;  // rows: domain points, cols: outputs

  int output_count() const { return static_cast<int>(values.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
  double f(std::size_t a) const { return values(static_cast<Eigen::Index>(a), 0); }
  double g(std::size_t a, int i) const { return values(static_cast<Eigen::Index>(a), i); }

  bool safe(std::size_t a) const {
    for (int i = 1; i < output_count(); ++i) {
      if (g(a, i) < 0.0) return false;
    }
    return true;
  }

  void validate(const ParameterDomain& domain) const {
    if (size() != domain.size()) throw ContractViolation("truth table does not cover the domain");
    if (!values.allFinite()) throw ContractViolation("truth table contains non-finite values");
  }
};

/// R_eps(S) = S ∪ ∩_{i>=1} { a : exists a' in S, g_i(a') - eps - L_i ||a - a'|| >= 0 }.
inline IndexSet reach_operator(const IndexSet& S, const GroundTruth& truth, const ParameterDomain& domain,
                               std::span<const double> lipschitz, double epsilon) {
  truth.validate(domain);
  std::vector<bool> member(domain.size(), false);
  for (std::size_t a : S) member.at(a) = true;
  for (std::size_t a = 0; a < domain.size(); ++a) {
    if (member[a]) continue;
    bool every = true;
    for (int i = 1; i < truth.output_count(); ++i) {
      bool exists = false;
      for (std::size_t b : S) {
        if (truth.g(b, i) - epsilon - lipschitz[static_cast<std::size_t>(i)] * domain.distance(a, b) >= 0.0) {
          exists = true;
        }
      }
      every = every && exists;
    }
    if (every) member[a] = true;
  }
  IndexSet out;
  for (std::size_t a = 0; a < member.size(); ++a) {
    if (member[a]) out.push_back(a);
  }
  return out;
}

/// Least fixed point of reach_operator containing S0.
inline IndexSet reach_closure(const IndexSet& S0, const GroundTruth& truth, const ParameterDomain& domain,
                              std::span<const double> lipschitz, double epsilon) {
  if (S0.empty()) throw ContractViolation("reach_closure: empty seed set");
  IndexSet current = S0;
  std::sort(current.begin(), current.end());
  for (std::size_t k = 0; k <= domain.size(); ++k) {
    IndexSet next = reach_operator(current, truth, domain, lipschitz, epsilon);
    if (next == current) return current;
    current = std::move(next);
  }
  return current;
}

/// f*_eps = max of f over the closure of S0.
inline double baseline_optimum(const IndexSet& S0, const GroundTruth& truth, const ParameterDomain& domain,
                               std::span<const double> lipschitz, double epsilon) {
  const IndexSet closure = reach_closure(S0, truth, domain, lipschitz, epsilon);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a : closure) best = std::max(best, truth.f(a));
  return best;
}

/// Posterior via an explicit inverse of the Gram matrix. No jitter: a
/// singular Gram matrix is an error.
template <SurrogateCovariance Kernel>
std::vector<Posterior> dense_posterior(const Kernel& kernel, const Dataset& data, std::span<const Query> queries) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd K(n, n);
  Eigen::VectorXd resid(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      K(r, c) = kernel(data[r].x, data[r].output, data[c].x, data[c].output);
    }
    K(r, r) += kernel.noise_variance(data[r].output);
    resid[r] = data[r].value - kernel.prior_mean(data[r].output);
  }
  Eigen::MatrixXd Kinv;
  if (n > 0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (!lu.isInvertible()) throw NumericalError("dense_posterior: singular Gram matrix");
    Kinv = lu.inverse();
  }
  std::vector<Posterior> out;
  for (const auto& q : queries) {
    Eigen::VectorXd k(n);
    for (Eigen::Index r = 0; r < n; ++r) k[r] = kernel(data[r].x, data[r].output, q.x, q.output);
    const double prior = kernel(q.x, q.output, q.x, q.output);
    Posterior p;
    p.mean = kernel.prior_mean(q.output) + (n > 0 ? (k.transpose() * Kinv * resid)(0) : 0.0);
    p.variance = prior - (n > 0 ? (k.transpose() * Kinv * k)(0) : 0.0);
    out.push_back(p);
  }
  return out;
}

// Exhaustive set builders. Each evaluates its defining formula over every
// pair of points without any pruning.

inline IndexSet lipschitz_safe_set(const ConfidenceState& state, const ParameterDomain& domain,
                                   const IndexSet& previous, const IndexSet& seed,
                                   std::span<const double> lipschitz) {
  IndexSet out;
  for (std::size_t cand = 0; cand < domain.size(); ++cand) {
    bool in = std::find(seed.begin(), seed.end(), cand) != seed.end();
    if (!in) {
      in = true;
      for (int i = 1; i < state.output_count(); ++i) {
        bool exists = false;
        for (std::size_t a : previous) {
          exists = exists || state.l(a, i) - lipschitz[static_cast<std::size_t>(i)] * domain.distance(a, cand) >= 0.0;
        }
        in = in && exists;
      }
    }
    if (in) out.push_back(cand);
  }
  return out;
}

inline IndexSet confidence_safe_set(const ConfidenceState& state, const IndexSet& seed) {
  IndexSet out;
  for (std::size_t a = 0; a < state.point_count(); ++a) {
    bool in = std::find(seed.begin(), seed.end(), a) != seed.end();
    if (!in) {
      in = true;
      for (int i = 1; i < state.output_count(); ++i) in = in && state.l(a, i) >= 0.0;
    }
    if (in) out.push_back(a);
  }
  return out;
}

inline IndexSet maximizers(const ConfidenceState& state, const IndexSet& safe) {
  IndexSet out;
  for (std::size_t a : safe) {
    bool dominated = false;
    for (std::size_t b : safe) dominated = dominated || state.u(a, 0) < state.l(b, 0);
    if (!dominated) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::size_t> expander_scores(const ConfidenceState& state, const ParameterDomain& domain,
                                                const IndexSet& safe, std::span<const double> lipschitz) {
  std::vector<std::size_t> scores(domain.size(), 0);
  for (std::size_t a : safe) {
    for (std::size_t b = 0; b < domain.size(); ++b) {
      if (std::find(safe.begin(), safe.end(), b) != safe.end()) continue;
      bool some = false;
      for (int i = 1; i < state.output_count(); ++i) {
        some = some || state.u(a, i) - lipschitz[static_cast<std::size_t>(i)] * domain.distance(a, b) >= 0.0;
      }
      if (some) ++scores[a];
    }
  }
  return scores;
}

inline IndexSet expanders(const ConfidenceState& state, const ParameterDomain& domain, const IndexSet& safe,
                          std::span<const double> lipschitz) {
  const auto scores = expander_scores(state, domain, safe, lipschitz);
  IndexSet out;
  for (std::size_t a = 0; a < scores.size(); ++a) {
    if (scores[a] >= 1) out.push_back(a);
  }
  return out;
}

}  // namespace safeopt_mc::oracle
