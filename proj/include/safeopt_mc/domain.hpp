#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "safeopt_mc/errors.hpp"

namespace safeopt_mc {

/// Sorted list of domain point indices.
using IndexSet = std::vector<std::size_t>;

/// Finite, ordered set of parameter vectors with a (per-dimension scaled)
/// Euclidean metric. Point order is fixed and drives every tie-break.
class ParameterDomain {
 public:
  ParameterDomain() = default;

  explicit ParameterDomain(std::vector<Eigen::VectorXd> points, Eigen::VectorXd metric_scales = {})
      : points_(std::move(points)), scales_(std::move(metric_scales)) {
    if (points_.empty()) throw ContractViolation("parameter domain is empty");
    const Eigen::Index d = points_.front().size();
    if (d == 0) throw ContractViolation("parameter vectors must have at least one dimension");
    if (scales_.size() == 0) scales_ = Eigen::VectorXd::Ones(d);
    if (scales_.size() != d) throw ContractViolation("metric scale dimension mismatch");
    for (Eigen::Index k = 0; k < d; ++k) {
      if (!(scales_[k] > 0.0)) throw ContractViolation("metric scales must be positive");
    }
    std::set<std::vector<double>> seen;
    for (const auto& p : points_) {
      if (p.size() != d) throw ContractViolation("domain points disagree on dimension");
      if (!p.allFinite()) throw ContractViolation("domain points must be finite");
      if (!seen.insert(std::vector<double>(p.data(), p.data() + p.size())).second) {
        throw ContractViolation("domain points must be unique");
      }
    }
  }

  /// Regular grid, first dimension varying slowest.
  static ParameterDomain grid(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                              const std::vector<int>& counts, Eigen::VectorXd metric_scales = {}) {
    const Eigen::Index d = lower.size();
    if (upper.size() != d || static_cast<Eigen::Index>(counts.size()) != d || d == 0) {
      throw ContractViolation("grid bounds and counts must share one dimension");
    }
    std::size_t total = 1;
    for (Eigen::Index k = 0; k < d; ++k) {
      if (counts[static_cast<std::size_t>(k)] < 1) throw ContractViolation("grid counts must be >= 1");
      if (counts[static_cast<std::size_t>(k)] > 1 && !(upper[k] > lower[k])) {
        throw ContractViolation("grid upper bound must exceed lower bound");
      }
      total *= static_cast<std::size_t>(counts[static_cast<std::size_t>(k)]);
    }
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(total);
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    for (std::size_t n = 0; n < total; ++n) {
      Eigen::VectorXd p(d);
      for (Eigen::Index k = 0; k < d; ++k) {
        const int c = counts[static_cast<std::size_t>(k)];
        p[k] = c == 1 ? lower[k]
                      : lower[k] + (upper[k] - lower[k]) * idx[static_cast<std::size_t>(k)] / (c - 1);
      }
      pts.push_back(std::move(p));
      for (Eigen::Index k = d - 1; k >= 0; --k) {
        if (++idx[static_cast<std::size_t>(k)] < counts[static_cast<std::size_t>(k)]) break;
        idx[static_cast<std::size_t>(k)] = 0;
      }
    }
    return ParameterDomain(std::move(pts), std::move(metric_scales));
  }

  std::size_t size() const { return points_.size(); }
  Eigen::Index dim() const { return points_.empty() ? 0 : points_.front().size(); }
  const Eigen::VectorXd& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<Eigen::VectorXd>& points() const { return points_; }
  const Eigen::VectorXd& metric_scales() const { return scales_; }

  double distance(std::size_t a, std::size_t b) const {
    const auto& p = points_[a];
    const auto& q = points_[b];
    double sq = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      const double d = (p[k] - q[k]) / scales_[k];
      sq += d * d;
    }
    return std::sqrt(sq);
  }

  /// Index of the point closest to `x` (first one on ties).
  std::size_t nearest(const Eigen::VectorXd& x) const {
    if (x.size() != dim()) throw ContractViolation("query dimension mismatch");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const double d = ((points_[i] - x).array() / scales_.array()).matrix().squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  std::optional<std::size_t> find(const Eigen::VectorXd& x, double tolerance = 1e-9) const {
    const std::size_t i = nearest(x);
    if ((points_[i] - x).cwiseAbs().maxCoeff() <= tolerance) return i;
    return std::nullopt;
  }

 private:
  std::vector<Eigen::VectorXd> points_;
  Eigen::VectorXd scales_;
};

}  // namespace safeopt_mc
