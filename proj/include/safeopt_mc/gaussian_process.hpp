#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "safeopt_mc/errors.hpp"
#include "safeopt_mc/kernel.hpp"

namespace safeopt_mc {

/// Anything that can serve as the covariance of the surrogate GP: a kernel
/// over (input, output index) pairs with per-output noise and prior mean.
template <class K>
concept SurrogateCovariance = requires(const K& k, const Eigen::VectorXd& x, int i) {
  { k(x, i, x, i) } -> std::convertible_to<double>;
  { k.noise_variance(i) } -> std::convertible_to<double>;
  { k.prior_mean(i) } -> std::convertible_to<double>;
  { k.prior_variance(i) } -> std::convertible_to<double>;
  { k.output_count() } -> std::convertible_to<int>;
  { k.input_dim() } -> std::convertible_to<Eigen::Index>;
};

/// One noisy scalar measurement of output `output` at input `x`.
struct Observation {
  Eigen::VectorXd x;
  int output = 0;
  double value = 0.0;
};

using Dataset = std::vector<Observation>;

struct Query {
  Eigen::VectorXd x;
  int output = 0;
};

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;

  double stddev() const { return std::sqrt(variance); }
};

/// Relative jitter added to the diagonal when a factorization fails.
inline constexpr double kFactorizationJitter = 1e-10;

/// Exact GP regression over the extended domain, maintained as an
/// incrementally grown Cholesky factor of K + diag(noise).
///
/// Queries on a const model are pure and may run concurrently; `condition`
/// needs exclusive access.
template <SurrogateCovariance Kernel>
class GaussianProcess {
 public:
  explicit GaussianProcess(Kernel kernel) : kernel_(std::move(kernel)) {}

  GaussianProcess(Kernel kernel, const Dataset& data) : kernel_(std::move(kernel)) {
    for (const auto& obs : data) check(obs);
    data_ = data;
    factorize_batch();
  }

  const Kernel& kernel() const { return kernel_; }
  const Dataset& data() const { return data_; }
  std::size_t size() const { return data_.size(); }

  /// Appends one observation, extending the factor by a single row.
  void condition(const Observation& obs) {
    check(obs);
    const Eigen::Index n = static_cast<Eigen::Index>(data_.size());
    Eigen::VectorXd cross(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      cross[r] = kernel_(data_[static_cast<std::size_t>(r)].x, data_[static_cast<std::size_t>(r)].output,
                         obs.x, obs.output);
    }
    const double self = kernel_(obs.x, obs.output, obs.x, obs.output) + kernel_.noise_variance(obs.output);

    Eigen::VectorXd row = cross;
    if (n > 0) chol_.topLeftCorner(n, n).template triangularView<Eigen::Lower>().solveInPlace(row);
    double pivot = self - row.squaredNorm();
    if (!(pivot > 0.0) || !std::isfinite(pivot)) {
      pivot += kFactorizationJitter * kernel_.prior_variance(obs.output);
      if (!(pivot > 0.0) || !std::isfinite(pivot)) {
        throw NumericalError("Gram matrix not positive definite after jitter (observation " +
                             std::to_string(n) + ")");
      }
    }

    Eigen::MatrixXd grown = Eigen::MatrixXd::Zero(n + 1, n + 1);
    grown.topLeftCorner(n, n) = chol_;
    grown.block(n, 0, 1, n) = row.transpose();
    grown(n, n) = std::sqrt(pivot);
    chol_ = std::move(grown);
    data_.push_back(obs);
    update_weights();
  }

  /// Posterior of a single (x, i) pair.
  Posterior predict(const Eigen::Ref<const Eigen::VectorXd>& x, int output) const {
    if (output < 0 || output >= kernel_.output_count()) throw ContractViolation("output index out of range");
    const double prior = kernel_(x, output, x, output);
    const double mean0 = kernel_.prior_mean(output);
    const Eigen::Index n = static_cast<Eigen::Index>(data_.size());
    if (n == 0) return {mean0, prior};

    Eigen::VectorXd cross(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto& d = data_[static_cast<std::size_t>(r)];
      cross[r] = kernel_(d.x, d.output, x, output);
    }
    const double mean = mean0 + cross.dot(weights_);
    chol_.template triangularView<Eigen::Lower>().solveInPlace(cross);
    return {mean, std::max(0.0, prior - cross.squaredNorm())};
  }

  std::vector<Posterior> posterior(std::span<const Query> queries) const {
    std::vector<Posterior> out;
    out.reserve(queries.size());
    for (const auto& q : queries) out.push_back(predict(q.x, q.output));
    return out;
  }

 private:
  void check(const Observation& obs) const {
    if (obs.x.size() != kernel_.input_dim()) throw ContractViolation("observation input dimension mismatch");
    if (obs.output < 0 || obs.output >= kernel_.output_count()) {
      throw ContractViolation("observation output index out of range");
    }
    if (!std::isfinite(obs.value)) throw ContractViolation("observation value must be finite");
  }

  void factorize_batch() {
    const Eigen::Index n = static_cast<Eigen::Index>(data_.size());
    Eigen::MatrixXd gram(n, n);
    double max_prior = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto& a = data_[static_cast<std::size_t>(r)];
      for (Eigen::Index c = 0; c <= r; ++c) {
        const auto& b = data_[static_cast<std::size_t>(c)];
        gram(r, c) = gram(c, r) = kernel_(a.x, a.output, b.x, b.output);
      }
      gram(r, r) += kernel_.noise_variance(a.output);
      max_prior = std::max(max_prior, kernel_.prior_variance(a.output));
    }
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
      gram.diagonal().array() += kFactorizationJitter * max_prior;
      llt.compute(gram);
      if (llt.info() != Eigen::Success) {
        throw NumericalError("Gram matrix not positive definite after jitter");
      }
    }
    chol_ = llt.matrixL();
    update_weights();
  }

  void update_weights() {
    const Eigen::Index n = static_cast<Eigen::Index>(data_.size());
    weights_.resize(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto& d = data_[static_cast<std::size_t>(r)];
      weights_[r] = d.value - kernel_.prior_mean(d.output);
    }
    chol_.template triangularView<Eigen::Lower>().solveInPlace(weights_);
    chol_.template triangularView<Eigen::Lower>().transpose().solveInPlace(weights_);
  }

  Kernel kernel_;
  Dataset data_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd weights_;
};

}  // namespace safeopt_mc
