#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "safeopt_mc/errors.hpp"

namespace safeopt_mc {

enum class KernelFamily { Matern32, SquaredExponential };

inline std::string to_string(KernelFamily family) {
  return family == KernelFamily::Matern32 ? "matern32" : "squared_exponential";
}

inline KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "matern32") return KernelFamily::Matern32;
  if (name == "squared_exponential" || name == "se") return KernelFamily::SquaredExponential;
  throw ContractViolation("unknown kernel family '" + name + "'");
}

/// Stationary covariance over parameter vectors. Lengthscales form the
/// diagonal of the distance scaling matrix, one per input dimension.
struct KernelSpec {
  KernelFamily family = KernelFamily::Matern32;
  double prior_variance = 1.0;
  Eigen::VectorXd lengthscales = Eigen::VectorXd::Ones(1);

  static KernelSpec matern32(double prior_std, Eigen::VectorXd lengthscales) {
    return {KernelFamily::Matern32, prior_std * prior_std, std::move(lengthscales)};
  }
  static KernelSpec squared_exponential(double prior_std, Eigen::VectorXd lengthscales) {
    return {KernelFamily::SquaredExponential, prior_std * prior_std, std::move(lengthscales)};
  }

  Eigen::Index dim() const { return lengthscales.size(); }
  double prior_std() const { return std::sqrt(prior_variance); }

  void validate() const {
    if (!(prior_variance > 0.0) || !std::isfinite(prior_variance)) {
      throw ContractViolation("kernel prior variance must be positive and finite");
    }
    if (lengthscales.size() == 0) throw ContractViolation("kernel needs at least one lengthscale");
    for (Eigen::Index k = 0; k < lengthscales.size(); ++k) {
      if (!(lengthscales[k] > 0.0) || !std::isfinite(lengthscales[k])) {
        throw ContractViolation("kernel lengthscales must be positive and finite");
      }
    }
  }
};

/// r(a, a') = sqrt((a - a')^T M^-2 (a - a')), M = diag(lengthscales).
inline double scaled_distance(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& a,
                              const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != spec.dim() || b.size() != spec.dim()) {
    throw ContractViolation("kernel input dimension " + std::to_string(a.size()) + "/" +
                            std::to_string(b.size()) + " does not match " +
                            std::to_string(spec.dim()) + " lengthscales");
  }
  double sq = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double d = (a[k] - b[k]) / spec.lengthscales[k];
    sq += d * d;
  }
  return std::sqrt(sq);
}

inline double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& a,
                          const Eigen::Ref<const Eigen::VectorXd>& b) {
  const double r = scaled_distance(spec, a, b);
  switch (spec.family) {
    case KernelFamily::Matern32: {
      const double s = std::sqrt(3.0) * r;
      return spec.prior_variance * (1.0 + s) * std::exp(-s);
    }
    case KernelFamily::SquaredExponential:
      return spec.prior_variance * std::exp(-0.5 * r * r);
  }
  return 0.0;
}

/// Joint covariance over the extended domain (parameter, output index).
///
/// Output 0 is the performance function, outputs 1..q the safety constraints.
/// Without cross terms the joint covariance is block-diagonal across outputs.
/// A cross term (i, j) supplies k((a,i),(a',j)) for i != j and is used
/// symmetrically. Noise is heteroscedastic per output and only enters the
/// diagonal of the Gram matrix; the constant prior mean defaults to zero.
struct SurrogateKernelSpec {
  std::vector<KernelSpec> per_output;
  std::map<std::pair<int, int>, KernelSpec> cross_terms;
  std::vector<double> noise_std;
  std::vector<double> prior_mean;

  int output_count() const { return static_cast<int>(per_output.size()); }
  int constraint_count() const { return output_count() - 1; }
  Eigen::Index input_dim() const { return per_output.empty() ? 0 : per_output.front().dim(); }

  double prior_std(int i) const { return per_output.at(static_cast<std::size_t>(i)).prior_std(); }
  double noise_variance(int i) const {
    const double s = noise_std.at(static_cast<std::size_t>(i));
    return s * s;
  }
  double mean(int i) const {
    return prior_mean.empty() ? 0.0 : prior_mean.at(static_cast<std::size_t>(i));
  }

  void set_cross_term(int i, int j, KernelSpec spec) {
    if (i == j) throw ContractViolation("cross term needs two distinct outputs");
    cross_terms[{std::min(i, j), std::max(i, j)}] = std::move(spec);
  }

  const KernelSpec* cross_term(int i, int j) const {
    auto it = cross_terms.find({std::min(i, j), std::max(i, j)});
    return it == cross_terms.end() ? nullptr : &it->second;
  }

  void validate() const {
    if (per_output.empty()) throw ContractViolation("surrogate kernel needs at least one output");
    if (noise_std.size() != per_output.size()) {
      throw ContractViolation("need one noise std per output");
    }
    if (!prior_mean.empty() && prior_mean.size() != per_output.size()) {
      throw ContractViolation("need one prior mean per output");
    }
    for (const auto& k : per_output) {
      k.validate();
      if (k.dim() != input_dim()) throw ContractViolation("output kernels disagree on input dimension");
    }
    for (double s : noise_std) {
      if (!(s > 0.0) || !std::isfinite(s)) throw ContractViolation("noise std must be positive");
    }
    for (const auto& [key, k] : cross_terms) {
      if (key.first < 0 || key.second >= output_count() || key.first == key.second) {
        throw ContractViolation("cross term refers to an unknown output");
      }
      k.validate();
      if (k.dim() != input_dim()) throw ContractViolation("cross term input dimension mismatch");
    }
  }
};

inline double surrogate_kernel_eval(const SurrogateKernelSpec& spec,
                                    const Eigen::Ref<const Eigen::VectorXd>& a, int i,
                                    const Eigen::Ref<const Eigen::VectorXd>& b, int j) {
  if (i < 0 || j < 0 || i >= spec.output_count() || j >= spec.output_count()) {
    throw ContractViolation("output index out of range");
  }
  if (i == j) return kernel_eval(spec.per_output[static_cast<std::size_t>(i)], a, b);
  const KernelSpec* cross = spec.cross_term(i, j);
  return cross ? kernel_eval(*cross, a, b) : 0.0;
}

/// Callable form of a SurrogateKernelSpec used by the Gaussian process.
class SurrogateKernel {
 public:
  explicit SurrogateKernel(SurrogateKernelSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& a, int i,
                    const Eigen::Ref<const Eigen::VectorXd>& b, int j) const {
    return surrogate_kernel_eval(spec_, a, i, b, j);
  }

  int output_count() const { return spec_.output_count(); }
  Eigen::Index input_dim() const { return spec_.input_dim(); }
  double noise_variance(int i) const { return spec_.noise_variance(i); }
  double prior_mean(int i) const { return spec_.mean(i); }
  double prior_variance(int i) const {
    return spec_.per_output.at(static_cast<std::size_t>(i)).prior_variance;
  }

  const SurrogateKernelSpec& spec() const { return spec_; }

 private:
  SurrogateKernelSpec spec_;
};

}  // namespace safeopt_mc
