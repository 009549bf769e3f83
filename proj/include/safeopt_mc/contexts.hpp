#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "safeopt_mc/errors.hpp"
#include "safeopt_mc/kernel.hpp"
#include "safeopt_mc/optimizer.hpp"

namespace safeopt_mc {

/// External context variables (e.g. reference speed) and their kernel k_z.
struct ContextSpec {
  std::vector<std::string> labels;
  std::vector<std::string> units;
  KernelSpec kernel;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index dim() const { return kernel.dim(); }

  void validate() const {
    kernel.validate();
    const auto d = static_cast<std::size_t>(dim());
    if (labels.size() != d || units.size() != d) {
      throw ContractViolation("context needs one label and one unit per dimension");
    }
    if (lower.size() != dim() || upper.size() != dim()) {
      throw ContractViolation("context bounds must match the context dimension");
    }
    for (Eigen::Index k = 0; k < dim(); ++k) {
      if (!(lower[k] <= upper[k])) throw ContractViolation("context bounds are inverted");
    }
  }

  bool contains(const Eigen::VectorXd& z) const {
    if (z.size() != dim()) return false;
    for (Eigen::Index k = 0; k < dim(); ++k) {
      if (!(z[k] >= lower[k] && z[k] <= upper[k])) return false;
    }
    return true;
  }
};

/// k((a,i,z),(a',j,z')) = k_p((a,i),(a',j)) * k_z(z,z').
inline double contextual_kernel_eval(const SurrogateKernelSpec& parameter, const ContextSpec& context,
                                     const Eigen::Ref<const Eigen::VectorXd>& a, int i,
                                     const Eigen::Ref<const Eigen::VectorXd>& z,
                                     const Eigen::Ref<const Eigen::VectorXd>& b, int j,
                                     const Eigen::Ref<const Eigen::VectorXd>& w) {
  if (z.size() != context.dim() || w.size() != context.dim()) {
    throw ContractViolation("context dimension mismatch");
  }
  return surrogate_kernel_eval(parameter, a, i, b, j) * kernel_eval(context.kernel, z, w);
}

/// Product kernel on concatenated inputs (a, z). Noise and prior mean come
/// from the parameter kernel.
class ContextualKernel {
 public:
  ContextualKernel(SurrogateKernelSpec parameter, ContextSpec context)
      : parameter_(std::move(parameter)), context_(std::move(context)) {
    parameter_.validate();
    context_.validate();
  }

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x, int i,
                    const Eigen::Ref<const Eigen::VectorXd>& y, int j) const {
    const Eigen::Index p = parameter_.input_dim();
    const Eigen::Index c = context_.dim();
    if (x.size() != p + c || y.size() != p + c) {
      throw ContractViolation("contextual kernel input must be parameter followed by context");
    }
    return contextual_kernel_eval(parameter_, context_, x.head(p), i, x.tail(c), y.head(p), j, y.tail(c));
  }

  int output_count() const { return parameter_.output_count(); }
  Eigen::Index input_dim() const { return parameter_.input_dim() + context_.dim(); }
  double noise_variance(int i) const { return parameter_.noise_variance(i); }
  double prior_mean(int i) const { return parameter_.mean(i); }
  double prior_variance(int i) const {
    return parameter_.per_output.at(static_cast<std::size_t>(i)).prior_variance * context_.kernel.prior_variance;
  }

  const SurrogateKernelSpec& parameter_spec() const { return parameter_; }
  const ContextSpec& context_spec() const { return context_; }

 private:
  SurrogateKernelSpec parameter_;
  ContextSpec context_;
};

/// Moves a contextual optimizer to context `z` after checking the declared
/// bounds. Without `seed` the new slice seed must be certified by the GP.
inline void fix_context(SafeOptimizer<ContextualKernel>& optimizer, const Eigen::VectorXd& z,
                        std::optional<IndexSet> seed = std::nullopt) {
  const ContextSpec& spec = optimizer.model().kernel().context_spec();
  if (!spec.contains(z)) throw ContractViolation("context outside the declared bounds");
  optimizer.set_context(z, std::move(seed));
}

}  // namespace safeopt_mc
