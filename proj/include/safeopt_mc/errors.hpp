#pragma once

#include <stdexcept>
#include <string>

namespace safeopt_mc {

/// Precondition on an argument was not met (dimension mismatch, bad range, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A linear system could not be factorized even after the jitter retry.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Candidate set G_n ∪ M_n was empty when a selection was requested.
class NoCandidatesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No parameter of a context slice could be certified safe.
class NoSafeSeedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration. `field()` names the offending key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace safeopt_mc
