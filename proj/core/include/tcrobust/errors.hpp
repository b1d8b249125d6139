#pragma once

#include <stdexcept>
#include <string>

namespace tcr {

/// Argument outside the mathematical domain of an operation (time outside
/// [0, T], nonpositive wealth under a utility, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A documented precondition on the inputs was not met (non-increasing
/// integrator, non-adapted process, unverified dual, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input document. `field()` is the dotted path of the offending
/// field, e.g. `scenarios.probabilities`.
class SpecError : public std::runtime_error {
 public:
  SpecError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// The market does not satisfy the hypotheses needed by a solver (no
/// consistent price system at the reference cost level).
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tcr
