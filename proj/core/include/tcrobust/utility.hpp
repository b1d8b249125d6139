#pragma once

#include <string>

namespace tcr {

/// Utility on (0, inf): log or power x^alpha / alpha with alpha in (0, 1).
class Utility {
 public:
  enum class Kind { Log, Power };

  static Utility log();
  static Utility power(double alpha);

  Kind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  std::string name() const;

  /// U(x); DomainError for x <= 0 (x = 0 is allowed for power).
  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  /// limsup x U'(x) / U(x): 0 for log, alpha for power.
  double asymptotic_elasticity() const noexcept;
  /// inf {x > 0 : U(x) >= 0}: 1 for log, 0 for power.
  double zero_crossing() const noexcept;
  /// J(y) = sup_x (U(x) - x y) for y > 0.
  double conjugate(double y) const;

 private:
  Utility(Kind kind, double alpha) : kind_(kind), alpha_(alpha) {}

  Kind kind_;
  double alpha_;
};

}  // namespace tcr
