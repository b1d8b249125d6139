#include "tcrobust/utility.hpp"

#include <cmath>
#include <sstream>

#include "tcrobust/errors.hpp"

namespace tcr {

Utility Utility::log() { return {Kind::Log, 0.0}; }

Utility Utility::power(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("power utility: alpha must lie in (0, 1)");
  return {Kind::Power, alpha};
}

std::string Utility::name() const {
  if (kind_ == Kind::Log) return "log";
  std::ostringstream s;
  s << "power(" << alpha_ << ")";
  return s.str();
}

double Utility::value(double x) const {
  if (kind_ == Kind::Log) {
    if (!(x > 0.0)) throw DomainError("log utility: wealth must be positive");
    return std::log(x);
  }
  if (!(x >= 0.0)) throw DomainError("power utility: wealth must be nonnegative");
  return std::pow(x, alpha_) / alpha_;
}

double Utility::derivative(double x) const {
  if (!(x > 0.0)) throw DomainError("utility derivative: wealth must be positive");
  return kind_ == Kind::Log ? 1.0 / x : std::pow(x, alpha_ - 1.0);
}

double Utility::second_derivative(double x) const {
  if (!(x > 0.0)) throw DomainError("utility derivative: wealth must be positive");
  return kind_ == Kind::Log ? -1.0 / (x * x) : (alpha_ - 1.0) * std::pow(x, alpha_ - 2.0);
}

double Utility::asymptotic_elasticity() const noexcept { return kind_ == Kind::Log ? 0.0 : alpha_; }

double Utility::zero_crossing() const noexcept { return kind_ == Kind::Log ? 1.0 : 0.0; }

double Utility::conjugate(double y) const {
  if (!(y > 0.0)) throw DomainError("utility conjugate: y must be positive");
  if (kind_ == Kind::Log) return -std::log(y) - 1.0;
  // Maximizer x = y^{-1/(1-alpha)}.
  const double q = alpha_ / (1.0 - alpha_);
  return (1.0 - alpha_) / alpha_ * std::pow(y, -q);
}

}  // namespace tcr
