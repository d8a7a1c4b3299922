#pragma once

#include <stdexcept>
#include <string>

namespace dpilab {

// Argument outside the mathematical domain of an operation (negative
// divergence, frequency outside [-1/2, 1/2], non-PD covariance, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical procedure did not reach its target accuracy.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved_tolerance)
      : std::runtime_error(what + " (achieved tolerance " + std::to_string(achieved_tolerance) + ")"),
        achieved_tolerance_(achieved_tolerance) {}

  double achieved_tolerance() const noexcept { return achieved_tolerance_; }

 private:
  double achieved_tolerance_;
};

// A constructed object would break one of its stated invariants.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The requested computation has no oracle in this library.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed experiment configuration. The message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dpilab
