#pragma once

#include <stdexcept>
#include <string>

namespace optosync {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

class InsufficientData : public Error {
public:
  using Error::Error;
};

/// A covariance matrix whose synchronization denominator is negative.
class NonphysicalCovariance : public Error {
public:
  using Error::Error;
};

class NumericalFailure : public Error {
public:
  using Error::Error;
};

/// Drift matrix with an eigenvalue of non-negative real part.
class UnstableSystem : public Error {
public:
  using Error::Error;
};

class DegenerateSystem : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

/// Raised when an integrator meets a non-finite value. `time()` is the
/// start of the step that produced it.
class IntegrationDiverged : public Error {
public:
  IntegrationDiverged(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

private:
  double time_;
};

} // namespace optosync
