#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wfpl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration (odd cell counts, unknown keys, bad selectors).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A ProblemSpec that breaks one of the standing assumptions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at a point where a kernel blows up.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Caller broke a precondition that is not a plain domain restriction
/// (mismatched grids, non-positive inputs where positivity is required).
class ContractError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::size_t first, std::size_t second)
      : Error(what), first_(first), second_(second) {}
  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

 private:
  std::size_t first_;
  std::size_t second_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

/// A property the algorithm guarantees by construction failed to hold.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Raised when an inequality that must hold with constant one fails.
class InequalityViolation : public Error {
 public:
  InequalityViolation(const std::string& what, std::vector<double> witness)
      : Error(what), witness_(std::move(witness)) {}
  const std::vector<double>& witness() const noexcept { return witness_; }

 private:
  std::vector<double> witness_;
};

}  // namespace wfpl
