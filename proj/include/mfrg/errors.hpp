#pragma once

#include <stdexcept>
#include <string>

namespace mfrg {

/// Caller violated a precondition (mismatched jet orders, bad parameter range...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A parameter lies outside the mathematical domain of an evaluator.
class DomainError : public UsageError {
 public:
  using UsageError::UsageError;
};

/// Arithmetic produced a non-finite value, a singular division, or a quadrature
/// failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw UsageError(what);
}

}  // namespace detail
}  // namespace mfrg
