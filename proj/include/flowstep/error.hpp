#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flowstep {

enum class ErrorKind {
  ZeroPolynomial,
  InvalidInterval,
  InvalidArgument,
  InfeasibleHhat,
  NonFiniteIterate,
  EigenFailure,
  NoConvergence,
  MissingMinimizer,
  InnerSolveFailure,
  PolicyUnavailable,
  DomainViolation,
  UnknownAlgorithm,
  InsufficientData,
  NonPositiveValue,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace flowstep
