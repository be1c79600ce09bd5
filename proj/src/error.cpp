#include "flowstep/error.hpp"

namespace flowstep {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorKind::InvalidInterval: return "InvalidInterval";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InfeasibleHhat: return "InfeasibleHhat";
    case ErrorKind::NonFiniteIterate: return "NonFiniteIterate";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::MissingMinimizer: return "MissingMinimizer";
    case ErrorKind::InnerSolveFailure: return "InnerSolveFailure";
    case ErrorKind::PolicyUnavailable: return "PolicyUnavailable";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::UnknownAlgorithm: return "UnknownAlgorithm";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NonPositiveValue: return "NonPositiveValue";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace flowstep
