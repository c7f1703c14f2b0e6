#include "cflow/errors.hpp"

namespace cflow {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonPositive: return "NonPositive";
    case ErrorKind::NonConvex: return "NonConvex";
    case ErrorKind::AsymmetricData: return "AsymmetricData";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::ClosureViolated: return "ClosureViolated";
    case ErrorKind::NonConvexSolution: return "NonConvexSolution";
    case ErrorKind::OptimizationFailed: return "OptimizationFailed";
    case ErrorKind::ConvexityLost: return "ConvexityLost";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

GeomError::GeomError(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace cflow
