#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cflow {

enum class ErrorKind {
  InvalidArgument,
  NonPositive,
  NonConvex,
  AsymmetricData,
  GridMismatch,
  ClosureViolated,
  NonConvexSolution,
  OptimizationFailed,
  ConvexityLost,
  StepUnderflow,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Every failure in the library surfaces as a GeomError carrying its kind.
class GeomError : public std::runtime_error {
 public:
  GeomError(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cflow
