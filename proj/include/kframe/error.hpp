#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kframe {

enum class ErrorCode {
  InvalidArgument,
  NonFinite,
  DimensionMismatch,
  NonSquare,
  AsymmetricInput,
  NotPSD,
  ConvergenceFailure,
  IterationCapExceeded,
  LengthMismatch,
  NotKsFrame,
  NotCommuting,
  NotCoisometry,
  SingularT,
  NotProjection,
  InfeasiblePiece,
  BadIndexSet,
  PreconditionFailed,
  NotUnitary,
  IntertwiningFailed,
  NotKps,
  NotCoercive,
  NotSymmetric,
  MaxIterExceeded,
  SingularFrameOperator,
  ZeroTarget,
  IoError,
  SyntaxError,
  SchemaError,
  UsageError,
};

// Input errors mean the data cannot be checked as given; numerical errors mean
// an algorithm failed to deliver on valid data.
enum class ErrorKind { Input, Numerical };

std::string_view to_string(ErrorCode code) noexcept;
ErrorKind kind_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_of(code_); }

 private:
  ErrorCode code_;
};

// Thrown by the projected fixed-point solver when the cap is hit. Carries the
// a-posteriori distance bound to the true fixed point.
class MaxIterError : public Error {
 public:
  MaxIterError(int iterations, double last_step_norm, double error_bound);

  int iterations() const noexcept { return iterations_; }
  double last_step_norm() const noexcept { return last_step_norm_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  int iterations_;
  double last_step_norm_;
  double error_bound_;
};

}  // namespace kframe
