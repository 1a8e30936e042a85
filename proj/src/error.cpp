#include "kframe/error.hpp"

#include <cstdio>

namespace kframe {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::AsymmetricInput: return "AsymmetricInput";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::IterationCapExceeded: return "IterationCapExceeded";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotKsFrame: return "NotKsFrame";
    case ErrorCode::NotCommuting: return "NotCommuting";
    case ErrorCode::NotCoisometry: return "NotCoisometry";
    case ErrorCode::SingularT: return "SingularT";
    case ErrorCode::NotProjection: return "NotProjection";
    case ErrorCode::InfeasiblePiece: return "InfeasiblePiece";
    case ErrorCode::BadIndexSet: return "BadIndexSet";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::IntertwiningFailed: return "IntertwiningFailed";
    case ErrorCode::NotKps: return "NotKps";
    case ErrorCode::NotCoercive: return "NotCoercive";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::SingularFrameOperator: return "SingularFrameOperator";
    case ErrorCode::ZeroTarget: return "ZeroTarget";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

ErrorKind kind_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConvergenceFailure:
    case ErrorCode::IterationCapExceeded:
    case ErrorCode::MaxIterExceeded:
      return ErrorKind::Numerical;
    default:
      return ErrorKind::Input;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

namespace {

std::string max_iter_message(int iterations, double step, double bound) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "no convergence after %d iterations (last step %.3e, distance to fixed point <= %.3e)",
                iterations, step, bound);
  return buf;
}

}  // namespace

MaxIterError::MaxIterError(int iterations, double last_step_norm, double error_bound)
    : Error(ErrorCode::MaxIterExceeded, max_iter_message(iterations, last_step_norm, error_bound)),
      iterations_(iterations),
      last_step_norm_(last_step_norm),
      error_bound_(error_bound) {}

}  // namespace kframe
