#include "qdmol/error.hpp"

namespace qdmol {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kConfig: return "config-error";
    case ErrorCode::kGridTooSmall: return "grid-too-small";
    case ErrorCode::kNoConvergence: return "no-convergence";
    case ErrorCode::kDegenerateSplitting: return "degenerate-splitting";
    case ErrorCode::kOverlappingSupport: return "overlapping-support";
    case ErrorCode::kStepTooLarge: return "step-too-large";
    case ErrorCode::kZeroCoupling: return "zero-coupling";
    case ErrorCode::kInsufficientSplitting: return "insufficient-splitting";
    case ErrorCode::kAddressingCollision: return "addressing-collision";
    case ErrorCode::kGridMismatch: return "grid-mismatch";
    case ErrorCode::kQuadratureUnconverged: return "quadrature-unconverged";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

bool Error::is_numerical() const noexcept {
  switch (code_) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kConfig:
    case ErrorCode::kGridTooSmall:
    case ErrorCode::kIo:
      return false;
    default:
      return true;
  }
}

}  // namespace qdmol
