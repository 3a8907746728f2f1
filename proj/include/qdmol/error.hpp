#pragma once

#include <stdexcept>
#include <string>

namespace qdmol {

enum class ErrorCode {
  kInvalidArgument = 1,
  kConfig,
  kGridTooSmall,
  kNoConvergence,
  kDegenerateSplitting,
  kOverlappingSupport,
  kStepTooLarge,
  kZeroCoupling,
  kInsufficientSplitting,
  kAddressingCollision,
  kGridMismatch,
  kQuadratureUnconverged,
  kIo,
};

const char* to_string(ErrorCode code);

// Every failure surfaced by the library. `field` names the offending input
// where there is one (config key, geometry member, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

  // Numerical failures map to exit status 3, input problems to 2.
  bool is_numerical() const noexcept;

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace qdmol
