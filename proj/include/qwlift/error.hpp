#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qwlift {

enum class ErrorCode {
  // input / usage
  OutOfRange,
  DuplicateArc,
  RotationMismatch,
  Asymmetric,
  SelfLoop,
  Disconnected,
  DepthTooSmall,
  LengthMismatch,
  DimMismatch,
  SinkVertex,
  ZeroTargetEntry,
  InvalidArgument,
  NotPermutation,
  NormViolation,
  StationarityMismatch,
  TooLarge,
  ParseError,
  ValidationError,
  // numeric
  NegativeProbability,
  NotStochastic,
  LocalityViolation,
  NotErgodic,
  NoConvergence,
  UnitarityViolation,
  EigenFailure,
  InfeasibleSchedule,
  NotMixedWithinHorizon,
};

enum class ErrorCategory { Input, Numeric };

constexpr ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeProbability:
    case ErrorCode::NotStochastic:
    case ErrorCode::LocalityViolation:
    case ErrorCode::NotErgodic:
    case ErrorCode::NoConvergence:
    case ErrorCode::UnitarityViolation:
    case ErrorCode::EigenFailure:
    case ErrorCode::InfeasibleSchedule:
    case ErrorCode::NotMixedWithinHorizon:
      return ErrorCategory::Numeric;
    default:
      return ErrorCategory::Input;
  }
}

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace qwlift
