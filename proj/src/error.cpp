#include "qwlift/error.hpp"

namespace qwlift {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DuplicateArc: return "DuplicateArc";
    case ErrorCode::RotationMismatch: return "RotationMismatch";
    case ErrorCode::Asymmetric: return "Asymmetric";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::DepthTooSmall: return "DepthTooSmall";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::SinkVertex: return "SinkVertex";
    case ErrorCode::ZeroTargetEntry: return "ZeroTargetEntry";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotPermutation: return "NotPermutation";
    case ErrorCode::NormViolation: return "NormViolation";
    case ErrorCode::StationarityMismatch: return "StationarityMismatch";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::NotStochastic: return "NotStochastic";
    case ErrorCode::LocalityViolation: return "LocalityViolation";
    case ErrorCode::NotErgodic: return "NotErgodic";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::UnitarityViolation: return "UnitarityViolation";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::InfeasibleSchedule: return "InfeasibleSchedule";
    case ErrorCode::NotMixedWithinHorizon: return "NotMixedWithinHorizon";
  }
  return "Unknown";
}

}  // namespace qwlift
