#include "fedclave/errors.hpp"

namespace fedclave {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownMagic: return "UnknownMagic";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kSizeMismatch: return "SizeMismatch";
    case ErrorCode::kNotDivisible: return "NotDivisible";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kInvalidAngle: return "InvalidAngle";
    case ErrorCode::kInvalidScenario: return "InvalidScenario";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kBadCheckpoint: return "BadCheckpoint";
    case ErrorCode::kZeroTotalWeight: return "ZeroTotalWeight";
    case ErrorCode::kEmptyClass: return "EmptyClass";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kTooFewItems: return "TooFewItems";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace fedclave
