#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fedclave {

enum class ErrorCode {
  // data_ingest
  kUnknownMagic,
  kTruncatedPayload,
  kDimensionMismatch,
  kMissingFile,
  kSizeMismatch,
  // heterogeneity
  kNotDivisible,
  kInsufficientData,
  kInvalidAngle,
  kInvalidScenario,
  // model
  kNonFiniteLoss,
  kEmptyInput,
  kInvalidConfig,
  kBadCheckpoint,
  // federation
  kZeroTotalWeight,
  kEmptyClass,
  // clustering
  kTooFewPoints,
  kLengthMismatch,
  kTooFewItems,
  // experiment / io
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

// All library failures surface as this exception; `code()` identifies the
// failing condition for callers that branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Configuration errors name the offending field so the CLI can report it.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(ErrorCode::kInvalidConfig, field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace fedclave
