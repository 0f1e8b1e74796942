#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xyzmap {

enum class ErrorCode {
  kDimensionMismatch,
  kNonPositiveDepth,
  kInvalidValue,
  kInvalidCamera,
  kInvalidArgument,
  kEmptyMask,
  kEmptyPairSet,
  kInvalidEndpoint,
  kDegenerateScale,
  kTooFewPoints,
  kDegenerateGroundTruth,
  kEmptySet,
  kInvalidResolution,
  kGenerationFailed,
  kEmptyScene,
  kDegenerateRay,
  kMalformedHeader,
  kTruncatedPayload,
  kMissingPrediction,
  kIoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::kInvalidValue: return "InvalidValue";
    case ErrorCode::kInvalidCamera: return "InvalidCamera";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kEmptyPairSet: return "EmptyPairSet";
    case ErrorCode::kInvalidEndpoint: return "InvalidEndpoint";
    case ErrorCode::kDegenerateScale: return "DegenerateScale";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kDegenerateGroundTruth: return "DegenerateGT";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kInvalidResolution: return "InvalidResolution";
    case ErrorCode::kGenerationFailed: return "GenerationFailed";
    case ErrorCode::kEmptyScene: return "EmptyScene";
    case ErrorCode::kDegenerateRay: return "DegenerateRay";
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kMissingPrediction: return "MissingPrediction";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code, so
/// callers can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace xyzmap
