#pragma once

#include <stdexcept>
#include <string>

namespace trussprec {

enum class ErrorCode {
  kInvalidInput,
  kParse,
  kDegenerateFace,
  kZeroLengthElement,
  kDimensionMismatch,
  kVertexInNoFace,
  kNotSpanning,
  kNotConnected,
  kNotStifflyConnected,
  kDisconnected,
  kNotPlanar,
  kBadK,
  kNotPsd,
  kRhsNotInRange,
  kNaNDetected,
  kTooLargeForDense,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kDegenerateFace: return "DegenerateFace";
    case ErrorCode::kZeroLengthElement: return "ZeroLengthElement";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kVertexInNoFace: return "VertexInNoFace";
    case ErrorCode::kNotSpanning: return "NotSpanning";
    case ErrorCode::kNotConnected: return "NotConnected";
    case ErrorCode::kNotStifflyConnected: return "NotStifflyConnected";
    case ErrorCode::kDisconnected: return "Disconnected";
    case ErrorCode::kNotPlanar: return "NotPlanar";
    case ErrorCode::kBadK: return "BadK";
    case ErrorCode::kNotPsd: return "NotPSD";
    case ErrorCode::kRhsNotInRange: return "RhsNotInRange";
    case ErrorCode::kNaNDetected: return "NaNDetected";
    case ErrorCode::kTooLargeForDense: return "TooLargeForDense";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace trussprec
