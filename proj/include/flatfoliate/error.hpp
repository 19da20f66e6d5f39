#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flatfoliate {

enum class ErrorCode {
  ZeroVector,
  DimensionMismatch,
  DegenerateConfiguration,
  AntipodalPair,
  NonGenericProbe,
  TypeMismatch,
  InvalidCounts,
  TooFewQuasisections,
  NotAntipodal,
  NotAFace,
  MTooSmall,
  AmbiguousNu,
  FaceMismatch,
  NonCommuting,
  NotSpecialLinear,
  GenericityExhausted,
  EmptySet,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::AntipodalPair: return "AntipodalPair";
    case ErrorCode::NonGenericProbe: return "NonGenericProbe";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::InvalidCounts: return "InvalidCounts";
    case ErrorCode::TooFewQuasisections: return "TooFewQuasisections";
    case ErrorCode::NotAntipodal: return "NotAntipodal";
    case ErrorCode::NotAFace: return "NotAFace";
    case ErrorCode::MTooSmall: return "MTooSmall";
    case ErrorCode::AmbiguousNu: return "AmbiguousNu";
    case ErrorCode::FaceMismatch: return "FaceMismatch";
    case ErrorCode::NonCommuting: return "NonCommuting";
    case ErrorCode::NotSpecialLinear: return "NotSpecialLinear";
    case ErrorCode::GenericityExhausted: return "GenericityExhausted";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this type; `code()`
/// identifies the contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace flatfoliate
