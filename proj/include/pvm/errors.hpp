#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pvm {

enum class ErrorCode {
  SignatureMismatch,
  Degenerate,
  DimensionMismatch,
  ClusterAmbiguity,
  SamplerExhausted,
  SymmetryConflict,
  BianchiViolation,
  NotDecomposable,
  SyntaxError,
  UnknownIdentifier,
  VariableOutOfRange,
  DomainError,
  BadParameter,
  InsufficientSamples,
  ZeroCurvature,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code is the
/// stable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with the byte offset into the source text.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& what)
      : Error(ErrorCode::SyntaxError, what + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ClusterAmbiguity: return "ClusterAmbiguity";
    case ErrorCode::SamplerExhausted: return "SamplerExhausted";
    case ErrorCode::SymmetryConflict: return "SymmetryConflict";
    case ErrorCode::BianchiViolation: return "BianchiViolation";
    case ErrorCode::NotDecomposable: return "NotDecomposable";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::VariableOutOfRange: return "VariableOutOfRange";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::ZeroCurvature: return "ZeroCurvature";
  }
  return "Unknown";
}

}  // namespace pvm
