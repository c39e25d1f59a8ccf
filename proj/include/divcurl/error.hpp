#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace divcurl {

enum class ErrorCode {
  UnsupportedDimension,
  InvalidOrder,
  DomainViolation,
  EmptyGrid,
  InvalidCapRadius,
  InvalidExponent,
  InvalidDelta,
  MissingGradient,
  InconsistentGrid,
  ExponentOutOfRange,
  InvalidExponentPair,
  InsufficientData,
  DegenerateFamily,
  SupportViolation,
  NonCoercive,
  UnknownExperiment,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-checkable error code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::InvalidCapRadius: return "InvalidCapRadius";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::InvalidDelta: return "InvalidDelta";
    case ErrorCode::MissingGradient: return "MissingGradient";
    case ErrorCode::InconsistentGrid: return "InconsistentGrid";
    case ErrorCode::ExponentOutOfRange: return "ExponentOutOfRange";
    case ErrorCode::InvalidExponentPair: return "InvalidExponentPair";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateFamily: return "DegenerateFamily";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::NonCoercive: return "NonCoercive";
    case ErrorCode::UnknownExperiment: return "UnknownExperiment";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace divcurl
