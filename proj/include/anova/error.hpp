#pragma once

#include <stdexcept>
#include <string>

namespace anova {

enum class ErrorCode {
  InvalidArgument,
  InvalidFrequency,
  DomainViolation,
  DimensionMismatch,
  LengthMismatch,
  MissingBandwidth,
  MissingThreshold,
  UnknownTerm,
  NonFinite,
  EmptySystem,
  DegenerateModel,
  UndefinedReference,
  Parse,
  Io,
  AllRepetitionsFailed,
};

// Coarse grouping used by the CLI to pick an exit code.
enum class ErrorCategory { Config, Data, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept;

 private:
  ErrorCode code_;
};

inline ErrorCategory Error::category() const noexcept {
  switch (code_) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidFrequency:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::LengthMismatch:
    case ErrorCode::MissingBandwidth:
    case ErrorCode::MissingThreshold:
    case ErrorCode::UnknownTerm:
      return ErrorCategory::Config;
    case ErrorCode::DomainViolation:
    case ErrorCode::NonFinite:
    case ErrorCode::EmptySystem:
    case ErrorCode::UndefinedReference:
    case ErrorCode::Parse:
    case ErrorCode::Io:
      return ErrorCategory::Data;
    case ErrorCode::DegenerateModel:
    case ErrorCode::AllRepetitionsFailed:
      return ErrorCategory::Numerical;
  }
  return ErrorCategory::Config;
}

}  // namespace anova
