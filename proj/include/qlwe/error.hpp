#pragma once

#include <stdexcept>
#include <string>

namespace qlwe {

enum class ErrorCode {
  ZeroInverse,
  SingularMatrix,
  InvalidModulus,
  InvalidLength,
  InvalidArgument,
  BoundTooLarge,
  DuplicateInput,
  DegenerateTest,
  TestSourceExhausted,
  InfeasibleParameters,
  EmptyResult,
  ConfigError,
  IoError,
  ParseError,
  InvariantViolation,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI exit-code mapping) can branch on the kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroInverse: return "ZeroInverse";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::InvalidModulus: return "InvalidModulus";
    case ErrorCode::InvalidLength: return "InvalidLength";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BoundTooLarge: return "BoundTooLarge";
    case ErrorCode::DuplicateInput: return "DuplicateInput";
    case ErrorCode::DegenerateTest: return "DegenerateTest";
    case ErrorCode::TestSourceExhausted: return "TestSourceExhausted";
    case ErrorCode::InfeasibleParameters: return "InfeasibleParameters";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

}  // namespace qlwe
