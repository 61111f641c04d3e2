#pragma once

#include <stdexcept>
#include <string>

namespace xwgen {

enum class ErrorCode {
  EmptyInput,
  RaggedRows,
  IllegalCharacter,
  ExhaustedAttempts,
  Unmappable,
  TooShort,
  ParseError,
  ExtractorUnavailable,
  OffsetOutOfRange,
  SentenceTooShort,
  AnswerLeak,
  InvalidConfig,
  InstanceTooLarge,
  MissingEntry,
  SchemaMismatch,
  Io,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::IllegalCharacter: return "IllegalCharacter";
    case ErrorCode::ExhaustedAttempts: return "ExhaustedAttempts";
    case ErrorCode::Unmappable: return "Unmappable";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ExtractorUnavailable: return "ExtractorUnavailable";
    case ErrorCode::OffsetOutOfRange: return "OffsetOutOfRange";
    case ErrorCode::SentenceTooShort: return "SentenceTooShort";
    case ErrorCode::AnswerLeak: return "AnswerLeak";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::MissingEntry: return "MissingEntry";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// All library failures are reported as an Error carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace xwgen
