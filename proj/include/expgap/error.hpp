#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace expgap {

enum class ErrorCode {
  kEmptyEpisode,
  kNonTerminal,
  kOutOfOrderEpisode,
  kNoEpisodes,
  kTooFewEpisodes,
  kEmptyPool,
  kEarlyTermination,
  kDeterminismViolation,
  kInvalidGamma,
  kAllTasksInvalid,
  kEmptyInput,
  kInvalidSpec,
  kSteppedTerminal,
  kInvalidAction,
  kTooLargeToEnumerate,
  kSchemaError,
  kVersionUnsupported,
  kNonMonotoneIds,
  kNaNReward,
  kIoFailure,
  kConfigError,
};

const char* error_code_name(ErrorCode code);

// Every module reports faults through this one exception type; callers switch
// on code() when they need to distinguish kinds.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised by log ingestion; carries the 1-based line number and offending field.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, std::string field, const std::string& detail,
              ErrorCode code = ErrorCode::kSchemaError);

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// Replay divergence; step() is the 0-based step where the mismatch surfaced.
class ReplayError : public Error {
 public:
  ReplayError(ErrorCode code, std::size_t step, const std::string& detail);

  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace expgap
