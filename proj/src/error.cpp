#include "expgap/error.hpp"

#include <utility>

namespace expgap {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyEpisode: return "EmptyEpisode";
    case ErrorCode::kNonTerminal: return "NonTerminal";
    case ErrorCode::kOutOfOrderEpisode: return "OutOfOrderEpisode";
    case ErrorCode::kNoEpisodes: return "NoEpisodes";
    case ErrorCode::kTooFewEpisodes: return "TooFewEpisodes";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kEarlyTermination: return "EarlyTermination";
    case ErrorCode::kDeterminismViolation: return "DeterminismViolation";
    case ErrorCode::kInvalidGamma: return "InvalidGamma";
    case ErrorCode::kAllTasksInvalid: return "AllTasksInvalid";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kSteppedTerminal: return "SteppedTerminal";
    case ErrorCode::kInvalidAction: return "InvalidAction";
    case ErrorCode::kTooLargeToEnumerate: return "TooLargeToEnumerate";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kVersionUnsupported: return "VersionUnsupported";
    case ErrorCode::kNonMonotoneIds: return "NonMonotoneIds";
    case ErrorCode::kNaNReward: return "NaNReward";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

SchemaError::SchemaError(std::size_t line, std::string field, const std::string& detail,
                         ErrorCode code)
    : Error(code, "line " + std::to_string(line) + ", field '" + field + "': " + detail),
      line_(line),
      field_(std::move(field)) {}

ReplayError::ReplayError(ErrorCode code, std::size_t step, const std::string& detail)
    : Error(code, "step " + std::to_string(step) + ": " + detail), step_(step) {}

}  // namespace expgap
