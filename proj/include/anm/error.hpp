#pragma once

#include <stdexcept>
#include <string>

namespace anm {

enum class ErrorCode {
  invalid_argument,
  cycle,
  duplicate_edge,
  self_loop,
  dimension_too_large,
  dimension_mismatch,
  too_few_points,
  degenerate_x,
  shape_mismatch,
  target_unreachable,
  parse_error,
  empty_file,
  empty_experiment,
  missing_metadata,
  io_error,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::cycle: return "CycleError";
    case ErrorCode::duplicate_edge: return "DuplicateEdge";
    case ErrorCode::self_loop: return "SelfLoop";
    case ErrorCode::dimension_too_large: return "DimensionTooLarge";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::too_few_points: return "TooFewPoints";
    case ErrorCode::degenerate_x: return "DegenerateX";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::target_unreachable: return "TargetUnreachable";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::empty_file: return "EmptyFile";
    case ErrorCode::empty_experiment: return "EmptyExperiment";
    case ErrorCode::missing_metadata: return "MissingMetadata";
    case ErrorCode::io_error: return "IOError";
  }
  return "Error";
}

}  // namespace anm
