#include "voebench/error.hpp"

namespace voebench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SpawnCollision: return "SpawnCollision";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::NoValidSplice: return "NoValidSplice";
    case ErrorCode::WindowViolation: return "WindowViolation";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingMovie: return "MissingMovie";
    case ErrorCode::DuplicateMovie: return "DuplicateMovie";
    case ErrorCode::NonFiniteScore: return "NonFiniteScore";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::VerifyFailure: return "VerifyFailure";
  }
  return "Error";
}

}  // namespace voebench
