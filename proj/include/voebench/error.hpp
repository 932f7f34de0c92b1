#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace voebench {

enum class ErrorCode {
  SpawnCollision,
  OutOfBounds,
  NoValidSplice,
  WindowViolation,
  IoFailure,
  ConfigError,
  ParseError,
  MissingMovie,
  DuplicateMovie,
  NonFiniteScore,
  EmptyInput,
  VerifyFailure,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// 2 for filesystem problems, 1 for everything a user can fix in their inputs.
  int exit_status() const noexcept { return code_ == ErrorCode::IoFailure ? 2 : 1; }

 private:
  ErrorCode code_;
};

}  // namespace voebench
