#ifndef MISCAL_ERROR_HPP
#define MISCAL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace miscal {

enum class ErrorCode {
  NotARotation,
  NoConvergence,
  BehindCamera,
  BehindPlane,
  DegenerateBaseline,
  SizeMismatch,
  NoValidRect,
  ZeroThreshold,
  EmptyMatches,
  LengthMismatch,
  DegenerateInput,
  MissingIds,
  InvalidConfig,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures are reported through this one exception type; callers
// dispatch on code() (the CLI maps IoError to exit status 2, the rest to 1).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace miscal

#endif  // MISCAL_ERROR_HPP
