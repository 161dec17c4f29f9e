#pragma once

#include <stdexcept>
#include <string>

namespace topostat {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  Validation,
  Dimension,
  Numeric,
  Singular,
  Convergence,
  Io,
  Config,
};

// All failures surface as Error; the message starts with a short failure name
// (e.g. "MissingFace: ...") so callers and tests can match on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace topostat
