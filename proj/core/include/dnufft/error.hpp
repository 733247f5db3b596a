#pragma once

#include <stdexcept>
#include <string>

namespace dnufft {

enum class ErrorCode {
  InvalidArgument,
  ToleranceOutOfRange,
  PositionOutOfDomain,
  NonFiniteValue,
  WidthMismatch,
  StaleHalo,
  IndexOverflow,
  DeconvolutionUnstable,
  DecompositionInvalid,
  MessageMismatch,
  CostCapExceeded,
  ParseError,
  BackendFailure,
};

const char* to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. Carries a
/// machine-readable code next to the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const char* what) {
  if (!cond) [[unlikely]] fail(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) [[unlikely]] fail(code, what);
}

}  // namespace dnufft
