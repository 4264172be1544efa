#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace irisforge {

enum class ErrorCode {
  file_not_found,
  unsupported_format,
  corrupt_stream,
  io_failure,
  dimension_mismatch,
  invalid_argument,
  empty_input,
  mask_too_small,
  no_circle_found,
  kernel_too_large,
  shape_mismatch,
  insufficient_overlap,
  parse_error,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::file_not_found: return "file_not_found";
    case ErrorCode::unsupported_format: return "unsupported_format";
    case ErrorCode::corrupt_stream: return "corrupt_stream";
    case ErrorCode::io_failure: return "io_failure";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::mask_too_small: return "mask_too_small";
    case ErrorCode::no_circle_found: return "no_circle_found";
    case ErrorCode::kernel_too_large: return "kernel_too_large";
    case ErrorCode::shape_mismatch: return "shape_mismatch";
    case ErrorCode::insufficient_overlap: return "insufficient_overlap";
    case ErrorCode::parse_error: return "parse_error";
  }
  return "unknown";
}

/// Every failure in the library is reported as an Error carrying a code the
/// caller can switch on; what() holds the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& detail) {
  if (!condition) throw Error(code, detail);
}

}  // namespace irisforge
