#pragma once

#include <stdexcept>
#include <string>

namespace bfgp {

enum class ErrorCode {
  malformed_instance,
  parse_error,
  untranslatable,
  not_a_solution,
  malformed_encoding,
  length_mismatch,
  unknown_function,
  unknown_domain,
  invalid_size,
  malformed_program,
  usage,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed_instance: return "malformed-instance";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::untranslatable: return "untranslatable";
    case ErrorCode::not_a_solution: return "not-a-solution";
    case ErrorCode::malformed_encoding: return "malformed-encoding";
    case ErrorCode::length_mismatch: return "length-mismatch";
    case ErrorCode::unknown_function: return "unknown-function";
    case ErrorCode::unknown_domain: return "unknown-domain";
    case ErrorCode::invalid_size: return "invalid-size";
    case ErrorCode::malformed_program: return "malformed-program";
    case ErrorCode::usage: return "usage";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bfgp
