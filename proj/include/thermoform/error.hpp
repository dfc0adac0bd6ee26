#ifndef THERMOFORM_ERROR_HPP
#define THERMOFORM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace thermoform {

/// Machine-readable failure categories. The CLI prints the code name
/// followed by the human message on a single line.
enum class ErrorCode {
  ParseError,
  NotMixing,
  InvalidArgument,
  TooLarge,
  NotConverged,
  SearchExhausted,
  HypothesisViolated,
  EmptyResult,
  IoError,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace thermoform

#endif  // THERMOFORM_ERROR_HPP
