#include "thermoform/error.hpp"

namespace thermoform {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return "E_PARSE";
    case ErrorCode::NotMixing: return "E_NOT_MIXING";
    case ErrorCode::InvalidArgument: return "E_INVALID_ARGUMENT";
    case ErrorCode::TooLarge: return "E_TOO_LARGE";
    case ErrorCode::NotConverged: return "E_NOT_CONVERGED";
    case ErrorCode::SearchExhausted: return "E_SEARCH_EXHAUSTED";
    case ErrorCode::HypothesisViolated: return "E_HYPOTHESIS";
    case ErrorCode::EmptyResult: return "E_EMPTY_RESULT";
    case ErrorCode::IoError: return "E_IO";
  }
  return "E_UNKNOWN";
}

}  // namespace thermoform
