#include "cengap/error.hpp"

namespace cengap {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::parse_error: return "parse_error";
        case ErrorCode::io_error: return "io_error";
        case ErrorCode::dimension_mismatch: return "dimension_mismatch";
        case ErrorCode::non_finite_value: return "non_finite_value";
        case ErrorCode::duplicate_id: return "duplicate_id";
        case ErrorCode::empty_input: return "empty_input";
        case ErrorCode::too_few_labels: return "too_few_labels";
        case ErrorCode::length_mismatch: return "length_mismatch";
        case ErrorCode::infeasible_spacing: return "infeasible_spacing";
        case ErrorCode::bad_argument: return "bad_argument";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::string location)
    : std::runtime_error(location.empty() ? message : message + " (" + location + ")"),
      code_(code),
      location_(std::move(location)) {}

void raise(ErrorCode code, const std::string& message, const std::string& location) {
    throw Error(code, message, location);
}

}  // namespace cengap
