#pragma once

#include <stdexcept>
#include <string>

namespace cengap {

enum class ErrorCode {
    parse_error,
    io_error,
    dimension_mismatch,
    non_finite_value,
    duplicate_id,
    empty_input,
    too_few_labels,
    length_mismatch,
    infeasible_spacing,
    bad_argument,
};

const char* error_code_name(ErrorCode code);

// Every failure in the library surfaces as an Error. `location` points at the
// offending input when one exists ("file:line" or a sample id), empty
// otherwise. The CLI turns these into structured JSON on stderr.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string location = {});

    ErrorCode code() const { return code_; }
    const std::string& location() const { return location_; }

private:
    ErrorCode code_;
    std::string location_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message,
                        const std::string& location = {});

}  // namespace cengap
