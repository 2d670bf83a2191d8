#include "cengap/types.hpp"

#include <cmath>

#include "cengap/error.hpp"

namespace cengap {

const char* split_role_name(SplitRole role) {
    switch (role) {
        case SplitRole::train: return "train";
        case SplitRole::validation: return "validation";
        case SplitRole::test: return "test";
    }
    return "unknown";
}

SplitRole split_role_from_name(const std::string& name) {
    if (name == "train") return SplitRole::train;
    if (name == "validation") return SplitRole::validation;
    if (name == "test") return SplitRole::test;
    raise(ErrorCode::bad_argument, "unknown split role: " + name);
}

void validate_dataset(const Dataset& data) {
    if (data.samples.empty()) {
        raise(ErrorCode::empty_input, "dataset has no samples");
    }
    if (data.dimensionality == 0) {
        raise(ErrorCode::bad_argument, "dataset dimensionality must be positive");
    }
    for (const auto& sample : data.samples) {
        if (sample.label.empty()) {
            raise(ErrorCode::bad_argument, "sample has an empty label", sample.id);
        }
        if (sample.vector.size() != data.dimensionality) {
            raise(ErrorCode::dimension_mismatch,
                  "vector length " + std::to_string(sample.vector.size()) +
                      " does not match dataset dimensionality " +
                      std::to_string(data.dimensionality),
                  sample.id);
        }
        for (double v : sample.vector) {
            if (!std::isfinite(v)) {
                raise(ErrorCode::non_finite_value, "vector contains a non-finite value",
                      sample.id);
            }
        }
    }
}

}  // namespace cengap
