#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cengap {

enum class SplitRole { train, validation, test };

const char* split_role_name(SplitRole role);
SplitRole split_role_from_name(const std::string& name);

// One labeled embedding vector. `label` is the ground-truth type name.
struct FeatureSample {
    std::string id;
    std::string label;
    std::vector<double> vector;
};

// Sample order is stable and preserved from input; every downstream result is
// reported in this order.
struct Dataset {
    std::vector<FeatureSample> samples;
    std::size_t dimensionality = 0;
    SplitRole role = SplitRole::train;

    std::size_t size() const { return samples.size(); }
};

// Throws unless the dataset is non-empty, every vector matches the declared
// dimensionality with finite components, and every label is non-empty.
void validate_dataset(const Dataset& data);

}  // namespace cengap
