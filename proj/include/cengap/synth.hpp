#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>

#include "cengap/types.hpp"

namespace cengap {

// All draws come from one mt19937_64 stream; normals are produced by
// Box-Muller over the 53-bit uniform recipe, so the same seed reproduces the
// same bytes on every platform (std::normal_distribution is not portable).
class PortableRng {
public:
    explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1), 53 bits.
    double next_unit();

    // Standard normal. Pairs are generated together; the second variate is
    // cached and returned by the following call.
    double next_normal();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct SynthConfig {
    std::size_t dimensionality = 8;
    std::size_t known_classes = 8;
    std::size_t unknown_classes = 3;
    std::size_t train_per_class = 200;
    std::size_t validation_per_class = 50;
    std::size_t test_per_class = 50;
    double cluster_stddev = 1.0;
    double center_spacing = 6.0;  // minimum pairwise distance between class means
    std::uint64_t seed = 1;
    // This fraction of known classes (the highest-numbered ones) is generated
    // with a reduced training count: min(100, max(1, train_per_class / 10)).
    double rare_class_fraction = 0.0;
};

struct SynthResult {
    Dataset train;
    Dataset validation;
    Dataset test;
    std::set<std::string> unknown_labels;
};

void validate_synth_config(const SynthConfig& config);

// Gaussian clusters around means placed by rejection sampling inside a
// hypercube of side 10 * center_spacing (at most 10,000 attempts per mean,
// then infeasible_spacing). Known classes are labeled known_###, unknown
// classes novel_### and appear only in validation and test. Generation order
// is fixed: all means first (known then unknown), then samples split by
// split (train, validation, test), class by class, component by component --
// the same config always yields byte-identical datasets.
SynthResult generate(const SynthConfig& config);

}  // namespace cengap
