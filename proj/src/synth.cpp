#include "cengap/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "cengap/core.hpp"
#include "cengap/error.hpp"

namespace cengap {

double PortableRng::next_unit() {
    // Top 53 bits of the engine output over 2^53.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PortableRng::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = next_unit();
    while (u1 == 0.0) u1 = next_unit();  // log(0) guard
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

void validate_synth_config(const SynthConfig& config) {
    if (config.dimensionality < 1) {
        raise(ErrorCode::bad_argument, "dimensionality must be >= 1");
    }
    if (config.known_classes < 2) {
        raise(ErrorCode::too_few_labels, "at least 2 known classes are required");
    }
    if (config.train_per_class < 1 || config.validation_per_class < 1 ||
        config.test_per_class < 1) {
        raise(ErrorCode::bad_argument, "per-class sample counts must be >= 1");
    }
    if (!(config.cluster_stddev > 0.0)) {
        raise(ErrorCode::bad_argument, "cluster_stddev must be > 0");
    }
    if (!(config.center_spacing > 0.0)) {
        raise(ErrorCode::bad_argument, "center_spacing must be > 0");
    }
    if (config.rare_class_fraction < 0.0 || config.rare_class_fraction > 1.0) {
        raise(ErrorCode::bad_argument, "rare_class_fraction must be in [0, 1]");
    }
}

namespace {

constexpr std::size_t kMaxPlacementAttempts = 10000;

std::string class_label(bool known, std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%s_%03zu", known ? "known" : "novel", i);
    return buf;
}

std::vector<double> place_mean(PortableRng& rng, const SynthConfig& config,
                               const std::vector<std::vector<double>>& placed) {
    // Hypercube of side 10 * spacing centered at the origin.
    const double half_side = 5.0 * config.center_spacing;
    for (std::size_t attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
        std::vector<double> candidate(config.dimensionality);
        for (double& v : candidate) v = (rng.next_unit() * 2.0 - 1.0) * half_side;
        bool ok = true;
        for (const auto& other : placed) {
            if (distance(DistanceKind::l2, candidate, other) < config.center_spacing) {
                ok = false;
                break;
            }
        }
        if (ok) return candidate;
    }
    raise(ErrorCode::infeasible_spacing,
          "could not place class mean " + std::to_string(placed.size()) + " after " +
              std::to_string(kMaxPlacementAttempts) + " attempts");
}

}  // namespace

SynthResult generate(const SynthConfig& config) {
    validate_synth_config(config);
    PortableRng rng(config.seed);

    const std::size_t total_classes = config.known_classes + config.unknown_classes;
    std::vector<std::string> labels;
    labels.reserve(total_classes);
    for (std::size_t i = 0; i < config.known_classes; ++i) labels.push_back(class_label(true, i));
    for (std::size_t i = 0; i < config.unknown_classes; ++i) {
        labels.push_back(class_label(false, i));
    }

    std::vector<std::vector<double>> means;
    means.reserve(total_classes);
    for (std::size_t i = 0; i < total_classes; ++i) {
        means.push_back(place_mean(rng, config, means));
    }

    const std::size_t rare_count = static_cast<std::size_t>(
        config.rare_class_fraction * static_cast<double>(config.known_classes));
    const std::size_t rare_train_per_class =
        std::min<std::size_t>(100, std::max<std::size_t>(1, config.train_per_class / 10));

    auto draw_sample = [&](SplitRole role, std::size_t class_index,
                           std::size_t sample_index) -> FeatureSample {
        FeatureSample sample;
        sample.label = labels[class_index];
        sample.id = std::string(split_role_name(role)) + "-" + sample.label + "-" +
                    std::to_string(sample_index);
        sample.vector.resize(config.dimensionality);
        for (std::size_t d = 0; d < config.dimensionality; ++d) {
            sample.vector[d] = means[class_index][d] + config.cluster_stddev * rng.next_normal();
        }
        return sample;
    };

    SynthResult result;
    result.train.role = SplitRole::train;
    result.validation.role = SplitRole::validation;
    result.test.role = SplitRole::test;
    result.train.dimensionality = config.dimensionality;
    result.validation.dimensionality = config.dimensionality;
    result.test.dimensionality = config.dimensionality;

    // Training: known classes only; the top rare_count class indices get the
    // reduced count.
    for (std::size_t c = 0; c < config.known_classes; ++c) {
        const bool rare = c >= config.known_classes - rare_count;
        const std::size_t n = rare ? rare_train_per_class : config.train_per_class;
        for (std::size_t s = 0; s < n; ++s) {
            result.train.samples.push_back(draw_sample(SplitRole::train, c, s));
        }
    }
    for (std::size_t c = 0; c < total_classes; ++c) {
        for (std::size_t s = 0; s < config.validation_per_class; ++s) {
            result.validation.samples.push_back(draw_sample(SplitRole::validation, c, s));
        }
    }
    for (std::size_t c = 0; c < total_classes; ++c) {
        for (std::size_t s = 0; s < config.test_per_class; ++s) {
            result.test.samples.push_back(draw_sample(SplitRole::test, c, s));
        }
    }

    for (std::size_t i = config.known_classes; i < total_classes; ++i) {
        result.unknown_labels.insert(labels[i]);
    }
    return result;
}

}  // namespace cengap
