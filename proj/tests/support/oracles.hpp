#pragma once

// Brute-force reference implementations, independent of the library code
// paths they check. Everything here favors literal enumeration over
// cleverness; keep it that way.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct LabeledVector {
    std::string label;
    std::vector<double> value;
};

// Separate summation pass over the class members.
inline std::vector<double> mean(const std::vector<std::vector<double>>& vectors) {
    std::vector<double> sum(vectors.front().size(), 0.0);
    for (const auto& v : vectors) {
        for (std::size_t i = 0; i < v.size(); ++i) sum[i] += v[i];
    }
    for (double& s : sum) s /= static_cast<double>(vectors.size());
    return sum;
}

inline double l2(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(sum);
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 1.0;
    return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

struct NearestTwo {
    std::string nearest_label;
    std::string second_label;
    double d1 = 0.0;
    double d2 = 0.0;
    double delta = 0.0;
};

// Full sort over every centroid distance, ties by label.
inline NearestTwo nearest_two(const std::vector<LabeledVector>& centroids,
                              const std::vector<double>& query, bool use_cosine = false) {
    std::vector<std::pair<double, std::string>> all;
    all.reserve(centroids.size());
    for (const auto& c : centroids) {
        all.emplace_back(use_cosine ? cosine(query, c.value) : l2(query, c.value), c.label);
    }
    std::sort(all.begin(), all.end());
    NearestTwo result;
    result.nearest_label = all[0].second;
    result.second_label = all[1].second;
    result.d1 = all[0].first;
    result.d2 = all[1].first;
    result.delta = result.d2 - result.d1;
    return result;
}

struct Measurement {
    std::string nearest_label;
    double delta = 0.0;
};

struct Score {
    double metric_value = 0.0;
    double coverage = 0.0;
};

// Literal recount at one threshold.
inline Score score(const std::vector<Measurement>& measurements,
                   const std::vector<std::string>& truths, double threshold,
                   bool covered_metric) {
    std::size_t emitted = 0, correct = 0;
    for (std::size_t i = 0; i < measurements.size(); ++i) {
        if (measurements[i].delta >= threshold) {
            ++emitted;
            if (measurements[i].nearest_label == truths[i]) ++correct;
        }
    }
    Score s;
    if (emitted > 0 && correct > 0) {
        if (covered_metric) {
            s.metric_value = static_cast<double>(correct) / static_cast<double>(emitted);
        } else {
            const double precision =
                static_cast<double>(correct) / static_cast<double>(emitted);
            const double recall =
                static_cast<double>(correct) / static_cast<double>(measurements.size());
            s.metric_value = 2.0 * precision * recall / (precision + recall);
        }
    }
    s.coverage = measurements.empty()
                     ? 0.0
                     : static_cast<double>(emitted) / static_cast<double>(measurements.size());
    return s;
}

struct Calibration {
    double threshold = 0.0;
    double metric_value = 0.0;
};

// Literal scan: every candidate threshold scored from scratch, first maximum
// (= smallest threshold) wins.
inline Calibration calibrate(const std::vector<Measurement>& measurements,
                             const std::vector<std::string>& truths, bool covered_metric,
                             double min_coverage = 0.0) {
    std::set<double> candidate_set{0.0};
    for (const auto& m : measurements) candidate_set.insert(m.delta);

    Calibration best;
    bool have_best = false;
    for (double t : candidate_set) {
        const Score s = score(measurements, truths, t, covered_metric);
        if (s.coverage < min_coverage) continue;
        if (!have_best || s.metric_value > best.metric_value) {
            have_best = true;
            best.threshold = t;
            best.metric_value = s.metric_value;
        }
    }
    return best;
}

struct Report {
    double filtered_f1 = 0.0;
    double unfiltered_f1 = 0.0;
    std::optional<double> only_predictables_f1;
    std::size_t only_predictables_count = 0;
    std::array<std::size_t, 6> leaf_counts{};  // same order as the library enum
    std::optional<double> unknown_exclusion_rate;
    double accurate_loss_rate = 0.0;
    double threshold = 0.0;
};

// Direct per-sample counting at a fixed threshold.
inline Report evaluate(const std::vector<Measurement>& measurements,
                       const std::vector<std::string>& truths,
                       const std::set<std::string>& training_labels, double threshold,
                       bool covered_metric) {
    Report report;
    report.threshold = threshold;
    report.filtered_f1 = score(measurements, truths, threshold, covered_metric).metric_value;
    report.unfiltered_f1 = score(measurements, truths, 0.0, covered_metric).metric_value;

    std::vector<Measurement> predictable;
    std::vector<std::string> predictable_truths;
    for (std::size_t i = 0; i < measurements.size(); ++i) {
        if (training_labels.count(truths[i]) > 0) {
            predictable.push_back(measurements[i]);
            predictable_truths.push_back(truths[i]);
        }
    }
    report.only_predictables_count = predictable.size();
    if (!predictable.empty()) {
        report.only_predictables_f1 =
            score(predictable, predictable_truths, 0.0, covered_metric).metric_value;
    }

    std::size_t unknown_total = 0, unknown_abstained = 0;
    for (std::size_t i = 0; i < measurements.size(); ++i) {
        const bool emitted = measurements[i].delta >= threshold;
        const bool known = training_labels.count(truths[i]) > 0;
        const bool accurate = measurements[i].nearest_label == truths[i];
        std::size_t leaf;
        if (emitted) {
            leaf = accurate ? 0 : (known ? 1 : 2);
        } else {
            leaf = accurate ? 3 : (known ? 4 : 5);
        }
        report.leaf_counts[leaf] += 1;
        if (!known) {
            ++unknown_total;
            if (!emitted) ++unknown_abstained;
        }
    }
    if (unknown_total > 0) {
        report.unknown_exclusion_rate =
            static_cast<double>(unknown_abstained) / static_cast<double>(unknown_total);
    }
    report.accurate_loss_rate =
        static_cast<double>(report.leaf_counts[3]) / static_cast<double>(measurements.size());
    return report;
}

}  // namespace oracle
