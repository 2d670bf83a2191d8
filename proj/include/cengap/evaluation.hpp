#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cengap/calibration.hpp"
#include "cengap/core.hpp"
#include "cengap/types.hpp"

namespace cengap {

struct Prediction {
    std::string sample_id;
    bool emitted = false;  // delta >= threshold
    GapMeasurement gap;

    // Valid when emitted; always the nearest centroid's label.
    const std::string& predicted_label() const { return gap.nearest_label; }
};

// Six leaves partition a test set exactly; the two aggregates are their sums.
// "unknown" means the true label never occurred in training, so no emission
// can be correct. "accurate" for an abstained sample means the nearest label
// would have been correct had it been emitted.
enum class OutcomeCategory {
    predicted_accurate,
    predictable_predicted_inaccurate,
    unknown_predicted,
    non_predicted_accurate,
    predictable_non_predicted_inaccurate,
    unknown_non_predicted,
    predicted,      // aggregate of the first three
    non_predicted,  // aggregate of the last three
};

const char* outcome_category_name(OutcomeCategory category);

struct CategoryBreakdown {
    std::array<std::size_t, 6> leaf_counts{};  // indexed by leaf enum order
    std::size_t total = 0;

    std::size_t count(OutcomeCategory category) const;
    double fraction(OutcomeCategory category) const;
    std::map<std::string, double> fractions() const;  // leaves plus aggregates
};

struct EvaluationReport {
    double filtered_f1 = 0.0;    // score at the calibrated threshold
    double unfiltered_f1 = 0.0;  // score at threshold 0 (nothing filtered)
    // Threshold-0 score restricted to samples whose true label exists in
    // training; empty subset leaves it unset rather than 0.
    std::optional<double> only_predictables_f1;
    std::size_t only_predictables_count = 0;
    CategoryBreakdown categories;
    // Fraction of unknown-label samples that were abstained; unset when the
    // test split contains no unknown labels.
    std::optional<double> unknown_exclusion_rate;
    double accurate_loss_rate = 0.0;  // non_predicted_accurate / total
    MetricKind metric = MetricKind::covered_micro_f1;
    double threshold = 0.0;
    std::size_t test_size = 0;
    std::size_t unknown_count = 0;
};

enum class PartitionKind { known_vs_unknown, accurate_vs_inaccurate, common_vs_rare };

const char* partition_kind_name(PartitionKind kind);
PartitionKind partition_kind_from_name(const std::string& name);

struct GapHistogram {
    std::vector<double> bin_edges;  // bin_count + 1 edges, strictly increasing from 0
    std::map<std::string, std::vector<std::size_t>> series;
    PartitionKind partition = PartitionKind::known_vs_unknown;
    // common_vs_rare only: samples with labels outside training fall in
    // neither series and are counted here.
    std::size_t excluded_unknown = 0;
};

// One Prediction per sample in input order, emit iff delta >= threshold.
std::vector<Prediction> predict_split(const CentroidIndex& index, double threshold,
                                      const Dataset& data, unsigned threads = 1);

// Buckets each (prediction, truth) pair into exactly one leaf category.
CategoryBreakdown categorize(const std::vector<Prediction>& predictions,
                             const std::vector<std::string>& truths,
                             const std::set<std::string>& training_labels);

// Full report at the calibrated threshold: filtered and unfiltered scores,
// the only-predictables baseline, category breakdown, and exclusion rates.
// Training labels come from the index.
EvaluationReport evaluate(const CentroidIndex& index, const CalibrationResult& calibration,
                          const Dataset& test, unsigned threads = 1);

// Common iff the label occurs strictly more than `cutoff` times in training.
struct FrequencyPartition {
    std::set<std::string> common;
    std::set<std::string> rare;
};

FrequencyPartition frequency_partition(const std::map<std::string, std::size_t>& training_counts,
                                       std::size_t cutoff = 100);
FrequencyPartition frequency_partition(const Dataset& train, std::size_t cutoff = 100);

// Uniform bins over [0, max delta] (over [0, 1] when every delta is zero, so
// edges stay strictly increasing). Series depend on the partition:
// known/unknown splits on label-in-training, accurate/inaccurate on
// nearest-label == truth, common/rare on the frequency partition with
// unknown-label samples excluded from both series.
GapHistogram gap_histogram(const std::vector<GapMeasurement>& measurements,
                           const std::vector<std::string>& truths,
                           const std::map<std::string, std::size_t>& training_counts,
                           PartitionKind partition, std::size_t bin_count,
                           std::size_t cutoff = 100);

// Majority label among the k nearest training vectors under L2; ties in the
// vote go to the lexicographically smaller label. Comparison baseline only,
// not part of the filtered pipeline.
std::string baseline_knn_predict(const Dataset& train, std::size_t k,
                                 std::span<const double> query);

}  // namespace cengap
