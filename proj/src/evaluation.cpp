#include "cengap/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cengap/error.hpp"
#include "cengap/parallel.hpp"

namespace cengap {

const char* outcome_category_name(OutcomeCategory category) {
    switch (category) {
        case OutcomeCategory::predicted_accurate: return "predicted_accurate";
        case OutcomeCategory::predictable_predicted_inaccurate:
            return "predictable_predicted_inaccurate";
        case OutcomeCategory::unknown_predicted: return "unknown_predicted";
        case OutcomeCategory::non_predicted_accurate: return "non_predicted_accurate";
        case OutcomeCategory::predictable_non_predicted_inaccurate:
            return "predictable_non_predicted_inaccurate";
        case OutcomeCategory::unknown_non_predicted: return "unknown_non_predicted";
        case OutcomeCategory::predicted: return "predicted";
        case OutcomeCategory::non_predicted: return "non_predicted";
    }
    return "unknown";
}

const char* partition_kind_name(PartitionKind kind) {
    switch (kind) {
        case PartitionKind::known_vs_unknown: return "known-vs-unknown";
        case PartitionKind::accurate_vs_inaccurate: return "accurate-vs-inaccurate";
        case PartitionKind::common_vs_rare: return "common-vs-rare";
    }
    return "unknown";
}

PartitionKind partition_kind_from_name(const std::string& name) {
    if (name == "known-vs-unknown") return PartitionKind::known_vs_unknown;
    if (name == "accurate-vs-inaccurate") return PartitionKind::accurate_vs_inaccurate;
    if (name == "common-vs-rare") return PartitionKind::common_vs_rare;
    raise(ErrorCode::bad_argument, "unknown partition kind: " + name);
}

std::size_t CategoryBreakdown::count(OutcomeCategory category) const {
    if (category == OutcomeCategory::predicted) {
        return leaf_counts[0] + leaf_counts[1] + leaf_counts[2];
    }
    if (category == OutcomeCategory::non_predicted) {
        return leaf_counts[3] + leaf_counts[4] + leaf_counts[5];
    }
    return leaf_counts[static_cast<std::size_t>(category)];
}

double CategoryBreakdown::fraction(OutcomeCategory category) const {
    if (total == 0) return 0.0;
    return static_cast<double>(count(category)) / static_cast<double>(total);
}

std::map<std::string, double> CategoryBreakdown::fractions() const {
    std::map<std::string, double> out;
    for (auto category :
         {OutcomeCategory::predicted_accurate, OutcomeCategory::predictable_predicted_inaccurate,
          OutcomeCategory::unknown_predicted, OutcomeCategory::non_predicted_accurate,
          OutcomeCategory::predictable_non_predicted_inaccurate,
          OutcomeCategory::unknown_non_predicted, OutcomeCategory::predicted,
          OutcomeCategory::non_predicted}) {
        out[outcome_category_name(category)] = fraction(category);
    }
    return out;
}

std::vector<Prediction> predict_split(const CentroidIndex& index, double threshold,
                                      const Dataset& data, unsigned threads) {
    if (threshold < 0.0 || !std::isfinite(threshold)) {
        raise(ErrorCode::bad_argument, "threshold must be finite and >= 0");
    }
    const auto measured = measure_all(index, data, threads);
    std::vector<Prediction> predictions(measured.size());
    for (std::size_t i = 0; i < measured.size(); ++i) {
        predictions[i].sample_id = measured[i].first;
        predictions[i].gap = measured[i].second;
        predictions[i].emitted = measured[i].second.delta >= threshold;
    }
    return predictions;
}

CategoryBreakdown categorize(const std::vector<Prediction>& predictions,
                             const std::vector<std::string>& truths,
                             const std::set<std::string>& training_labels) {
    if (predictions.size() != truths.size()) {
        raise(ErrorCode::length_mismatch,
              "predictions (" + std::to_string(predictions.size()) + ") and truths (" +
                  std::to_string(truths.size()) + ") differ in length");
    }
    if (training_labels.empty()) {
        raise(ErrorCode::too_few_labels, "training label set is empty");
    }

    CategoryBreakdown breakdown;
    breakdown.total = predictions.size();
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto& p = predictions[i];
        const std::string& truth = truths[i];
        const bool known = training_labels.count(truth) > 0;
        const bool nearest_correct = p.gap.nearest_label == truth;
        OutcomeCategory leaf;
        if (p.emitted) {
            if (nearest_correct) {
                leaf = OutcomeCategory::predicted_accurate;
            } else if (known) {
                leaf = OutcomeCategory::predictable_predicted_inaccurate;
            } else {
                leaf = OutcomeCategory::unknown_predicted;
            }
        } else {
            if (nearest_correct) {
                leaf = OutcomeCategory::non_predicted_accurate;
            } else if (known) {
                leaf = OutcomeCategory::predictable_non_predicted_inaccurate;
            } else {
                leaf = OutcomeCategory::unknown_non_predicted;
            }
        }
        breakdown.leaf_counts[static_cast<std::size_t>(leaf)] += 1;
    }
    return breakdown;
}

EvaluationReport evaluate(const CentroidIndex& index, const CalibrationResult& calibration,
                          const Dataset& test, unsigned threads) {
    if (test.samples.empty()) {
        raise(ErrorCode::empty_input, "test split is empty");
    }

    const auto training_labels = index.label_set();
    const auto measured = measure_all(index, test, threads);

    std::vector<GapMeasurement> measurements(measured.size());
    std::vector<std::string> truths(measured.size());
    for (std::size_t i = 0; i < measured.size(); ++i) {
        measurements[i] = measured[i].second;
        truths[i] = test.samples[i].label;
    }

    EvaluationReport report;
    report.metric = calibration.metric;
    report.threshold = calibration.threshold;
    report.test_size = test.samples.size();

    report.filtered_f1 =
        score_at_threshold(measurements, truths, calibration.threshold, calibration.metric)
            .metric_value;
    report.unfiltered_f1 =
        score_at_threshold(measurements, truths, 0.0, calibration.metric).metric_value;

    // Unfiltered score over samples whose true label exists in training.
    std::vector<GapMeasurement> predictable_measurements;
    std::vector<std::string> predictable_truths;
    for (std::size_t i = 0; i < measurements.size(); ++i) {
        if (training_labels.count(truths[i]) > 0) {
            predictable_measurements.push_back(measurements[i]);
            predictable_truths.push_back(truths[i]);
        }
    }
    report.only_predictables_count = predictable_measurements.size();
    if (!predictable_measurements.empty()) {
        report.only_predictables_f1 =
            score_at_threshold(predictable_measurements, predictable_truths, 0.0,
                               calibration.metric)
                .metric_value;
    }

    std::vector<Prediction> predictions(measured.size());
    for (std::size_t i = 0; i < measured.size(); ++i) {
        predictions[i].sample_id = measured[i].first;
        predictions[i].gap = measurements[i];
        predictions[i].emitted = measurements[i].delta >= calibration.threshold;
    }
    report.categories = categorize(predictions, truths, training_labels);

    std::size_t unknown_total = 0;
    std::size_t unknown_abstained = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (training_labels.count(truths[i]) == 0) {
            ++unknown_total;
            if (!predictions[i].emitted) ++unknown_abstained;
        }
    }
    report.unknown_count = unknown_total;
    if (unknown_total > 0) {
        report.unknown_exclusion_rate =
            static_cast<double>(unknown_abstained) / static_cast<double>(unknown_total);
    }
    report.accurate_loss_rate = report.categories.fraction(OutcomeCategory::non_predicted_accurate);
    return report;
}

FrequencyPartition frequency_partition(const std::map<std::string, std::size_t>& training_counts,
                                       std::size_t cutoff) {
    FrequencyPartition partition;
    for (const auto& [label, count] : training_counts) {
        if (count > cutoff) {
            partition.common.insert(label);
        } else {
            partition.rare.insert(label);
        }
    }
    return partition;
}

FrequencyPartition frequency_partition(const Dataset& train, std::size_t cutoff) {
    if (train.samples.empty()) {
        raise(ErrorCode::empty_input, "training split is empty");
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& sample : train.samples) counts[sample.label] += 1;
    return frequency_partition(counts, cutoff);
}

GapHistogram gap_histogram(const std::vector<GapMeasurement>& measurements,
                           const std::vector<std::string>& truths,
                           const std::map<std::string, std::size_t>& training_counts,
                           PartitionKind partition, std::size_t bin_count, std::size_t cutoff) {
    if (measurements.empty()) {
        raise(ErrorCode::empty_input, "no measurements to bin");
    }
    if (measurements.size() != truths.size()) {
        raise(ErrorCode::length_mismatch,
              "measurements (" + std::to_string(measurements.size()) + ") and truths (" +
                  std::to_string(truths.size()) + ") differ in length");
    }
    if (bin_count == 0) {
        raise(ErrorCode::bad_argument, "bin count must be >= 1");
    }

    double max_delta = 0.0;
    for (const auto& m : measurements) max_delta = std::max(max_delta, m.delta);
    // All-zero deltas would collapse the range; [0, 1] keeps edges increasing.
    const double hi = max_delta > 0.0 ? max_delta : 1.0;

    GapHistogram histogram;
    histogram.partition = partition;
    histogram.bin_edges.resize(bin_count + 1);
    for (std::size_t i = 0; i <= bin_count; ++i) {
        histogram.bin_edges[i] = hi * static_cast<double>(i) / static_cast<double>(bin_count);
    }

    const char* first_name = "known";
    const char* second_name = "unknown";
    if (partition == PartitionKind::accurate_vs_inaccurate) {
        first_name = "accurate";
        second_name = "inaccurate";
    } else if (partition == PartitionKind::common_vs_rare) {
        first_name = "common";
        second_name = "rare";
    }
    auto& first_series = histogram.series[first_name];
    auto& second_series = histogram.series[second_name];
    first_series.assign(bin_count, 0);
    second_series.assign(bin_count, 0);

    FrequencyPartition frequency;
    if (partition == PartitionKind::common_vs_rare) {
        frequency = frequency_partition(training_counts, cutoff);
    }

    for (std::size_t i = 0; i < measurements.size(); ++i) {
        const double delta = measurements[i].delta;
        std::size_t bin = static_cast<std::size_t>(delta / hi * static_cast<double>(bin_count));
        if (bin >= bin_count) bin = bin_count - 1;  // delta == max lands in the last bin

        const std::string& truth = truths[i];
        switch (partition) {
            case PartitionKind::known_vs_unknown:
                (training_counts.count(truth) > 0 ? first_series : second_series)[bin] += 1;
                break;
            case PartitionKind::accurate_vs_inaccurate:
                (measurements[i].nearest_label == truth ? first_series : second_series)[bin] += 1;
                break;
            case PartitionKind::common_vs_rare:
                if (frequency.common.count(truth) > 0) {
                    first_series[bin] += 1;
                } else if (frequency.rare.count(truth) > 0) {
                    second_series[bin] += 1;
                } else {
                    histogram.excluded_unknown += 1;
                }
                break;
        }
    }
    return histogram;
}

std::string baseline_knn_predict(const Dataset& train, std::size_t k,
                                 std::span<const double> query) {
    if (train.samples.empty()) {
        raise(ErrorCode::empty_input, "training split is empty");
    }
    if (k < 1 || k > train.samples.size()) {
        raise(ErrorCode::bad_argument,
              "k must be in [1, " + std::to_string(train.samples.size()) + "]");
    }
    if (query.size() != train.dimensionality) {
        raise(ErrorCode::dimension_mismatch,
              "query length " + std::to_string(query.size()) +
                  " does not match dataset dimensionality " +
                  std::to_string(train.dimensionality));
    }

    std::vector<std::pair<double, std::size_t>> by_distance(train.samples.size());
    for (std::size_t i = 0; i < train.samples.size(); ++i) {
        by_distance[i] = {distance(DistanceKind::l2, query, train.samples[i].vector), i};
    }
    std::partial_sort(by_distance.begin(), by_distance.begin() + static_cast<std::ptrdiff_t>(k),
                      by_distance.end(), [&](const auto& a, const auto& b) {
                          if (a.first != b.first) return a.first < b.first;
                          const auto& la = train.samples[a.second].label;
                          const auto& lb = train.samples[b.second].label;
                          if (la != lb) return la < lb;
                          return a.second < b.second;
                      });

    std::map<std::string, std::size_t> votes;
    for (std::size_t i = 0; i < k; ++i) {
        votes[train.samples[by_distance[i].second].label] += 1;
    }
    // Map order is lexicographic, so a strict > keeps the smaller label on ties.
    const std::string* winner = nullptr;
    std::size_t winner_votes = 0;
    for (const auto& [label, n] : votes) {
        if (n > winner_votes) {
            winner = &label;
            winner_votes = n;
        }
    }
    return *winner;
}

}  // namespace cengap
