#include "cengap/calibration.hpp"

#include <algorithm>
#include <numeric>

#include "cengap/error.hpp"

namespace cengap {

const char* metric_kind_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::covered_micro_f1: return "covered-micro-f1";
        case MetricKind::global_recall_f1: return "global-recall-f1";
    }
    return "unknown";
}

MetricKind metric_kind_from_name(const std::string& name) {
    if (name == "covered-micro-f1") return MetricKind::covered_micro_f1;
    if (name == "global-recall-f1") return MetricKind::global_recall_f1;
    raise(ErrorCode::bad_argument, "unknown metric kind: " + name);
}

namespace {

// Both metrics are pure functions of integer counts, so every scoring route
// lands on identical doubles. covered: correct/emitted. global: F1 of
// precision=correct/emitted and recall=correct/total, kept in the literal
// precision/recall form (the simplified 2c/(n+e) rounds differently).
double metric_from_counts(MetricKind metric, std::size_t correct, std::size_t emitted,
                          std::size_t total) {
    if (emitted == 0 || correct == 0) return 0.0;
    if (metric == MetricKind::covered_micro_f1) {
        return static_cast<double>(correct) / static_cast<double>(emitted);
    }
    const double precision = static_cast<double>(correct) / static_cast<double>(emitted);
    const double recall = static_cast<double>(correct) / static_cast<double>(total);
    return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

ScoreResult score_at_threshold(const std::vector<GapMeasurement>& measurements,
                               const std::vector<std::string>& truths, double threshold,
                               MetricKind metric) {
    if (measurements.size() != truths.size()) {
        raise(ErrorCode::length_mismatch,
              "measurements (" + std::to_string(measurements.size()) + ") and truths (" +
                  std::to_string(truths.size()) + ") differ in length");
    }
    std::size_t emitted = 0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < measurements.size(); ++i) {
        if (measurements[i].delta >= threshold) {
            ++emitted;
            if (measurements[i].nearest_label == truths[i]) ++correct;
        }
    }
    ScoreResult result;
    result.metric_value = metric_from_counts(metric, correct, emitted, measurements.size());
    result.coverage = measurements.empty()
                          ? 0.0
                          : static_cast<double>(emitted) / static_cast<double>(measurements.size());
    return result;
}

CalibrationResult calibrate(const CentroidIndex& index, const Dataset& validation,
                            MetricKind metric, double min_coverage, unsigned threads) {
    if (validation.samples.empty()) {
        raise(ErrorCode::empty_input, "validation split is empty");
    }
    if (min_coverage < 0.0 || min_coverage > 1.0) {
        raise(ErrorCode::bad_argument, "min_coverage must be in [0, 1]");
    }

    const auto measured = measure_all(index, validation, threads);
    const std::size_t n = measured.size();

    std::vector<double> deltas(n);
    std::vector<char> correct(n);
    for (std::size_t i = 0; i < n; ++i) {
        deltas[i] = measured[i].second.delta;
        correct[i] = measured[i].second.nearest_label == validation.samples[i].label;
    }

    // Sort sample positions by delta; the emitting set for candidate t is a
    // suffix of this order, so one pass of suffix counts scores every
    // candidate with the same integer arithmetic a literal scan would use.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return deltas[a] < deltas[b]; });

    std::vector<std::size_t> correct_suffix(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) {
        correct_suffix[i] = correct_suffix[i + 1] + (correct[order[i]] ? 1 : 0);
    }

    // Candidate cut points: {0} plus each distinct observed delta.
    std::vector<double> candidates{0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double d = deltas[order[i]];
        if (d > candidates.back()) candidates.push_back(d);
    }

    CalibrationResult result;
    result.metric = metric;
    result.validation_size = n;
    result.min_coverage = min_coverage;
    result.curve.reserve(candidates.size());

    bool have_best = false;
    double best_metric = 0.0;
    std::size_t best_emitted = 0;
    std::size_t pos = 0;  // first sorted position with delta >= candidate

    for (const double t : candidates) {
        while (pos < n && deltas[order[pos]] < t) ++pos;
        const std::size_t emitted = n - pos;
        const std::size_t emitted_correct = correct_suffix[pos];
        CurvePoint point;
        point.threshold = t;
        point.metric_value = metric_from_counts(metric, emitted_correct, emitted, n);
        point.coverage = static_cast<double>(emitted) / static_cast<double>(n);
        result.curve.push_back(point);

        if (point.coverage < min_coverage) continue;
        if (!have_best || point.metric_value > best_metric) {
            have_best = true;
            best_metric = point.metric_value;
            best_emitted = emitted;
            result.threshold = t;
        }
    }

    if (!have_best || best_emitted == 0) {
        // Candidate 0 emits every sample, so this cannot trigger for a
        // non-empty validation split; the fallback is pinned anyway:
        // threshold 0, flagged degenerate.
        result.threshold = 0.0;
        result.degenerate = true;
    }
    return result;
}

}  // namespace cengap
