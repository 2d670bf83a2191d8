#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cengap/core.hpp"
#include "cengap/types.hpp"

namespace cengap {

// covered_micro_f1: micro-averaged F1 over emitted predictions only. With one
// label per emission this equals accuracy on the covered subset.
// global_recall_f1: precision over emitted, recall over all samples, so
// abstentions count against recall. Provided for sensitivity analysis.
enum class MetricKind { covered_micro_f1, global_recall_f1 };

const char* metric_kind_name(MetricKind kind);
MetricKind metric_kind_from_name(const std::string& name);

struct CurvePoint {
    double threshold = 0.0;
    double metric_value = 0.0;
    double coverage = 0.0;
};

struct CalibrationResult {
    double threshold = 0.0;          // chosen cut point, a member of the candidate set
    std::vector<CurvePoint> curve;   // full sweep, ascending threshold
    MetricKind metric = MetricKind::covered_micro_f1;
    std::size_t validation_size = 0;
    double min_coverage = 0.0;
    bool degenerate = false;         // no candidate emitted anything
};

struct ScoreResult {
    double metric_value = 0.0;
    double coverage = 0.0;
};

// Applies the emit-iff-delta>=t rule and scores the emitted predictions
// (nearest label vs truth) under `metric`. Pure function of its inputs;
// truths[i] pairs with measurements[i].
ScoreResult score_at_threshold(const std::vector<GapMeasurement>& measurements,
                               const std::vector<std::string>& truths,
                               double threshold, MetricKind metric);

// Sweeps every candidate threshold ({0} plus each distinct validation delta),
// scores each one, and returns the candidate maximizing the metric. Ties go
// to the smallest threshold, i.e. maximum coverage. Candidates whose coverage
// falls below `min_coverage` are recorded in the curve but never selected.
CalibrationResult calibrate(const CentroidIndex& index, const Dataset& validation,
                            MetricKind metric = MetricKind::covered_micro_f1,
                            double min_coverage = 0.0, unsigned threads = 1);

}  // namespace cengap
