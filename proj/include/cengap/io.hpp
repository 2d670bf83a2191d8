#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cengap/calibration.hpp"
#include "cengap/core.hpp"
#include "cengap/evaluation.hpp"
#include "cengap/synth.hpp"
#include "cengap/types.hpp"

namespace cengap {

inline constexpr const char* kToolVersion = "0.1.0";

// Writes via a temp file in the same directory, then renames.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

std::string read_text(const std::filesystem::path& path);

// Shortest round-trip decimal form (what the JSON layer emits), reused for
// CSV so numbers look the same everywhere.
std::string format_double(double value);

// Dataset files are newline-delimited JSON: an optional first-line header
// {"dimensionality": N} followed by one {"id", "label", "vector"} object per
// line. Errors carry "path:line".
Dataset load_dataset(const std::filesystem::path& path, SplitRole role);
void save_dataset(const Dataset& data, const std::filesystem::path& path);

void save_centroid_index(const CentroidIndex& index, const std::filesystem::path& path);
CentroidIndex load_centroid_index(const std::filesystem::path& path);

nlohmann::json calibration_to_json(const CalibrationResult& result);
CalibrationResult calibration_from_json(const nlohmann::json& j);
void save_calibration(const CalibrationResult& result, const std::filesystem::path& path);
CalibrationResult load_calibration(const std::filesystem::path& path);

nlohmann::json report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const nlohmann::json& j);
void save_report(const EvaluationReport& report, const std::filesystem::path& path);
EvaluationReport load_report(const std::filesystem::path& path);

nlohmann::json histogram_to_json(const GapHistogram& histogram);
void save_histogram_json(const GapHistogram& histogram, const std::filesystem::path& path);
// Columns: bin_lower, bin_upper, then one column per series.
void save_histogram_csv(const GapHistogram& histogram, const std::filesystem::path& path);

// Field-wise arithmetic mean over single-run reports. Optional fields are
// averaged over the reports where they are present (null when absent from
// all). Reports with differing metric kinds do not mix; that is an error.
nlohmann::json aggregate_reports(const std::vector<nlohmann::json>& reports);

struct RunManifest {
    std::filesystem::path train;
    std::filesystem::path validation;
    std::filesystem::path test;
    MetricKind metric = MetricKind::covered_micro_f1;
    DistanceKind distance = DistanceKind::l2;
    std::optional<double> threshold;  // filled in after calibration
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;
};

nlohmann::json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);
void save_manifest(const RunManifest& manifest, const std::filesystem::path& path);
// Verifies the referenced dataset files exist.
RunManifest load_manifest(const std::filesystem::path& path);

SynthConfig synth_config_from_json(const nlohmann::json& j);
SynthConfig load_synth_config(const std::filesystem::path& path);

}  // namespace cengap
