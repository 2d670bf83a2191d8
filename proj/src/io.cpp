#include "cengap/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cengap/error.hpp"

namespace cengap {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text_atomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.parent_path() / (path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            raise(ErrorCode::io_error, "cannot open for writing", tmp.string());
        }
        out << text;
        if (!out.flush()) {
            raise(ErrorCode::io_error, "write failed", tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        raise(ErrorCode::io_error, "rename failed: " + ec.message(), path.string());
    }
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::io_error, "cannot open for reading", path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string format_double(double value) {
    return json(value).dump();
}

namespace {

std::string file_line(const fs::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

json parse_json(const std::string& text, const std::string& location) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        raise(ErrorCode::parse_error, "invalid JSON", location);
    }
    return j;
}

json load_json_file(const fs::path& path) {
    return parse_json(read_text(path), path.string());
}

double require_finite(const json& j, const char* field, const std::string& location) {
    if (!j.is_number()) {
        raise(ErrorCode::parse_error, std::string(field) + " must be a number", location);
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        raise(ErrorCode::non_finite_value, std::string(field) + " is not finite", location);
    }
    return v;
}

}  // namespace

Dataset load_dataset(const fs::path& path, SplitRole role) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::io_error, "cannot open dataset", path.string());
    }

    Dataset data;
    data.role = role;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_number = 0;
    bool have_dimensionality = false;

    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const std::string location = file_line(path, line_number);
        json record = parse_json(line, location);
        if (!record.is_object()) {
            raise(ErrorCode::parse_error, "record is not a JSON object", location);
        }

        if (line_number == 1 && record.contains("dimensionality") && !record.contains("id")) {
            if (!record["dimensionality"].is_number_unsigned() ||
                record["dimensionality"].get<std::size_t>() == 0) {
                raise(ErrorCode::parse_error, "dimensionality must be a positive integer",
                      location);
            }
            data.dimensionality = record["dimensionality"].get<std::size_t>();
            have_dimensionality = true;
            continue;
        }

        FeatureSample sample;
        if (!record.contains("id") || !record["id"].is_string()) {
            raise(ErrorCode::parse_error, "record needs a string \"id\"", location);
        }
        if (!record.contains("label") || !record["label"].is_string()) {
            raise(ErrorCode::parse_error, "record needs a string \"label\"", location);
        }
        if (!record.contains("vector") || !record["vector"].is_array()) {
            raise(ErrorCode::parse_error, "record needs an array \"vector\"", location);
        }
        sample.id = record["id"].get<std::string>();
        sample.label = record["label"].get<std::string>();
        if (sample.label.empty()) {
            raise(ErrorCode::parse_error, "label must be non-empty", location);
        }
        if (!seen_ids.insert(sample.id).second) {
            raise(ErrorCode::duplicate_id, "duplicate sample id \"" + sample.id + "\"", location);
        }
        sample.vector.reserve(record["vector"].size());
        for (const auto& v : record["vector"]) {
            sample.vector.push_back(require_finite(v, "vector component", location));
        }

        if (!have_dimensionality) {
            // No header: the first record fixes the dimensionality.
            if (sample.vector.empty()) {
                raise(ErrorCode::parse_error, "vector must be non-empty", location);
            }
            data.dimensionality = sample.vector.size();
            have_dimensionality = true;
        }
        if (sample.vector.size() != data.dimensionality) {
            raise(ErrorCode::dimension_mismatch,
                  "vector length " + std::to_string(sample.vector.size()) + " does not match " +
                      std::to_string(data.dimensionality),
                  location);
        }
        data.samples.push_back(std::move(sample));
    }

    if (data.samples.empty()) {
        raise(ErrorCode::empty_input, "dataset has no records", path.string());
    }
    return data;
}

void save_dataset(const Dataset& data, const fs::path& path) {
    validate_dataset(data);
    std::string out;
    out += json{{"dimensionality", data.dimensionality}}.dump();
    out += '\n';
    for (const auto& sample : data.samples) {
        out += json{{"id", sample.id}, {"label", sample.label}, {"vector", sample.vector}}.dump();
        out += '\n';
    }
    write_text_atomic(path, out);
}

void save_centroid_index(const CentroidIndex& index, const fs::path& path) {
    json j;
    j["dimensionality"] = index.dimensionality;
    j["distance"] = distance_kind_name(index.distance_kind);
    j["centroids"] = json::object();
    j["counts"] = json::object();
    for (const auto& [label, centroid] : index.centroids) {
        j["centroids"][label] = centroid;
        j["counts"][label] = index.counts.at(label);
    }
    write_text_atomic(path, j.dump(2) + "\n");
}

CentroidIndex load_centroid_index(const fs::path& path) {
    const json j = load_json_file(path);
    const std::string location = path.string();

    CentroidIndex index;
    if (!j.contains("dimensionality") || !j["dimensionality"].is_number_unsigned()) {
        raise(ErrorCode::parse_error, "index needs an unsigned \"dimensionality\"", location);
    }
    index.dimensionality = j["dimensionality"].get<std::size_t>();
    index.distance_kind = distance_kind_from_name(j.value("distance", "l2"));
    if (!j.contains("centroids") || !j["centroids"].is_object()) {
        raise(ErrorCode::parse_error, "index needs a \"centroids\" object", location);
    }
    for (const auto& [label, vec] : j["centroids"].items()) {
        if (!vec.is_array() || vec.size() != index.dimensionality) {
            raise(ErrorCode::dimension_mismatch,
                  "centroid \"" + label + "\" does not match the index dimensionality", location);
        }
        std::vector<double> centroid;
        centroid.reserve(vec.size());
        for (const auto& v : vec) {
            centroid.push_back(require_finite(v, "centroid component", location));
        }
        index.centroids[label] = std::move(centroid);
        index.counts[label] = 0;
    }
    if (index.centroids.size() < 2) {
        raise(ErrorCode::too_few_labels, "index needs at least 2 centroids", location);
    }
    if (j.contains("counts")) {
        for (const auto& [label, count] : j["counts"].items()) {
            if (index.centroids.find(label) == index.centroids.end()) {
                raise(ErrorCode::parse_error, "count for unknown label \"" + label + "\"",
                      location);
            }
            if (!count.is_number_unsigned() || count.get<std::size_t>() == 0) {
                raise(ErrorCode::parse_error, "counts must be positive integers", location);
            }
            index.counts[label] = count.get<std::size_t>();
        }
    }
    return index;
}

json calibration_to_json(const CalibrationResult& result) {
    json curve = json::array();
    for (const auto& point : result.curve) {
        curve.push_back({{"threshold", point.threshold},
                         {"metric_value", point.metric_value},
                         {"coverage", point.coverage}});
    }
    return json{{"threshold", result.threshold},
                {"metric", metric_kind_name(result.metric)},
                {"min_coverage", result.min_coverage},
                {"validation_size", result.validation_size},
                {"degenerate", result.degenerate},
                {"curve", std::move(curve)}};
}

CalibrationResult calibration_from_json(const json& j) {
    CalibrationResult result;
    result.threshold = require_finite(j.at("threshold"), "threshold", "calibration");
    result.metric = metric_kind_from_name(j.at("metric").get<std::string>());
    result.min_coverage = j.value("min_coverage", 0.0);
    result.validation_size = j.value("validation_size", std::size_t{0});
    result.degenerate = j.value("degenerate", false);
    if (j.contains("curve")) {
        for (const auto& p : j["curve"]) {
            CurvePoint point;
            point.threshold = require_finite(p.at("threshold"), "curve threshold", "calibration");
            point.metric_value =
                require_finite(p.at("metric_value"), "curve metric", "calibration");
            point.coverage = require_finite(p.at("coverage"), "curve coverage", "calibration");
            result.curve.push_back(point);
        }
    }
    return result;
}

void save_calibration(const CalibrationResult& result, const fs::path& path) {
    write_text_atomic(path, calibration_to_json(result).dump(2) + "\n");
}

CalibrationResult load_calibration(const fs::path& path) {
    return calibration_from_json(load_json_file(path));
}

json report_to_json(const EvaluationReport& report) {
    json categories = json::object();
    for (const auto& [name, fraction] : report.categories.fractions()) {
        categories[name] = fraction;
    }
    json j{{"filtered_f1", report.filtered_f1},
           {"unfiltered_f1", report.unfiltered_f1},
           {"only_predictables_count", report.only_predictables_count},
           {"categories", std::move(categories)},
           {"accurate_loss_rate", report.accurate_loss_rate},
           {"metric", metric_kind_name(report.metric)},
           {"threshold", report.threshold},
           {"test_size", report.test_size},
           {"unknown_count", report.unknown_count}};
    j["only_predictables_f1"] =
        report.only_predictables_f1 ? json(*report.only_predictables_f1) : json(nullptr);
    j["unknown_exclusion_rate"] =
        report.unknown_exclusion_rate ? json(*report.unknown_exclusion_rate) : json(nullptr);
    return j;
}

EvaluationReport report_from_json(const json& j) {
    EvaluationReport report;
    report.filtered_f1 = require_finite(j.at("filtered_f1"), "filtered_f1", "report");
    report.unfiltered_f1 = require_finite(j.at("unfiltered_f1"), "unfiltered_f1", "report");
    if (j.contains("only_predictables_f1") && !j["only_predictables_f1"].is_null()) {
        report.only_predictables_f1 =
            require_finite(j["only_predictables_f1"], "only_predictables_f1", "report");
    }
    report.only_predictables_count = j.value("only_predictables_count", std::size_t{0});
    if (j.contains("unknown_exclusion_rate") && !j["unknown_exclusion_rate"].is_null()) {
        report.unknown_exclusion_rate =
            require_finite(j["unknown_exclusion_rate"], "unknown_exclusion_rate", "report");
    }
    report.accurate_loss_rate = j.value("accurate_loss_rate", 0.0);
    report.metric = metric_kind_from_name(j.at("metric").get<std::string>());
    report.threshold = require_finite(j.at("threshold"), "threshold", "report");
    report.test_size = j.value("test_size", std::size_t{0});
    report.unknown_count = j.value("unknown_count", std::size_t{0});

    // Round-trips keep fractions only; counts are reconstructed best-effort.
    if (j.contains("categories")) {
        report.categories.total = report.test_size;
        for (std::size_t leaf = 0; leaf < 6; ++leaf) {
            const char* name = outcome_category_name(static_cast<OutcomeCategory>(leaf));
            const double fraction = j["categories"].value(name, 0.0);
            report.categories.leaf_counts[leaf] = static_cast<std::size_t>(
                std::llround(fraction * static_cast<double>(report.test_size)));
        }
    }
    return report;
}

void save_report(const EvaluationReport& report, const fs::path& path) {
    write_text_atomic(path, report_to_json(report).dump(2) + "\n");
}

EvaluationReport load_report(const fs::path& path) {
    return report_from_json(load_json_file(path));
}

json histogram_to_json(const GapHistogram& histogram) {
    json series = json::object();
    for (const auto& [name, counts] : histogram.series) {
        series[name] = counts;
    }
    return json{{"partition", partition_kind_name(histogram.partition)},
                {"bin_edges", histogram.bin_edges},
                {"series", std::move(series)},
                {"excluded_unknown", histogram.excluded_unknown}};
}

void save_histogram_json(const GapHistogram& histogram, const fs::path& path) {
    write_text_atomic(path, histogram_to_json(histogram).dump(2) + "\n");
}

void save_histogram_csv(const GapHistogram& histogram, const fs::path& path) {
    std::string out = "bin_lower,bin_upper";
    for (const auto& [name, _] : histogram.series) {
        out += ',';
        out += name;
    }
    out += '\n';
    const std::size_t bins = histogram.bin_edges.size() - 1;
    for (std::size_t b = 0; b < bins; ++b) {
        out += format_double(histogram.bin_edges[b]);
        out += ',';
        out += format_double(histogram.bin_edges[b + 1]);
        for (const auto& [_, counts] : histogram.series) {
            out += ',';
            out += std::to_string(counts[b]);
        }
        out += '\n';
    }
    write_text_atomic(path, out);
}

json aggregate_reports(const std::vector<json>& reports) {
    if (reports.empty()) {
        raise(ErrorCode::empty_input, "no reports to aggregate");
    }

    const std::string metric = reports.front().at("metric").get<std::string>();
    for (const auto& r : reports) {
        if (r.at("metric").get<std::string>() != metric) {
            raise(ErrorCode::bad_argument, "reports mix metric kinds; refusing to average");
        }
    }

    auto mean_of = [&](auto getter) -> json {
        double sum = 0.0;
        std::size_t present = 0;
        for (const auto& r : reports) {
            const json v = getter(r);
            if (v.is_number()) {
                sum += v.get<double>();
                ++present;
            }
        }
        if (present == 0) return nullptr;
        return sum / static_cast<double>(present);
    };
    auto field = [&](const char* name) {
        return mean_of([name](const json& r) -> json { return r.value(name, json(nullptr)); });
    };

    json out;
    out["runs"] = reports.size();
    out["metric"] = metric;
    for (const char* name :
         {"filtered_f1", "unfiltered_f1", "only_predictables_f1", "threshold",
          "unknown_exclusion_rate", "accurate_loss_rate", "test_size", "unknown_count",
          "only_predictables_count"}) {
        out[name] = field(name);
    }
    json categories = json::object();
    for (std::size_t c = 0; c < 8; ++c) {
        const char* name = outcome_category_name(static_cast<OutcomeCategory>(c));
        categories[name] = mean_of([name](const json& r) -> json {
            if (!r.contains("categories")) return nullptr;
            return r["categories"].value(name, json(nullptr));
        });
    }
    out["categories"] = std::move(categories);
    return out;
}

json manifest_to_json(const RunManifest& manifest) {
    return json{{"train", manifest.train.string()},
                {"validation", manifest.validation.string()},
                {"test", manifest.test.string()},
                {"metric", metric_kind_name(manifest.metric)},
                {"distance", distance_kind_name(manifest.distance)},
                {"threshold", manifest.threshold ? json(*manifest.threshold) : json(nullptr)},
                {"seed", manifest.seed},
                {"tool_version", manifest.tool_version}};
}

RunManifest manifest_from_json(const json& j) {
    RunManifest manifest;
    manifest.train = j.at("train").get<std::string>();
    manifest.validation = j.at("validation").get<std::string>();
    manifest.test = j.at("test").get<std::string>();
    manifest.metric = metric_kind_from_name(j.at("metric").get<std::string>());
    manifest.distance = distance_kind_from_name(j.value("distance", "l2"));
    if (j.contains("threshold") && !j["threshold"].is_null()) {
        manifest.threshold = require_finite(j["threshold"], "threshold", "manifest");
    }
    manifest.seed = j.value("seed", std::uint64_t{0});
    manifest.tool_version = j.value("tool_version", std::string(kToolVersion));
    return manifest;
}

void save_manifest(const RunManifest& manifest, const fs::path& path) {
    write_text_atomic(path, manifest_to_json(manifest).dump(2) + "\n");
}

RunManifest load_manifest(const fs::path& path) {
    RunManifest manifest = manifest_from_json(load_json_file(path));
    for (const fs::path& p : {manifest.train, manifest.validation, manifest.test}) {
        if (!fs::exists(p)) {
            raise(ErrorCode::io_error, "manifest references a missing file", p.string());
        }
    }
    return manifest;
}

SynthConfig synth_config_from_json(const json& j) {
    SynthConfig config;
    config.dimensionality = j.value("dimensionality", config.dimensionality);
    config.known_classes = j.value("known_classes", config.known_classes);
    config.unknown_classes = j.value("unknown_classes", config.unknown_classes);
    config.train_per_class = j.value("train_per_class", config.train_per_class);
    config.validation_per_class = j.value("validation_per_class", config.validation_per_class);
    config.test_per_class = j.value("test_per_class", config.test_per_class);
    config.cluster_stddev = j.value("cluster_stddev", config.cluster_stddev);
    config.center_spacing = j.value("center_spacing", config.center_spacing);
    config.seed = j.value("seed", config.seed);
    config.rare_class_fraction = j.value("rare_class_fraction", config.rare_class_fraction);
    validate_synth_config(config);
    return config;
}

SynthConfig load_synth_config(const fs::path& path) {
    return synth_config_from_json(load_json_file(path));
}

}  // namespace cengap
