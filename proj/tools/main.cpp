#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cengap/calibration.hpp"
#include "cengap/core.hpp"
#include "cengap/error.hpp"
#include "cengap/evaluation.hpp"
#include "cengap/io.hpp"
#include "cengap/synth.hpp"
#include "cengap/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string out_json;
    std::string train;
    std::string index;
    std::string validation;
    std::string test;
    std::string input;
    std::string calibration;
    std::string manifest;
    std::string metric = "covered-micro-f1";
    std::string distance = "l2";
    std::string partition = "known-vs-unknown";
    std::vector<std::string> reports;
    double threshold = 0.0;
    double min_coverage = 0.0;
    std::size_t bins = 50;
    std::size_t cutoff = 100;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned threads = 1;
};

void write_predictions(const std::vector<cengap::Prediction>& predictions, const fs::path& path) {
    std::string out;
    for (const auto& p : predictions) {
        json record{{"id", p.sample_id},
                    {"decision", p.emitted ? "emitted" : "abstained"},
                    {"label", p.emitted ? json(p.predicted_label()) : json(nullptr)},
                    {"nearest", p.gap.nearest_label},
                    {"second", p.gap.second_label},
                    {"d1", p.gap.d1},
                    {"d2", p.gap.d2},
                    {"delta", p.gap.delta}};
        out += record.dump();
        out += '\n';
    }
    cengap::write_text_atomic(path, out);
}

void write_all_histograms(const cengap::CentroidIndex& index,
                          const std::vector<cengap::GapMeasurement>& measurements,
                          const std::vector<std::string>& truths, const fs::path& dir,
                          std::size_t bins, std::size_t cutoff) {
    for (auto partition :
         {cengap::PartitionKind::known_vs_unknown, cengap::PartitionKind::accurate_vs_inaccurate,
          cengap::PartitionKind::common_vs_rare}) {
        const auto histogram =
            cengap::gap_histogram(measurements, truths, index.counts, partition, bins, cutoff);
        std::string stem = std::string("hist_") + cengap::partition_kind_name(partition);
        for (char& c : stem) {
            if (c == '-') c = '_';
        }
        cengap::save_histogram_csv(histogram, dir / (stem + ".csv"));
        cengap::save_histogram_json(histogram, dir / (stem + ".json"));
    }
}

void run_synth(const Options& opt) {
    cengap::SynthConfig config = cengap::load_synth_config(opt.config);
    if (opt.seed_set) config.seed = opt.seed;
    const auto result = cengap::generate(config);

    fs::create_directories(opt.out);
    const fs::path dir(opt.out);
    cengap::save_dataset(result.train, dir / "train.ndjson");
    cengap::save_dataset(result.validation, dir / "validation.ndjson");
    cengap::save_dataset(result.test, dir / "test.ndjson");
    cengap::write_text_atomic(dir / "unknown_labels.json",
                              json(result.unknown_labels).dump(2) + "\n");
}

void run_centroids(const Options& opt) {
    const auto train = cengap::load_dataset(opt.train, cengap::SplitRole::train);
    const auto index =
        cengap::compute_centroids(train, cengap::distance_kind_from_name(opt.distance));
    cengap::save_centroid_index(index, opt.out);
}

void run_calibrate(const Options& opt) {
    const auto index = cengap::load_centroid_index(opt.index);
    const auto validation = cengap::load_dataset(opt.validation, cengap::SplitRole::validation);
    const auto result =
        cengap::calibrate(index, validation, cengap::metric_kind_from_name(opt.metric),
                          opt.min_coverage, opt.threads);
    cengap::save_calibration(result, opt.out);
}

void run_predict(const Options& opt) {
    const auto index = cengap::load_centroid_index(opt.index);
    const auto data = cengap::load_dataset(opt.input, cengap::SplitRole::test);
    const auto predictions = cengap::predict_split(index, opt.threshold, data, opt.threads);
    write_predictions(predictions, opt.out);
}

void run_eval(const Options& opt) {
    const auto index = cengap::load_centroid_index(opt.index);
    const auto calibration = cengap::load_calibration(opt.calibration);
    const auto test = cengap::load_dataset(opt.test, cengap::SplitRole::test);

    fs::create_directories(opt.out);
    const fs::path dir(opt.out);

    const auto report = cengap::evaluate(index, calibration, test, opt.threads);
    cengap::save_report(report, dir / "report.json");

    const auto measured = cengap::measure_all(index, test, opt.threads);
    std::vector<cengap::GapMeasurement> measurements(measured.size());
    std::vector<std::string> truths(measured.size());
    for (std::size_t i = 0; i < measured.size(); ++i) {
        measurements[i] = measured[i].second;
        truths[i] = test.samples[i].label;
    }
    write_all_histograms(index, measurements, truths, dir, opt.bins, opt.cutoff);
}

void run_hist(const Options& opt) {
    const auto index = cengap::load_centroid_index(opt.index);
    const auto data = cengap::load_dataset(opt.input, cengap::SplitRole::test);
    const auto measured = cengap::measure_all(index, data, opt.threads);

    std::vector<cengap::GapMeasurement> measurements(measured.size());
    std::vector<std::string> truths(measured.size());
    for (std::size_t i = 0; i < measured.size(); ++i) {
        measurements[i] = measured[i].second;
        truths[i] = data.samples[i].label;
    }
    const auto histogram =
        cengap::gap_histogram(measurements, truths, index.counts,
                              cengap::partition_kind_from_name(opt.partition), opt.bins,
                              opt.cutoff);
    cengap::save_histogram_csv(histogram, opt.out);
    if (!opt.out_json.empty()) {
        cengap::save_histogram_json(histogram, opt.out_json);
    }
}

void run_aggregate(const Options& opt) {
    std::vector<json> reports;
    reports.reserve(opt.reports.size());
    for (const auto& path : opt.reports) {
        reports.push_back(json::parse(cengap::read_text(path)));
    }
    cengap::write_text_atomic(opt.out, cengap::aggregate_reports(reports).dump(2) + "\n");
}

void run_pipeline(const Options& opt) {
    cengap::RunManifest manifest = cengap::load_manifest(opt.manifest);

    const auto train = cengap::load_dataset(manifest.train, cengap::SplitRole::train);
    const auto validation =
        cengap::load_dataset(manifest.validation, cengap::SplitRole::validation);
    const auto test = cengap::load_dataset(manifest.test, cengap::SplitRole::test);

    fs::create_directories(opt.out);
    const fs::path dir(opt.out);

    const auto index = cengap::compute_centroids(train, manifest.distance);
    cengap::save_centroid_index(index, dir / "centroids.json");

    const auto calibration =
        cengap::calibrate(index, validation, manifest.metric, opt.min_coverage, opt.threads);
    cengap::save_calibration(calibration, dir / "calibration.json");

    const auto report = cengap::evaluate(index, calibration, test, opt.threads);
    cengap::save_report(report, dir / "report.json");

    const auto predictions =
        cengap::predict_split(index, calibration.threshold, test, opt.threads);
    write_predictions(predictions, dir / "predictions.ndjson");

    const auto measured = cengap::measure_all(index, test, opt.threads);
    std::vector<cengap::GapMeasurement> measurements(measured.size());
    std::vector<std::string> truths(measured.size());
    for (std::size_t i = 0; i < measured.size(); ++i) {
        measurements[i] = measured[i].second;
        truths[i] = test.samples[i].label;
    }
    write_all_histograms(index, measurements, truths, dir, opt.bins, opt.cutoff);

    manifest.threshold = calibration.threshold;
    manifest.tool_version = cengap::kToolVersion;
    cengap::save_manifest(manifest, dir / "manifest.json");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nearest-centroid type prediction with confidence-gap abstention"};
    app.require_subcommand(1);
    Options opt;

    auto* synth = app.add_subcommand("synth", "generate synthetic dataset splits");
    synth->add_option("--config", opt.config, "synth config JSON")->required();
    synth->add_option("--out", opt.out, "output directory")->required();
    synth->add_option("--seed", opt.seed, "override the config seed")
        ->each([&](const std::string&) { opt.seed_set = true; });
    synth->callback([&] { run_synth(opt); });

    auto* centroids = app.add_subcommand("centroids", "compute per-label cluster centers");
    centroids->add_option("--train", opt.train, "training dataset")->required();
    centroids->add_option("--out", opt.out, "centroid index JSON")->required();
    centroids->add_option("--distance", opt.distance, "l2 or cosine")
        ->check(CLI::IsMember({"l2", "cosine"}));
    centroids->callback([&] { run_centroids(opt); });

    auto* calibrate = app.add_subcommand("calibrate", "choose the abstention threshold");
    calibrate->add_option("--index", opt.index, "centroid index JSON")->required();
    calibrate->add_option("--validation", opt.validation, "validation dataset")->required();
    calibrate->add_option("--out", opt.out, "calibration JSON")->required();
    calibrate->add_option("--metric", opt.metric, "scoring metric")
        ->check(CLI::IsMember({"covered-micro-f1", "global-recall-f1"}));
    calibrate->add_option("--min-coverage", opt.min_coverage, "coverage floor in [0,1]");
    calibrate->add_option("--threads", opt.threads, "worker threads");
    calibrate->callback([&] { run_calibrate(opt); });

    auto* predict = app.add_subcommand("predict", "emit or abstain per sample");
    predict->add_option("--index", opt.index, "centroid index JSON")->required();
    predict->add_option("--input", opt.input, "input dataset")->required();
    predict->add_option("--threshold", opt.threshold, "abstention threshold")->required();
    predict->add_option("--out", opt.out, "predictions NDJSON")->required();
    predict->add_option("--threads", opt.threads, "worker threads");
    predict->callback([&] { run_predict(opt); });

    auto* eval = app.add_subcommand("eval", "score a test split and write histograms");
    eval->add_option("--index", opt.index, "centroid index JSON")->required();
    eval->add_option("--calibration", opt.calibration, "calibration JSON")->required();
    eval->add_option("--test", opt.test, "test dataset")->required();
    eval->add_option("--out", opt.out, "output directory")->required();
    eval->add_option("--bins", opt.bins, "histogram bin count");
    eval->add_option("--cutoff", opt.cutoff, "common/rare training count cutoff");
    eval->add_option("--threads", opt.threads, "worker threads");
    eval->callback([&] { run_eval(opt); });

    auto* hist = app.add_subcommand("hist", "gap histogram for one partition");
    hist->add_option("--index", opt.index, "centroid index JSON")->required();
    hist->add_option("--input", opt.input, "input dataset")->required();
    hist->add_option("--partition", opt.partition, "partition kind")
        ->check(CLI::IsMember({"known-vs-unknown", "accurate-vs-inaccurate", "common-vs-rare"}));
    hist->add_option("--bins", opt.bins, "histogram bin count");
    hist->add_option("--cutoff", opt.cutoff, "common/rare training count cutoff");
    hist->add_option("--out", opt.out, "histogram CSV")->required();
    hist->add_option("--out-json", opt.out_json, "also write histogram JSON");
    hist->add_option("--threads", opt.threads, "worker threads");
    hist->callback([&] { run_hist(opt); });

    auto* aggregate = app.add_subcommand("aggregate", "field-wise mean of report JSONs");
    aggregate->add_option("--out", opt.out, "aggregated report JSON")->required();
    aggregate->add_option("reports", opt.reports, "single-run report files")
        ->required()
        ->expected(-1);
    aggregate->callback([&] { run_aggregate(opt); });

    auto* run = app.add_subcommand("run", "full pipeline from a manifest");
    run->add_option("--manifest", opt.manifest, "run manifest JSON")->required();
    run->add_option("--out", opt.out, "output directory")->required();
    run->add_option("--bins", opt.bins, "histogram bin count");
    run->add_option("--cutoff", opt.cutoff, "common/rare training count cutoff");
    run->add_option("--min-coverage", opt.min_coverage, "coverage floor in [0,1]");
    run->add_option("--threads", opt.threads, "worker threads");
    run->callback([&] { run_pipeline(opt); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << json{{"error", {{"code", "usage"}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    } catch (const cengap::Error& e) {
        json j{{"error",
                {{"code", cengap::error_code_name(e.code())},
                 {"message", e.what()},
                 {"location", e.location()}}}};
        std::cerr << j.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"code", "internal"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 1;
    }
    return 0;
}
