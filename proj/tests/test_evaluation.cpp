#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cengap/calibration.hpp"
#include "cengap/core.hpp"
#include "cengap/error.hpp"
#include "cengap/evaluation.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace cengap;

namespace {

CentroidIndex two_center_index() {
    return compute_centroids(testutil::make_dataset({
        {"p", {0.0}},
        {"q", {10.0}},
    }));
}

// Places a query on the p-side axis so that d2 - d1 equals `delta`.
std::vector<double> query_with_delta(double delta) {
    return {(10.0 - delta) / 2.0};
}

}  // namespace

TEST_CASE("predict_split emit rule") {
    const auto index = two_center_index();
    Dataset data;
    data.dimensionality = 1;
    data.role = SplitRole::test;
    for (int i = 0; i < 4; ++i) {
        data.samples.push_back({"low" + std::to_string(i), "p", query_with_delta(0.1)});
        data.samples.push_back({"high" + std::to_string(i), "p", query_with_delta(0.9)});
    }

    SUBCASE("threshold zero emits everything") {
        for (const auto& p : predict_split(index, 0.0, data)) {
            CHECK(p.emitted);
        }
    }
    SUBCASE("threshold above max delta abstains everywhere") {
        for (const auto& p : predict_split(index, 100.0, data)) {
            CHECK_FALSE(p.emitted);
        }
    }
    SUBCASE("threshold 0.5 separates the planted gaps") {
        for (const auto& p : predict_split(index, 0.5, data)) {
            const bool high = p.sample_id.rfind("high", 0) == 0;
            CHECK(p.emitted == high);
            if (p.emitted) CHECK(p.predicted_label() == p.gap.nearest_label);
        }
    }
    SUBCASE("negative or non-finite thresholds are rejected") {
        CHECK_THROWS_AS(predict_split(index, -1.0, data), Error);
        CHECK_THROWS_AS(predict_split(index, std::nan(""), data), Error);
    }
}

TEST_CASE("categorize: all emitted, all correct") {
    const auto index = two_center_index();
    const auto data = testutil::make_dataset({{"p", {1.0}}, {"q", {9.0}}}, SplitRole::test);
    const auto predictions = predict_split(index, 0.0, data);
    const auto breakdown =
        categorize(predictions, {"p", "q"}, index.label_set());
    CHECK(breakdown.fraction(OutcomeCategory::predicted_accurate) == 1.0);
    CHECK(breakdown.fraction(OutcomeCategory::predicted) == 1.0);
    CHECK(breakdown.fraction(OutcomeCategory::non_predicted) == 0.0);
    for (auto leaf : {OutcomeCategory::predictable_predicted_inaccurate,
                      OutcomeCategory::unknown_predicted, OutcomeCategory::non_predicted_accurate,
                      OutcomeCategory::predictable_non_predicted_inaccurate,
                      OutcomeCategory::unknown_non_predicted}) {
        CHECK(breakdown.count(leaf) == 0);
    }
}

TEST_CASE("categorize: hand-built eight-sample case covers every leaf") {
    // Predictions are built directly; gap values only matter through
    // emitted/nearest.
    auto make = [](const std::string& id, bool emitted, const std::string& nearest) {
        Prediction p;
        p.sample_id = id;
        p.emitted = emitted;
        p.gap.nearest_label = nearest;
        p.gap.second_label = nearest == "a" ? "b" : "a";
        return p;
    };
    const std::set<std::string> training_labels{"a", "b"};
    std::vector<Prediction> predictions;
    std::vector<std::string> truths;

    // 2x predicted accurate
    predictions.push_back(make("s0", true, "a")); truths.push_back("a");
    predictions.push_back(make("s1", true, "b")); truths.push_back("b");
    // 1x predictable predicted inaccurate
    predictions.push_back(make("s2", true, "a")); truths.push_back("b");
    // 1x unknown predicted
    predictions.push_back(make("s3", true, "a")); truths.push_back("zz");
    // 1x non-predicted accurate
    predictions.push_back(make("s4", false, "b")); truths.push_back("b");
    // 2x predictable non-predicted inaccurate
    predictions.push_back(make("s5", false, "a")); truths.push_back("b");
    predictions.push_back(make("s6", false, "b")); truths.push_back("a");
    // 1x unknown non-predicted
    predictions.push_back(make("s7", false, "a")); truths.push_back("zz");

    const auto breakdown = categorize(predictions, truths, training_labels);
    CHECK(breakdown.fraction(OutcomeCategory::predicted_accurate) == doctest::Approx(2.0 / 8.0));
    CHECK(breakdown.fraction(OutcomeCategory::predictable_predicted_inaccurate) ==
          doctest::Approx(1.0 / 8.0));
    CHECK(breakdown.fraction(OutcomeCategory::unknown_predicted) == doctest::Approx(1.0 / 8.0));
    CHECK(breakdown.fraction(OutcomeCategory::non_predicted_accurate) ==
          doctest::Approx(1.0 / 8.0));
    CHECK(breakdown.fraction(OutcomeCategory::predictable_non_predicted_inaccurate) ==
          doctest::Approx(2.0 / 8.0));
    CHECK(breakdown.fraction(OutcomeCategory::unknown_non_predicted) ==
          doctest::Approx(1.0 / 8.0));
    CHECK(breakdown.fraction(OutcomeCategory::predicted) == doctest::Approx(4.0 / 8.0));
    CHECK(breakdown.fraction(OutcomeCategory::non_predicted) == doctest::Approx(4.0 / 8.0));
}

TEST_CASE("categorize input validation") {
    std::vector<Prediction> predictions(2);
    predictions[0].gap.nearest_label = "a";
    predictions[1].gap.nearest_label = "a";
    CHECK_THROWS_AS(categorize(predictions, {"a"}, {"a"}), Error);  // length mismatch
    CHECK_THROWS_AS(categorize(predictions, {"a", "b"}, {}), Error);  // no training labels
}

TEST_CASE("property: leaf fractions partition the set") {
    std::mt19937 rng(404);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> label_pick(0, 3);
    for (int iteration = 0; iteration < 200; ++iteration) {
        const std::set<std::string> training_labels{"l0", "l1", "l2"};
        std::vector<Prediction> predictions;
        std::vector<std::string> truths;
        const int n = 1 + label_pick(rng) * 7 + iteration % 13;
        for (int i = 0; i < n; ++i) {
            Prediction p;
            p.sample_id = "s" + std::to_string(i);
            p.emitted = coin(rng) == 1;
            p.gap.nearest_label = "l" + std::to_string(label_pick(rng) % 3);
            predictions.push_back(p);
            truths.push_back("l" + std::to_string(label_pick(rng)));  // l3 is unknown
        }
        const auto breakdown = categorize(predictions, truths, training_labels);
        double leaf_sum = 0.0;
        std::size_t count_sum = 0;
        for (std::size_t leaf = 0; leaf < 6; ++leaf) {
            leaf_sum += breakdown.fraction(static_cast<OutcomeCategory>(leaf));
            count_sum += breakdown.leaf_counts[leaf];
        }
        REQUIRE(count_sum == static_cast<std::size_t>(n));
        REQUIRE(std::abs(leaf_sum - 1.0) <= 1e-9);
        REQUIRE(breakdown.count(OutcomeCategory::predicted) +
                    breakdown.count(OutcomeCategory::non_predicted) ==
                static_cast<std::size_t>(n));
    }
}

TEST_CASE("evaluate on a separable split reaches 1.0 everywhere") {
    const auto train = testutil::make_dataset({
        {"A", {0.0, 0.0}},
        {"A", {0.2, -0.2}},
        {"B", {10.0, 10.0}},
        {"B", {9.8, 10.2}},
    });
    const auto index = compute_centroids(train);
    auto test = train;
    test.role = SplitRole::test;
    const auto calibration = calibrate(index, testutil::make_dataset(
        {{"A", {0.1, 0.1}}, {"B", {9.9, 9.9}}}, SplitRole::validation));
    const auto report = evaluate(index, calibration, test);
    CHECK(report.threshold == 0.0);
    CHECK(report.filtered_f1 == 1.0);
    CHECK(report.unfiltered_f1 == 1.0);
    REQUIRE(report.only_predictables_f1.has_value());
    CHECK(*report.only_predictables_f1 == 1.0);
    CHECK(report.only_predictables_count == 4);
    CHECK_FALSE(report.unknown_exclusion_rate.has_value());
    CHECK(report.unknown_count == 0);
    CHECK(report.accurate_loss_rate == 0.0);
}

TEST_CASE("evaluate: planted construction excludes every unknown") {
    const auto index = two_center_index();
    // Unknown-label samples get delta 0.1, known ones 0.9; threshold 0.5.
    Dataset test;
    test.dimensionality = 1;
    test.role = SplitRole::test;
    for (int i = 0; i < 5; ++i) {
        test.samples.push_back({"u" + std::to_string(i), "mystery", query_with_delta(0.1)});
        test.samples.push_back({"k" + std::to_string(i), "p", query_with_delta(0.9)});
    }
    CalibrationResult calibration;
    calibration.threshold = 0.5;
    calibration.metric = MetricKind::covered_micro_f1;

    const auto report = evaluate(index, calibration, test);
    REQUIRE(report.unknown_exclusion_rate.has_value());
    CHECK(*report.unknown_exclusion_rate == 1.0);
    CHECK(report.unknown_count == 5);
    CHECK(report.categories.count(OutcomeCategory::unknown_non_predicted) == 5);
    CHECK(report.categories.count(OutcomeCategory::predicted_accurate) == 5);
    CHECK(report.filtered_f1 == 1.0);
}

TEST_CASE("evaluate: covered metric equals predicted-accurate over predicted") {
    std::mt19937 rng(661);
    for (int iteration = 0; iteration < 50; ++iteration) {
        const auto train = testutil::random_dataset(rng, 60, 4, 5);
        const auto index = compute_centroids(train);
        auto validation = testutil::random_dataset(rng, 150, 4, 5, SplitRole::validation);
        auto test = testutil::random_dataset(rng, 150, 4, 6, SplitRole::test);  // class c5 unknown
        const auto calibration = calibrate(index, validation);
        const auto report = evaluate(index, calibration, test);

        const double predicted = report.categories.fraction(OutcomeCategory::predicted);
        const double accurate = report.categories.fraction(OutcomeCategory::predicted_accurate);
        if (predicted > 0.0) {
            REQUIRE(std::abs(report.filtered_f1 - accurate / predicted) <= 1e-9);
        } else {
            REQUIRE(report.filtered_f1 == 0.0);
        }
    }
}

TEST_CASE("evaluate: empty only-predictables subset stays undefined") {
    const auto index = two_center_index();
    Dataset test;
    test.dimensionality = 1;
    test.role = SplitRole::test;
    test.samples.push_back({"u0", "mystery", {1.0}});
    CalibrationResult calibration;
    calibration.threshold = 0.0;
    const auto report = evaluate(index, calibration, test);
    CHECK_FALSE(report.only_predictables_f1.has_value());
    CHECK(report.only_predictables_count == 0);
    CHECK(report.unfiltered_f1 == 0.0);
}

TEST_CASE("evaluate rejects an empty test split") {
    const auto index = two_center_index();
    Dataset empty;
    empty.dimensionality = 1;
    CalibrationResult calibration;
    CHECK_THROWS_AS(evaluate(index, calibration, empty), Error);
}

TEST_CASE("frequency partition boundary is strict") {
    std::map<std::string, std::size_t> counts{
        {"at_cutoff", 100}, {"above", 101}, {"tiny", 1}};
    const auto partition = frequency_partition(counts, 100);
    CHECK(partition.common == std::set<std::string>{"above"});
    CHECK(partition.rare == std::set<std::string>{"at_cutoff", "tiny"});

    SUBCASE("all labels below the cutoff leaves common empty") {
        const auto all_rare = frequency_partition(
            std::map<std::string, std::size_t>{{"a", 3}, {"b", 7}}, 100);
        CHECK(all_rare.common.empty());
        CHECK(all_rare.rare.size() == 2);
    }
    SUBCASE("dataset overload counts labels itself") {
        Dataset train;
        train.dimensionality = 1;
        for (int i = 0; i < 101; ++i) {
            train.samples.push_back({"c" + std::to_string(i), "frequent", {0.0}});
        }
        train.samples.push_back({"r0", "scarce", {1.0}});
        const auto p = frequency_partition(train, 100);
        CHECK(p.common == std::set<std::string>{"frequent"});
        CHECK(p.rare == std::set<std::string>{"scarce"});
    }
}

TEST_CASE("gap_histogram basics") {
    const std::map<std::string, std::size_t> counts{{"p", 200}, {"q", 5}};

    SUBCASE("single measurement fills one bin") {
        GapMeasurement m;
        m.nearest_label = "p";
        m.delta = 0.4;
        const auto histogram = gap_histogram({m}, {"p"}, counts,
                                             PartitionKind::known_vs_unknown, 10);
        REQUIRE(histogram.bin_edges.size() == 11);
        std::size_t total = 0;
        for (const auto& c : histogram.series.at("known")) total += c;
        CHECK(total == 1);
        // delta == max lands in the last bin
        CHECK(histogram.series.at("known").back() == 1);
        for (const auto& c : histogram.series.at("unknown")) CHECK(c == 0);
    }
    SUBCASE("all-zero deltas still give increasing edges") {
        GapMeasurement m;
        m.nearest_label = "p";
        m.delta = 0.0;
        const auto histogram =
            gap_histogram({m, m}, {"p", "zz"}, counts, PartitionKind::known_vs_unknown, 4);
        for (std::size_t i = 1; i < histogram.bin_edges.size(); ++i) {
            REQUIRE(histogram.bin_edges[i] > histogram.bin_edges[i - 1]);
        }
        CHECK(histogram.series.at("known")[0] == 1);
        CHECK(histogram.series.at("unknown")[0] == 1);
    }
    SUBCASE("common-vs-rare excludes unknown labels from both series") {
        std::vector<GapMeasurement> measurements(3);
        measurements[0].delta = 0.1;  // common (p: 200 > 100)
        measurements[1].delta = 0.2;  // rare (q: 5 <= 100)
        measurements[2].delta = 0.3;  // unknown label
        const auto histogram = gap_histogram(measurements, {"p", "q", "zz"}, counts,
                                             PartitionKind::common_vs_rare, 5);
        std::size_t common_total = 0, rare_total = 0;
        for (const auto& c : histogram.series.at("common")) common_total += c;
        for (const auto& c : histogram.series.at("rare")) rare_total += c;
        CHECK(common_total == 1);
        CHECK(rare_total == 1);
        CHECK(histogram.excluded_unknown == 1);
    }
    SUBCASE("bad inputs") {
        CHECK_THROWS_AS(
            gap_histogram({}, {}, counts, PartitionKind::known_vs_unknown, 10), Error);
        GapMeasurement m;
        CHECK_THROWS_AS(
            gap_histogram({m}, {"p"}, counts, PartitionKind::known_vs_unknown, 0), Error);
        CHECK_THROWS_AS(
            gap_histogram({m}, {"p", "q"}, counts, PartitionKind::known_vs_unknown, 10), Error);
    }
}

TEST_CASE("property: histogram series totals are conserved") {
    std::mt19937 rng(555);
    std::uniform_real_distribution<double> delta_dist(0.0, 5.0);
    std::uniform_int_distribution<std::size_t> bins_dist(1, 200);
    std::uniform_int_distribution<int> label_pick(0, 3);
    const std::map<std::string, std::size_t> counts{{"l0", 300}, {"l1", 50}, {"l2", 120}};

    for (int iteration = 0; iteration < 100; ++iteration) {
        const std::size_t n = 1 + static_cast<std::size_t>(label_pick(rng)) * 17 + iteration % 29;
        std::vector<GapMeasurement> measurements(n);
        std::vector<std::string> truths(n);
        std::size_t known = 0;
        for (std::size_t i = 0; i < n; ++i) {
            measurements[i].delta = delta_dist(rng);
            measurements[i].nearest_label = "l0";
            truths[i] = "l" + std::to_string(label_pick(rng));
            if (truths[i] != "l3") ++known;
        }
        const std::size_t bins = bins_dist(rng);
        const auto histogram =
            gap_histogram(measurements, truths, counts, PartitionKind::known_vs_unknown, bins);
        std::size_t known_total = 0, unknown_total = 0;
        for (const auto& c : histogram.series.at("known")) known_total += c;
        for (const auto& c : histogram.series.at("unknown")) unknown_total += c;
        REQUIRE(known_total == known);
        REQUIRE(unknown_total == n - known);
        REQUIRE(histogram.bin_edges.size() == bins + 1);
    }
}

TEST_CASE("gap separation shows up in the histogram (planted geometry)") {
    const auto index = two_center_index();
    std::vector<GapMeasurement> measurements;
    std::vector<std::string> truths;
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> low(0.05, 0.4), high(2.0, 4.0);
    for (int i = 0; i < 200; ++i) {
        GapMeasurement unknown_m;
        unknown_m.nearest_label = "p";
        unknown_m.delta = low(rng);
        measurements.push_back(unknown_m);
        truths.push_back("mystery");
        GapMeasurement known_m;
        known_m.nearest_label = "p";
        known_m.delta = high(rng);
        measurements.push_back(known_m);
        truths.push_back("p");
    }
    const auto histogram = gap_histogram(measurements, truths, {{"p", 10}, {"q", 10}},
                                         PartitionKind::known_vs_unknown, 40);
    double known_mean = 0.0, unknown_mean = 0.0;
    std::size_t known_n = 0, unknown_n = 0;
    for (std::size_t b = 0; b < 40; ++b) {
        const double mid = (histogram.bin_edges[b] + histogram.bin_edges[b + 1]) / 2.0;
        known_mean += mid * static_cast<double>(histogram.series.at("known")[b]);
        known_n += histogram.series.at("known")[b];
        unknown_mean += mid * static_cast<double>(histogram.series.at("unknown")[b]);
        unknown_n += histogram.series.at("unknown")[b];
    }
    known_mean /= static_cast<double>(known_n);
    unknown_mean /= static_cast<double>(unknown_n);
    CHECK(unknown_mean < known_mean);
}

TEST_CASE("baseline knn") {
    const auto train = testutil::make_dataset({
        {"a", {0.0, 0.0}},
        {"a", {1.0, 0.0}},
        {"b", {0.0, 1.0}},
        {"b", {5.0, 5.0}},
        {"c", {9.0, 9.0}},
    });

    SUBCASE("k=1 on a training point returns its label") {
        CHECK(baseline_knn_predict(train, 1, std::vector<double>{5.0, 5.0}) == "b");
        CHECK(baseline_knn_predict(train, 1, std::vector<double>{0.0, 0.0}) == "a");
    }
    SUBCASE("k=3 majority vote") {
        // Neighbors of (0.4, 0.2): a@(0,0), a@(1,0), b@(0,1) -> 2 a vs 1 b.
        CHECK(baseline_knn_predict(train, 3, std::vector<double>{0.4, 0.2}) == "a");
    }
    SUBCASE("k equal to the training size votes globally") {
        // 2 a, 2 b, 1 c -> tie between a and b, smaller label wins.
        CHECK(baseline_knn_predict(train, 5, std::vector<double>{0.0, 0.0}) == "a");
    }
    SUBCASE("bad k or dimension") {
        CHECK_THROWS_AS(baseline_knn_predict(train, 0, std::vector<double>{0.0, 0.0}), Error);
        CHECK_THROWS_AS(baseline_knn_predict(train, 6, std::vector<double>{0.0, 0.0}), Error);
        CHECK_THROWS_AS(baseline_knn_predict(train, 1, std::vector<double>{0.0}), Error);
    }
}

TEST_CASE("property: restricting to predictables never lowers the baseline") {
    std::mt19937 rng(912);
    for (int iteration = 0; iteration < 40; ++iteration) {
        const auto train = testutil::random_dataset(rng, 50, 4, 4);
        const auto index = compute_centroids(train);
        const bool with_unknowns = iteration % 2 == 0;
        const auto test = testutil::random_dataset(rng, 120, 4, with_unknowns ? 6 : 4,
                                                   SplitRole::test);
        CalibrationResult calibration;  // threshold 0, covered metric
        const auto report = evaluate(index, calibration, test);
        REQUIRE(report.only_predictables_f1.has_value());
        if (report.unknown_count > 0) {
            REQUIRE(*report.only_predictables_f1 >= report.unfiltered_f1);
        } else {
            REQUIRE(*report.only_predictables_f1 == report.unfiltered_f1);
        }
    }
}

TEST_CASE("property: evaluate is order-invariant over test samples") {
    std::mt19937 rng(913);
    const auto train = testutil::random_dataset(rng, 60, 4, 5);
    const auto index = compute_centroids(train);
    const auto validation = testutil::random_dataset(rng, 100, 4, 5, SplitRole::validation);
    const auto calibration = calibrate(index, validation);
    auto test = testutil::random_dataset(rng, 150, 4, 6, SplitRole::test);

    const auto base = evaluate(index, calibration, test);
    for (int shuffle = 0; shuffle < 5; ++shuffle) {
        std::shuffle(test.samples.begin(), test.samples.end(), rng);
        const auto permuted = evaluate(index, calibration, test);
        REQUIRE(permuted.filtered_f1 == base.filtered_f1);
        REQUIRE(permuted.unfiltered_f1 == base.unfiltered_f1);
        REQUIRE(permuted.only_predictables_f1 == base.only_predictables_f1);
        REQUIRE(permuted.unknown_exclusion_rate == base.unknown_exclusion_rate);
        REQUIRE(permuted.categories.leaf_counts == base.categories.leaf_counts);
    }
}

TEST_CASE("property: raising the threshold never emits more") {
    std::mt19937 rng(808);
    const auto train = testutil::random_dataset(rng, 50, 3, 4);
    const auto index = compute_centroids(train);
    const auto data = testutil::random_dataset(rng, 200, 3, 4, SplitRole::test);
    std::uniform_real_distribution<double> threshold_dist(0.0, 10.0);
    for (int iteration = 0; iteration < 50; ++iteration) {
        double t1 = threshold_dist(rng);
        double t2 = threshold_dist(rng);
        if (t1 > t2) std::swap(t1, t2);
        const auto at_t1 = predict_split(index, t1, data);
        const auto at_t2 = predict_split(index, t2, data);
        for (std::size_t i = 0; i < at_t1.size(); ++i) {
            if (at_t2[i].emitted) REQUIRE(at_t1[i].emitted);
        }
    }
}
