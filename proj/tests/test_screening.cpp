#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nplda/sampling.hpp"
#include "nplda/screening.hpp"
#include "oracles.hpp"

using namespace nplda;

namespace {

TabularDataset dataset_from(const Matrix& x0, const Matrix& x1) {
    TabularDataset data;
    const std::size_t p = x0.cols();
    data.features = Matrix(x0.rows() + x1.rows(), p);
    for (std::size_t i = 0; i < x0.rows(); ++i) {
        std::copy(x0.row(i).begin(), x0.row(i).end(), data.features.row(i).begin());
        data.labels.push_back(0);
    }
    for (std::size_t i = 0; i < x1.rows(); ++i) {
        std::copy(x1.row(i).begin(), x1.row(i).end(),
                  data.features.row(x0.rows() + i).begin());
        data.labels.push_back(1);
    }
    for (std::size_t j = 0; j < p; ++j) data.feature_names.push_back("f" + std::to_string(j));
    return data;
}

// LDA-style data with `informative` signal features followed by pure noise.
TabularDataset synthetic_dataset(std::size_t n0, std::size_t n1, std::size_t total_features,
                                 std::size_t informative, double effect, std::uint64_t seed) {
    RngStream rng(SeedSpec{seed, 0});
    Matrix x0(n0, total_features), x1(n1, total_features);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < total_features; ++j) x0.at(i, j) = rng.next_normal();
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < total_features; ++j)
            x1.at(i, j) = rng.next_normal() + (j < informative ? effect : 0.0);
    return dataset_from(x0, x1);
}

int warn_count = 0;
void counting_handler(const std::string&) { ++warn_count; }

}  // namespace

TEST_CASE("two-sample t on the hand case") {
    Matrix x0(3, 1), x1(3, 1);
    x0.at(0, 0) = 1.0;
    x0.at(1, 0) = 2.0;
    x0.at(2, 0) = 3.0;
    x1.at(0, 0) = 2.0;
    x1.at(1, 0) = 3.0;
    x1.at(2, 0) = 4.0;
    const TabularDataset data = dataset_from(x0, x1);
    const TTestResult result = two_sample_t(data, 0);
    CHECK(result.t_stat == doctest::Approx(-1.2247).epsilon(1e-4));
    CHECK(result.p_value == doctest::Approx(0.288).epsilon(2e-3));
    // quadrature oracle for the two-sided p-value
    const double oracle_p = 2.0 * (1.0 - oracles::student_t_cdf_quadrature(1.22474487, 4.0));
    CHECK(std::fabs(result.p_value - oracle_p) < 1e-6);
}

TEST_CASE("constant features degenerate to p = 1 with a warning") {
    Matrix x0(3, 1), x1(3, 1);
    for (std::size_t i = 0; i < 3; ++i) {
        x0.at(i, 0) = 7.0;
        x1.at(i, 0) = 7.0;
    }
    warn_count = 0;
    auto prev = set_warn_handler(&counting_handler);
    const TTestResult result = two_sample_t(dataset_from(x0, x1), 0);
    CHECK(result.p_value == 1.0);
    CHECK(warn_count == 1);
    set_warn_handler(prev);
}

TEST_CASE("p-value vanishes as separation dominates jitter") {
    double prev_p = 1.1;
    for (double eps : {0.5, 0.1, 0.01}) {
        Matrix x0(2, 1), x1(2, 1);
        x0.at(0, 0) = 0.0 - eps;
        x0.at(1, 0) = 0.0 + eps;
        x1.at(0, 0) = 1.0 - eps;
        x1.at(1, 0) = 1.0 + eps;
        const TTestResult result = two_sample_t(dataset_from(x0, x1), 0);
        CHECK(result.p_value < prev_p);
        prev_p = result.p_value;
    }
    CHECK(prev_p < 1e-3);
}

TEST_CASE("screening ranks a separating feature first") {
    const TabularDataset data = synthetic_dataset(40, 40, 50, 1, 3.0, 5);
    const auto top = screen_top_k(data, 5);
    REQUIRE(top.size() == 5);
    CHECK(top[0] == 0);

    const auto all = screen_top_k(data, 50);
    CHECK(all.size() == 50);
    CHECK_THROWS_AS(screen_top_k(data, 51), DimensionMismatch);
}

TEST_CASE("ties break toward the smaller index") {
    Matrix x0(3, 4), x1(3, 4);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            x0.at(i, j) = 1.0;
            x1.at(i, j) = 1.0;
        }
    auto prev = set_warn_handler(&counting_handler);
    const auto top = screen_top_k(dataset_from(x0, x1), 2);
    set_warn_handler(prev);
    CHECK(top == std::vector<std::size_t>{0, 1});
}

TEST_CASE("stratified split keeps exact per-class counts") {
    std::vector<int> labels;
    for (int i = 0; i < 31; ++i) labels.push_back(0);
    for (int i = 0; i < 150; ++i) labels.push_back(1);
    const SplitIndices split = stratified_split(labels, 0.7, SeedSpec{4, 0});
    std::size_t train0 = 0, train1 = 0;
    for (std::size_t row : split.train_rows) (labels[row] == 0 ? train0 : train1) += 1;
    CHECK(train0 == 22);  // round(0.7 * 31)
    CHECK(train1 == 105);
    CHECK(split.train_rows.size() + split.test_rows.size() == labels.size());

    const SplitIndices again = stratified_split(labels, 0.7, SeedSpec{4, 0});
    CHECK(split.train_rows == again.train_rows);
}

TEST_CASE("screen evaluation on synthetic high-dimensional data") {
    // Shape mimics a small expression study: n0 = 83, n1 = 91, p = 2000.
    const TabularDataset data = synthetic_dataset(83, 91, 2000, 40, 1.5, 99);
    ScreenPlan plan;
    plan.top_k = 40;
    plan.train_frac = 0.7;
    plan.reps = 50;
    plan.levels = NpLevels(0.1, 0.1);
    plan.seed = SeedSpec{17, 0};
    const ScreenReport report = run_screen_eval(data, plan);
    CHECK(report.ok_count == 50);
    CHECK(report.mean_type1 <= plan.levels.alpha);
    CHECK(report.mean_type2 < 0.9);

    const ScreenReport again = run_screen_eval(data, plan);
    CHECK(report.mean_type1 == again.mean_type1);
    CHECK(report.mean_type2 == again.mean_type2);
    for (std::size_t i = 0; i < report.repetitions.size(); ++i)
        CHECK(report.repetitions[i].selected_features == again.repetitions[i].selected_features);
}

TEST_CASE("well separated data keeps the observed violation rate small") {
    const TabularDataset data = synthetic_dataset(83, 91, 400, 40, 1.5, 123);
    ScreenPlan plan;
    plan.top_k = 40;
    plan.reps = 100;
    plan.levels = NpLevels(0.01, 0.05);
    plan.seed = SeedSpec{18, 0};
    const ScreenReport report = run_screen_eval(data, plan);
    CHECK(report.ok_count == 100);
    CHECK(report.violation_rate <= 0.15);
}

TEST_CASE("screening sees only training rows") {
    // Plant a sentinel feature that separates the classes only on rows the
    // split holds out; leak-free screening must not favor it.
    const std::size_t total_features = 200;
    const std::size_t k = 10;
    const int trials = 50;
    int sentinel_hits = 0;
    for (int trial = 0; trial < trials; ++trial) {
        TabularDataset data = synthetic_dataset(40, 40, total_features, 0, 0.0, 1000 + trial);
        const SeedSpec trial_seed{static_cast<std::uint64_t>(trial), 0};
        ScreenPlan plan;
        plan.top_k = k;
        plan.train_frac = 0.7;
        plan.reps = 1;
        plan.levels = NpLevels(0.1, 0.1);
        plan.seed = trial_seed;
        // the split depends only on labels, train_frac and the seed
        const SeedSpec rep_seed{mix_seed(trial_seed.base_seed, trial_seed.stream_index, 0, 0), 0};
        const SplitIndices split = stratified_split(data.labels, plan.train_frac, rep_seed);
        for (std::size_t row : split.test_rows)
            data.features.at(row, 0) = data.labels[row] == 0 ? -10.0 : 10.0;

        const ScreenReport report = run_screen_eval(data, plan);
        REQUIRE(report.repetitions.size() == 1);
        const auto& selected = report.repetitions[0].selected_features;

        // the pipeline's selection must equal a from-scratch screen of the
        // training subset through the public pieces
        const TabularDataset train = subset(data, split.train_rows);
        CHECK(selected == screen_top_k(train, k));

        for (std::size_t idx : selected)
            if (idx == 0) ++sentinel_hits;
    }
    // chance rate is k / total_features = 5%; 9/50 is a > 3.5 sigma excess
    CHECK(sentinel_hits <= 9);
}

TEST_CASE("csv ingestion") {
    std::istringstream in(
        "g1,label,g2\n"
        "0.5, 0, 1.25\n"
        "0.25,1,-3\n"
        "1.5,0,2.5\n"
        "2.5,1,0\n");
    const TabularDataset data = read_labeled_csv(in, "label", "test");
    CHECK(data.size() == 4);
    CHECK(data.num_features() == 2);
    CHECK(data.feature_names == std::vector<std::string>{"g1", "g2"});
    CHECK(data.labels == std::vector<int>{0, 1, 0, 1});
    CHECK(data.features.at(1, 1) == -3.0);

    std::istringstream missing("a,label\n,1\n");
    CHECK_THROWS_AS(read_labeled_csv(missing, "label", "test"), IoError);
    std::istringstream bad_label("a,label\n1.0,2\n");
    CHECK_THROWS_AS(read_labeled_csv(bad_label, "label", "test"), IoError);
    std::istringstream no_col("a,b\n1.0,2.0\n");
    CHECK_THROWS_AS(read_labeled_csv(no_col, "label", "test"), IoError);
    std::istringstream one_class("a,label\n1.0,1\n2.0,1\n");
    CHECK_THROWS_AS(read_labeled_csv(one_class, "label", "test"), InsufficientSamples);
}

TEST_CASE("screen report csv") {
    const TabularDataset data = synthetic_dataset(30, 30, 60, 10, 1.5, 55);
    ScreenPlan plan;
    plan.top_k = 10;
    plan.reps = 3;
    plan.levels = NpLevels(0.1, 0.1);
    plan.seed = SeedSpec{2, 0};
    const ScreenReport report = run_screen_eval(data, plan);
    std::ostringstream out;
    write_screen_csv(out, report);
    CHECK(out.str().rfind("rep_index,status,threshold,type1_emp,type2_emp,selected_features\n",
                          0) == 0);
    CHECK(out.str().find("violation_rate=") != std::string::npos);
}
