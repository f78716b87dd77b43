#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nplda/classifiers.hpp"

namespace nplda {

// External tabular data with binary labels.
struct TabularDataset {
    Matrix features;  // N x P
    std::vector<int> labels;
    std::vector<std::string> feature_names;

    std::size_t size() const noexcept { return features.rows(); }
    std::size_t num_features() const noexcept { return features.cols(); }
    std::size_t class_count(int label) const;
};

// CSV ingestion: header row, one {0,1} label column selected by name, all
// remaining columns numeric.  Missing or non-numeric cells are errors.
TabularDataset read_labeled_csv(const std::string& path, const std::string& label_col);
TabularDataset read_labeled_csv(std::istream& in, const std::string& label_col,
                                const std::string& context);

// Rows restricted to the given indices, order preserved.
TabularDataset subset(const TabularDataset& data, std::span<const std::size_t> rows);

struct TTestResult {
    double t_stat = 0.0;
    double p_value = 1.0;
};

// Pooled-variance two-sample t statistic (class 0 mean minus class 1 mean)
// with a two-sided p-value on n0 + n1 - 2 degrees of freedom.  Zero pooled
// variance degenerates to p = 1 with a warning.
TTestResult two_sample_t(const TabularDataset& data, std::size_t feature_index);

// Indices of the k smallest p-values; ties broken by smaller index.
std::vector<std::size_t> screen_top_k(const TabularDataset& data, std::size_t k);

// Repeated stratified split evaluation.
struct ScreenPlan {
    std::size_t top_k = 40;
    double train_frac = 0.7;
    int reps = 100;
    NpLevels levels{0.05, 0.1};
    SeedSpec seed;
};

struct SplitIndices {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
};

// Per-class seeded permutation; exactly round(train_frac * n_a) training
// rows per class.
SplitIndices stratified_split(const std::vector<int>& labels, double train_frac, SeedSpec seed);

struct ScreenRepetition {
    int rep_index = 0;
    std::string status = "ok";
    double threshold = 0.0;
    double type1_emp = 0.0;
    double type2_emp = 0.0;
    std::vector<std::size_t> selected_features;
};

struct ScreenReport {
    std::vector<ScreenRepetition> repetitions;
    int ok_count = 0;
    double mean_type1 = 0.0;
    double mean_type2 = 0.0;
    double violation_rate = 0.0;  // empirical type I above alpha
};

// Per repetition: stratified split, screening on the training rows only,
// non-splitting classifier training on the screened features, empirical
// errors on the held-out rows.
ScreenReport run_screen_eval(const TabularDataset& data, const ScreenPlan& plan);

void write_screen_csv(std::ostream& out, const ScreenReport& report);

}  // namespace nplda
