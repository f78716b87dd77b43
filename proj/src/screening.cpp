#include "nplda/screening.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nplda {

std::size_t TabularDataset::class_count(int label) const {
    std::size_t count = 0;
    for (int l : labels)
        if (l == label) ++count;
    return count;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        std::size_t b = 0;
        while (b < cell.size() && cell[b] == ' ') ++b;
        cells.push_back(cell.substr(b));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

TabularDataset read_labeled_csv(std::istream& in, const std::string& label_col,
                                const std::string& context) {
    std::string line;
    if (!std::getline(in, line)) throw IoError(context + ": empty file");
    const std::vector<std::string> header = split_csv_line(line);
    std::size_t label_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == label_col) label_idx = i;
    if (label_idx == header.size())
        throw IoError(context + ": label column '" + label_col + "' not found");

    TabularDataset data;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (i != label_idx) data.feature_names.push_back(header[i]);
    const std::size_t p = data.feature_names.size();

    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw IoError(context + ": row " + std::to_string(rows + 2) + " has " +
                          std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(header.size()));
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].empty())
                throw IoError(context + ": missing value at row " + std::to_string(rows + 2));
            double v = 0.0;
            try {
                v = std::stod(cells[i]);
            } catch (const std::exception&) {
                throw IoError(context + ": non-numeric cell '" + cells[i] + "' at row " +
                              std::to_string(rows + 2));
            }
            if (i == label_idx) {
                if (v != 0.0 && v != 1.0)
                    throw IoError(context + ": label must be 0 or 1, got " + cells[i]);
                data.labels.push_back(static_cast<int>(v));
            } else {
                values.push_back(v);
            }
        }
        ++rows;
    }
    if (data.class_count(0) == 0 || data.class_count(1) == 0)
        throw InsufficientSamples(context + ": both classes must be present");
    data.features = Matrix(rows, p);
    std::copy(values.begin(), values.end(), data.features.data());
    return data;
}

TabularDataset read_labeled_csv(const std::string& path, const std::string& label_col) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open data file: " + path);
    return read_labeled_csv(in, label_col, path);
}

TabularDataset subset(const TabularDataset& data, std::span<const std::size_t> rows) {
    TabularDataset out;
    out.feature_names = data.feature_names;
    out.features = Matrix(rows.size(), data.num_features());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto src = data.features.row(rows[i]);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
        out.labels.push_back(data.labels[rows[i]]);
    }
    return out;
}

TTestResult two_sample_t(const TabularDataset& data, std::size_t feature_index) {
    if (feature_index >= data.num_features())
        throw DimensionMismatch("two_sample_t: feature index out of range");
    double sum[2] = {0.0, 0.0};
    std::size_t count[2] = {0, 0};
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int cls = data.labels[i];
        sum[cls] += data.features.at(i, feature_index);
        ++count[cls];
    }
    if (count[0] < 2 || count[1] < 2)
        throw InsufficientSamples("two_sample_t requires at least two samples per class");
    const double mean0 = sum[0] / static_cast<double>(count[0]);
    const double mean1 = sum[1] / static_cast<double>(count[1]);
    double ss = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double centered =
            data.features.at(i, feature_index) - (data.labels[i] == 0 ? mean0 : mean1);
        ss += centered * centered;
    }
    const double df = static_cast<double>(count[0] + count[1] - 2);
    const double pooled_var = ss / df;
    if (!(pooled_var > 0.0)) {
        warn("two_sample_t: zero pooled variance, p-value forced to 1");
        return {0.0, 1.0};
    }
    const double se = std::sqrt(pooled_var * (1.0 / static_cast<double>(count[0]) +
                                              1.0 / static_cast<double>(count[1])));
    const double t = (mean0 - mean1) / se;
    const double p = 2.0 * (1.0 - student_t_cdf(std::fabs(t), df));
    return {t, std::min(p, 1.0)};
}

std::vector<std::size_t> screen_top_k(const TabularDataset& data, std::size_t k) {
    const std::size_t total = data.num_features();
    if (k > total)
        throw DimensionMismatch("screen_top_k: k exceeds the number of features");
    std::vector<std::pair<double, std::size_t>> ranked(total);
    for (std::size_t j = 0; j < total; ++j) ranked[j] = {two_sample_t(data, j).p_value, j};
    std::stable_sort(ranked.begin(), ranked.end());
    std::vector<std::size_t> selected(k);
    for (std::size_t j = 0; j < k; ++j) selected[j] = ranked[j].second;
    return selected;
}

SplitIndices stratified_split(const std::vector<int>& labels, double train_frac, SeedSpec seed) {
    if (!(train_frac > 0.0 && train_frac < 1.0))
        throw InvalidLevel("stratified_split requires train_frac in (0,1)");
    RngStream rng(seed);
    SplitIndices out;
    for (int cls = 0; cls <= 1; ++cls) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls) rows.push_back(i);
        const std::vector<std::size_t> perm = random_permutation(rows.size(), rng);
        const auto n_train =
            static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(rows.size())));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i < n_train)
                out.train_rows.push_back(rows[perm[i]]);
            else
                out.test_rows.push_back(rows[perm[i]]);
        }
    }
    return out;
}

ScreenReport run_screen_eval(const TabularDataset& data, const ScreenPlan& plan) {
    if (plan.top_k < 1 || plan.top_k > data.num_features())
        throw DimensionMismatch("run_screen_eval: top_k out of range");
    const auto n0_train =
        std::llround(plan.train_frac * static_cast<double>(data.class_count(0)));
    const auto n1_train =
        std::llround(plan.train_frac * static_cast<double>(data.class_count(1)));
    if (n0_train + n1_train < static_cast<long>(plan.top_k) + 3)
        throw InsufficientSamples("run_screen_eval: training rows cannot support top_k features");

    ScreenReport report;
    double sum1 = 0.0, sum2 = 0.0;
    std::size_t violations = 0;
    for (int rep = 0; rep < plan.reps; ++rep) {
        const SeedSpec rep_seed{
            mix_seed(plan.seed.base_seed, plan.seed.stream_index, static_cast<std::uint64_t>(rep), 0),
            0};
        const SplitIndices split = stratified_split(data.labels, plan.train_frac, rep_seed);
        const TabularDataset train = subset(data, split.train_rows);

        ScreenRepetition record;
        record.rep_index = rep;
        try {
            record.selected_features = screen_top_k(train, plan.top_k);

            std::vector<std::size_t> rows0, rows1;
            for (std::size_t i = 0; i < train.size(); ++i)
                (train.labels[i] == 0 ? rows0 : rows1).push_back(i);
            LabeledSample sample{Matrix(rows0.size(), plan.top_k),
                                 Matrix(rows1.size(), plan.top_k)};
            for (std::size_t i = 0; i < rows0.size(); ++i)
                for (std::size_t j = 0; j < plan.top_k; ++j)
                    sample.x0.at(i, j) = train.features.at(rows0[i], record.selected_features[j]);
            for (std::size_t i = 0; i < rows1.size(); ++i)
                for (std::size_t j = 0; j < plan.top_k; ++j)
                    sample.x1.at(i, j) = train.features.at(rows1[i], record.selected_features[j]);

            const SampleStats stats = compute_stats(sample);
            const LinearClassifier clf = elda_train(stats, plan.levels);
            record.threshold = clf.threshold;

            std::size_t miss0 = 0, miss1 = 0, count0 = 0, count1 = 0;
            Vec x(plan.top_k);
            for (std::size_t row : split.test_rows) {
                for (std::size_t j = 0; j < plan.top_k; ++j)
                    x[j] = data.features.at(row, record.selected_features[j]);
                const int label = predict(clf, x);
                if (data.labels[row] == 0) {
                    ++count0;
                    if (label == 1) ++miss0;
                } else {
                    ++count1;
                    if (label == 0) ++miss1;
                }
            }
            if (count0 == 0 || count1 == 0)
                throw InsufficientSamples("run_screen_eval: empty test class");
            record.type1_emp = static_cast<double>(miss0) / static_cast<double>(count0);
            record.type2_emp = static_cast<double>(miss1) / static_cast<double>(count1);

            ++report.ok_count;
            sum1 += record.type1_emp;
            sum2 += record.type2_emp;
            if (record.type1_emp > plan.levels.alpha) ++violations;
        } catch (const Error& e) {
            record.status = "error:" + e.code();
        }
        report.repetitions.push_back(std::move(record));
    }
    if (report.ok_count > 0) {
        report.mean_type1 = sum1 / report.ok_count;
        report.mean_type2 = sum2 / report.ok_count;
        report.violation_rate = static_cast<double>(violations) / report.ok_count;
    }
    return report;
}

void write_screen_csv(std::ostream& out, const ScreenReport& report) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    out << "rep_index,status,threshold,type1_emp,type2_emp,selected_features\n";
    for (const ScreenRepetition& rep : report.repetitions) {
        out << rep.rep_index << ',' << rep.status << ',';
        if (rep.status == "ok")
            out << fmt(rep.threshold) << ',' << fmt(rep.type1_emp) << ',' << fmt(rep.type2_emp);
        else
            out << ",,";
        out << ',';
        for (std::size_t i = 0; i < rep.selected_features.size(); ++i) {
            if (i) out << ' ';
            out << rep.selected_features[i];
        }
        out << '\n';
    }
    out << "# mean_type1=" << fmt(report.mean_type1) << " mean_type2=" << fmt(report.mean_type2)
        << " violation_rate=" << fmt(report.violation_rate) << " ok=" << report.ok_count << '\n';
}

}  // namespace nplda
