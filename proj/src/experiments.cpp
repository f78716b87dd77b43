#include "nplda/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace nplda {

std::string method_name(Method m) {
    switch (m) {
        case Method::elda: return "elda";
        case Method::felda: return "felda";
        case Method::umbrella_lda: return "umbrella_lda";
        case Method::oracle: return "oracle";
    }
    return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
    if (name == "elda") return Method::elda;
    if (name == "felda") return Method::felda;
    if (name == "umbrella_lda") return Method::umbrella_lda;
    if (name == "oracle") return Method::oracle;
    return std::nullopt;
}

void ExperimentConfig::validate_and_normalize() {
    if (beta_scale.has_value() == calibrate_target_type2.has_value())
        throw ConfigError("exactly one of beta_scale / calibrate_target_type2 must be set");
    if (p_grid.empty()) {
        if (p == 0) throw ConfigError("either p or p_grid must be given");
        p_grid = {p};
    }
    if (n0_grid.empty()) throw ConfigError("n0_grid must be nonempty");
    if (n1_grid.empty()) n1_grid = n0_grid;
    if (reps < 1) throw ConfigError("reps must be >= 1");
    if (test_per_class < 1) throw ConfigError("test_per_class must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw ConfigError("alpha and delta must lie in (0,1)");
    if (!(split_frac > 0.0 && split_frac < 1.0))
        throw ConfigError("split_frac must lie in (0,1)");
    if (methods.empty()) throw ConfigError("methods must be nonempty");
    if (beta_scale) {
        if (p0 < 1) throw ConfigError("beta_scale requires p0 >= 1");
        for (std::size_t pv : p_grid)
            if (p0 > pv) throw ConfigError("p0 exceeds a grid dimension");
    }
    const std::size_t len = std::max({n0_grid.size(), n1_grid.size(), p_grid.size()});
    for (const auto* grid : {&n0_grid, &n1_grid, &p_grid})
        if (grid->size() != 1 && grid->size() != len)
            throw ConfigError("grid lengths must be 1 or equal to the axis length");
    if (distribution.kind == Distribution::student_t && !(distribution.df > 0.0))
        throw ConfigError("student_t requires df > 0");
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg) {
    const std::size_t len = std::max({cfg.n0_grid.size(), cfg.n1_grid.size(), cfg.p_grid.size()});
    auto pick = [](const std::vector<std::size_t>& grid, std::size_t i) {
        return grid.size() == 1 ? grid[0] : grid[i];
    };
    std::vector<GridPoint> points(len);
    for (std::size_t i = 0; i < len; ++i) {
        GridPoint& g = points[i];
        g.index = i;
        g.n0 = pick(cfg.n0_grid, i);
        g.n1 = pick(cfg.n1_grid, i);
        g.p = pick(cfg.p_grid, i);
        if (cfg.p_grid.size() > 1)
            g.axis_value = static_cast<double>(g.p);
        else if (cfg.n0_grid.size() > 1)
            g.axis_value = static_cast<double>(g.n0);
        else if (cfg.n1_grid.size() > 1)
            g.axis_value = static_cast<double>(g.n1);
        else
            g.axis_value = static_cast<double>(g.n0);
    }
    return points;
}

LdaModel config_model(const ExperimentConfig& cfg, std::size_t p) {
    SpdMatrix sigma = ar1_matrix(p, cfg.rho);
    Vec beta(p, 0.0);
    if (cfg.beta_scale) {
        for (std::size_t i = 0; i < cfg.p0 && i < p; ++i) beta[i] = *cfg.beta_scale;
    } else {
        const double scale =
            calibrate_flat_beta(p, cfg.rho, Probability(cfg.alpha), *cfg.calibrate_target_type2);
        for (double& b : beta) b = scale;
    }
    Vec mu_d = beta_to_mu_d(beta, sigma);
    return LdaModel(Vec(p, 0.0), std::move(mu_d), std::move(sigma));
}

namespace {

constexpr std::uint64_t kRoleTrain = 1;
constexpr std::uint64_t kRoleTest = 2;
constexpr std::uint64_t kRoleSplit = 3;

struct TrainedMethod {
    Method method;
    std::string status = "ok";
    std::optional<LinearClassifier> clf;
};

TrainedMethod train_method(Method method, const ExperimentConfig& cfg, const LdaModel& model,
                           const LabeledSample& sample, const SampleStats* stats,
                           const std::string& stats_status, SeedSpec split_seed) {
    TrainedMethod out{method, "ok", std::nullopt};
    const NpLevels levels(cfg.alpha, cfg.delta);
    try {
        switch (method) {
            case Method::elda:
                if (!stats) { out.status = stats_status; break; }
                out.clf = elda_train(*stats, levels);
                break;
            case Method::felda:
                if (!stats) { out.status = stats_status; break; }
                out.clf = felda_train(*stats, levels);
                break;
            case Method::umbrella_lda: {
                const UmbrellaClassifier umbrella =
                    umbrella_train(sample, levels, cfg.split_frac, lda_scorer(), split_seed);
                out.clf = umbrella.as_linear();
                break;
            }
            case Method::oracle:
                out.clf = oracle_classifier(model, Probability(cfg.alpha));
                break;
        }
    } catch (const InsufficientSamples&) {
        out.status = "infeasible";
    } catch (const Error& e) {
        out.status = "error:" + e.code();
    }
    if (out.status == "ok" && !out.clf) out.status = "error:internal";
    return out;
}

std::vector<RepetitionRecord> run_repetition(const ExperimentConfig& cfg, const GridPoint& grid,
                                             const LdaModel& model, int rep) {
    const auto gi = static_cast<std::uint64_t>(grid.index);
    const auto ri = static_cast<std::uint64_t>(rep);
    const SeedSpec train_seed{mix_seed(cfg.base_seed, gi, ri, kRoleTrain), 0};
    const SeedSpec test_seed{mix_seed(cfg.base_seed, gi, ri, kRoleTest), 0};
    const SeedSpec split_seed{mix_seed(cfg.base_seed, gi, ri, kRoleSplit), 0};

    const bool gaussian = cfg.distribution.kind == Distribution::gaussian;
    const LabeledSample sample =
        gaussian ? sample_gaussian(model, grid.n0, grid.n1, train_seed)
                 : sample_student_t(model, cfg.distribution.df, grid.n0, grid.n1, train_seed);

    std::optional<SampleStats> stats;
    std::string stats_status = "ok";
    try {
        stats = compute_stats(sample);
    } catch (const InsufficientSamples&) {
        stats_status = "infeasible";
    } catch (const Error& e) {
        stats_status = "error:" + e.code();
    }

    std::vector<TrainedMethod> trained;
    trained.reserve(cfg.methods.size());
    for (Method method : cfg.methods)
        trained.push_back(train_method(method, cfg, model, sample,
                                       stats ? &*stats : nullptr, stats_status, split_seed));

    // One shared streaming pass over the seeded test set.
    std::vector<std::size_t> miss0(trained.size(), 0), miss1(trained.size(), 0);
    {
        RngStream rng(test_seed);
        const std::size_t p = grid.p;
        const Matrix& chol = model.sigma().cholesky_factor();
        Vec z(p), x(p);
        const double df = cfg.distribution.df;
        for (int cls = 0; cls <= 1; ++cls) {
            const Vec& mean = (cls == 0) ? model.mu0() : model.mu1();
            for (std::size_t i = 0; i < cfg.test_per_class; ++i) {
                rng.fill_normal(z.data(), p);
                lower_tri_matvec(chol, z, x);
                double scale = 1.0;
                if (!gaussian) scale = std::sqrt(df / rng.next_chi_squared(df));
                for (std::size_t j = 0; j < p; ++j) x[j] = mean[j] + scale * x[j];
                for (std::size_t t = 0; t < trained.size(); ++t) {
                    if (!trained[t].clf) continue;
                    const int label = predict(*trained[t].clf, x);
                    if (cls == 0 && label == 1) ++miss0[t];
                    if (cls == 1 && label == 0) ++miss1[t];
                }
            }
        }
    }

    std::vector<RepetitionRecord> records;
    records.reserve(trained.size());
    for (std::size_t t = 0; t < trained.size(); ++t) {
        RepetitionRecord rec;
        rec.method = method_name(trained[t].method);
        rec.rep_index = rep;
        rec.n0 = grid.n0;
        rec.n1 = grid.n1;
        rec.p = grid.p;
        rec.alpha = cfg.alpha;
        rec.delta = cfg.delta;
        rec.axis_value = grid.axis_value;
        rec.status = trained[t].status;
        if (trained[t].clf) {
            const LinearClassifier& clf = *trained[t].clf;
            rec.threshold = clf.threshold;
            rec.type1_emp =
                static_cast<double>(miss0[t]) / static_cast<double>(cfg.test_per_class);
            rec.type2_emp =
                static_cast<double>(miss1[t]) / static_cast<double>(cfg.test_per_class);
            if (gaussian) {
                const PopulationErrors pop = population_errors(model, clf);
                rec.type1_pop = pop.type1;
                rec.type2_pop = pop.type2;
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<AggregateRow> aggregate(const ExperimentConfig& cfg,
                                    const std::vector<GridPoint>& grid,
                                    const std::vector<RepetitionRecord>& records) {
    std::vector<AggregateRow> rows;
    for (Method method : cfg.methods) {
        const std::string name = method_name(method);
        for (const GridPoint& g : grid) {
            AggregateRow row;
            row.method = name;
            row.axis_value = g.axis_value;
            std::size_t ok = 0, total = 0, violations = 0;
            double sum1 = 0.0, sum2 = 0.0;
            for (const RepetitionRecord& rec : records) {
                if (rec.method != name || rec.axis_value != g.axis_value) continue;
                ++total;
                if (!rec.ok()) continue;
                ++ok;
                sum1 += rec.type1_emp;
                sum2 += rec.type2_emp;
                const double type1 = rec.type1_pop ? *rec.type1_pop : rec.type1_emp;
                // 1e-12 boundary slack: the oracle sits exactly at alpha and
                // must not register as violating through roundoff.
                if (type1 > cfg.alpha + 1e-12) ++violations;
            }
            row.feasible_fraction = total ? static_cast<double>(ok) / static_cast<double>(total) : 0.0;
            if (ok > 0) {
                row.mean_type1 = sum1 / static_cast<double>(ok);
                row.mean_type2 = sum2 / static_cast<double>(ok);
                row.violation_rate = static_cast<double>(violations) / static_cast<double>(ok);
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg_in, int workers) {
    ExperimentConfig cfg = cfg_in;
    cfg.validate_and_normalize();
    const std::vector<GridPoint> grid = expand_grid(cfg);

    std::vector<LdaModel> models;
    models.reserve(grid.size());
    for (const GridPoint& g : grid) models.push_back(config_model(cfg, g.p));

    const std::size_t tasks = grid.size() * static_cast<std::size_t>(cfg.reps);
    std::vector<std::vector<RepetitionRecord>> slots(tasks);

    auto run_task = [&](std::size_t task) {
        const std::size_t gi = task / static_cast<std::size_t>(cfg.reps);
        const int rep = static_cast<int>(task % static_cast<std::size_t>(cfg.reps));
        slots[task] = run_repetition(cfg, grid[gi], models[gi], rep);
    };

    if (workers <= 1) {
        for (std::size_t task = 0; task < tasks; ++task) run_task(task);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const int count = std::min<int>(workers, static_cast<int>(tasks));
        pool.reserve(count);
        for (int w = 0; w < count; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t task = next.fetch_add(1);
                    if (task >= tasks) return;
                    run_task(task);
                }
            });
        for (auto& t : pool) t.join();
    }

    ExperimentResult result;
    for (auto& slot : slots)
        for (auto& rec : slot) result.records.push_back(std::move(rec));
    std::stable_sort(result.records.begin(), result.records.end(),
                     [](const RepetitionRecord& a, const RepetitionRecord& b) {
                         if (a.method != b.method) return a.method < b.method;
                         if (a.axis_value != b.axis_value) return a.axis_value < b.axis_value;
                         return a.rep_index < b.rep_index;
                     });
    result.aggregates = aggregate(cfg, grid, result.records);
    return result;
}

ExperimentConfig builtin_config(const std::string& example_id) {
    const std::vector<std::size_t> n_axis{20, 70, 120, 170, 220, 270, 320, 370, 500, 1000};
    const std::vector<std::size_t> p_axis{3, 6, 9, 12, 15, 18, 21, 24, 27, 30};

    ExperimentConfig cfg;
    cfg.name = example_id;
    cfg.rho = 0.5;
    cfg.beta_scale = 1.2;
    cfg.p = 3;
    cfg.p0 = 3;
    cfg.alpha = 0.1;
    cfg.delta = 0.1;
    cfg.reps = 1000;
    cfg.test_per_class = 30000;
    cfg.methods = {Method::elda, Method::felda, Method::umbrella_lda, Method::oracle};
    cfg.base_seed = 20230901;

    if (example_id == "toy_table1") {
        cfg.rho = 0.0;
        cfg.alpha = 0.05;
        cfg.n0_grid = {50};
        cfg.test_per_class = 50000;
        cfg.methods = {Method::elda, Method::felda, Method::oracle};
    } else if (example_id == "1a") {
        cfg.n0_grid = n_axis;
    } else if (example_id == "1b") {
        cfg.n0_grid = n_axis;
        cfg.n1_grid = {500};
    } else if (example_id == "1c" || example_id == "1c_prime" || example_id == "1c_star") {
        cfg.n0_grid = {125};
        cfg.p_grid = p_axis;
        if (example_id == "1c_prime") cfg.delta = 0.05;
        if (example_id == "1c_star") cfg.delta = 0.01;
    } else if (example_id == "1d" || example_id == "1d_prime") {
        cfg.n0_grid = {125};
        cfg.n1_grid = {500};
        cfg.p_grid = p_axis;
        if (example_id == "1d_prime") cfg.delta = 0.05;
    } else if (example_id == "2a" || example_id == "2b") {
        cfg.beta_scale.reset();
        cfg.calibrate_target_type2 = 0.236;
        cfg.p0 = 0;
        cfg.n0_grid = {125};
        if (example_id == "2b") cfg.n1_grid = {500};
        cfg.p_grid = p_axis;
    } else if (example_id == "3") {
        cfg.n0_grid = n_axis;
        cfg.distribution = {Distribution::student_t, 4.0};
    } else {
        throw ConfigError("unknown example id: " + example_id);
    }
    cfg.validate_and_normalize();
    return cfg;
}

std::vector<std::string> builtin_config_ids() {
    return {"toy_table1", "1a", "1b", "1c", "1c_prime", "1c_star", "1d", "1d_prime", "2a", "2b", "3"};
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        const auto begin = token.find_first_not_of(" \t");
        const auto end = token.find_last_not_of(" \t");
        if (begin == std::string::npos) continue;
        parts.push_back(token.substr(begin, end - begin + 1));
    }
    return parts;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& key) {
    std::vector<std::size_t> values;
    for (const std::string& part : split_list(text)) {
        try {
            values.push_back(static_cast<std::size_t>(std::stoull(part)));
        } catch (const std::exception&) {
            throw ConfigError("bad integer in " + key + ": " + part);
        }
    }
    return values;
}

double parse_real(const std::string& text, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad real in " + key + ": " + text);
    }
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    cfg.methods.clear();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r\n");
            const auto e = s.find_last_not_of(" \t\r\n");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "name") {
            cfg.name = value;
        } else if (key == "p") {
            cfg.p = static_cast<std::size_t>(parse_real(value, key));
        } else if (key == "p0") {
            cfg.p0 = static_cast<std::size_t>(parse_real(value, key));
        } else if (key == "rho") {
            cfg.rho = parse_real(value, key);
        } else if (key == "beta_scale") {
            cfg.beta_scale = parse_real(value, key);
        } else if (key == "calibrate_target_type2") {
            cfg.calibrate_target_type2 = parse_real(value, key);
        } else if (key == "n0_grid") {
            cfg.n0_grid = parse_size_list(value, key);
        } else if (key == "n1_grid") {
            cfg.n1_grid = parse_size_list(value, key);
        } else if (key == "p_grid") {
            cfg.p_grid = parse_size_list(value, key);
        } else if (key == "alpha") {
            cfg.alpha = parse_real(value, key);
        } else if (key == "delta") {
            cfg.delta = parse_real(value, key);
        } else if (key == "reps") {
            cfg.reps = static_cast<int>(parse_real(value, key));
        } else if (key == "test_per_class") {
            cfg.test_per_class = static_cast<std::size_t>(parse_real(value, key));
        } else if (key == "distribution") {
            if (value == "gaussian") {
                cfg.distribution = {Distribution::gaussian, 0.0};
            } else if (value.rfind("student_t(", 0) == 0 && value.back() == ')') {
                const std::string df = value.substr(10, value.size() - 11);
                cfg.distribution = {Distribution::student_t, parse_real(df, key)};
            } else {
                throw ConfigError("distribution must be gaussian or student_t(df)");
            }
        } else if (key == "methods") {
            for (const std::string& name : split_list(value)) {
                const auto method = method_from_name(name);
                if (!method) throw ConfigError("unknown method: " + name);
                cfg.methods.push_back(*method);
            }
        } else if (key == "base_seed") {
            try {
                cfg.base_seed = std::stoull(value);
            } catch (const std::exception&) {
                throw ConfigError("bad integer in base_seed: " + value);
            }
        } else if (key == "split_frac") {
            cfg.split_frac = parse_real(value, key);
        } else {
            throw ConfigError("unknown config key: " + key);
        }
    }
    cfg.validate_and_normalize();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    return parse_config(in);
}

namespace {

std::string fmt_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<RepetitionRecord>& records) {
    out << "method,rep_index,n0,n1,p,alpha,delta,threshold,type1_emp,type2_emp,"
           "type1_pop,type2_pop,status\n";
    for (const RepetitionRecord& rec : records) {
        out << rec.method << ',' << rec.rep_index << ',' << rec.n0 << ',' << rec.n1 << ','
            << rec.p << ',' << fmt_real(rec.alpha) << ',' << fmt_real(rec.delta) << ',';
        if (rec.ok())
            out << fmt_real(rec.threshold) << ',' << fmt_real(rec.type1_emp) << ','
                << fmt_real(rec.type2_emp) << ',';
        else
            out << ",,,";
        out << (rec.type1_pop ? fmt_real(*rec.type1_pop) : "") << ','
            << (rec.type2_pop ? fmt_real(*rec.type2_pop) : "") << ',' << rec.status << '\n';
    }
}

void write_aggregates_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
    out << "method,axis_value,mean_type1,mean_type2,violation_rate,feasible_fraction\n";
    for (const AggregateRow& row : rows) {
        out << row.method << ',' << fmt_real(row.axis_value) << ',' << fmt_real(row.mean_type1)
            << ',' << fmt_real(row.mean_type2) << ',' << fmt_real(row.violation_rate) << ','
            << fmt_real(row.feasible_fraction) << '\n';
    }
}

namespace {

template <typename Fn>
void write_file(const std::string& path, Fn&& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    writer(out);
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace

void write_records_csv_file(const std::string& path,
                            const std::vector<RepetitionRecord>& records) {
    write_file(path, [&](std::ostream& out) { write_records_csv(out, records); });
}

void write_aggregates_csv_file(const std::string& path, const std::vector<AggregateRow>& rows) {
    write_file(path, [&](std::ostream& out) { write_aggregates_csv(out, rows); });
}

}  // namespace nplda
