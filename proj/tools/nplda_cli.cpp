#include <CLI11.hpp>

#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "nplda/experiments.hpp"
#include "nplda/rmt.hpp"
#include "nplda/screening.hpp"

namespace {

using namespace nplda;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void cmd_simulate(const std::string& config_path, const std::string& example_id,
                  const std::string& out_dir, int workers, long long seed_override) {
    ExperimentConfig cfg;
    if (!config_path.empty())
        cfg = parse_config_file(config_path);
    else if (!example_id.empty())
        cfg = builtin_config(example_id);
    else
        throw ConfigError("simulate needs --config or --example");
    if (seed_override >= 0) cfg.base_seed = static_cast<std::uint64_t>(seed_override);

    std::filesystem::create_directories(out_dir);
    const ExperimentResult result = run_experiment(cfg, workers);
    const std::string records_path = out_dir + "/records.csv";
    const std::string aggregates_path = out_dir + "/aggregates.csv";
    write_records_csv_file(records_path, result.records);
    write_aggregates_csv_file(aggregates_path, result.aggregates);
    std::cout << "wrote " << records_path << " (" << result.records.size() << " rows) and "
              << aggregates_path << " (" << result.aggregates.size() << " rows)\n";
}

void cmd_oracle(std::size_t p, double rho, double beta_scale, double target_type2, double alpha,
                bool has_beta, bool has_target) {
    if (has_beta == has_target)
        throw ConfigError("oracle needs exactly one of --beta-scale / --target-type2");
    ExperimentConfig cfg;
    cfg.p = p;
    cfg.rho = rho;
    cfg.alpha = alpha;
    if (has_beta) {
        cfg.beta_scale = beta_scale;
        cfg.p0 = p;
    } else {
        cfg.calibrate_target_type2 = target_type2;
    }
    const LdaModel model = config_model(cfg, p);
    const LinearClassifier clf = oracle_classifier(model, Probability(alpha));
    std::cout << "p=" << p << " rho=" << fmt(rho) << " alpha=" << fmt(alpha) << '\n';
    if (has_target)
        std::cout << "calibrated_scale=" << fmt(calibrate_flat_beta(p, rho, Probability(alpha),
                                                                    target_type2))
                  << '\n';
    std::cout << "mahalanobis=" << fmt(model.mahalanobis()) << '\n'
              << "threshold=" << fmt(clf.threshold) << '\n'
              << "oracle_type2=" << fmt(oracle_type2(model, Probability(alpha))) << '\n';
}

void cmd_rmt_check(double r, int grid) {
    const MpParams params(r);
    double max_m1_residual = 0.0;
    double max_m2_residual = 0.0;
    double max_identity_gap = 0.0;
    const int side = std::max(2, grid);
    for (int i = 0; i < side; ++i) {
        const double re = -0.5 * params.lambda_minus +
                          params.lambda_minus * static_cast<double>(i) / (side - 1);
        for (int j = 0; j < side; ++j) {
            const double im = std::pow(10.0, -3.0 + 4.0 * static_cast<double>(j) / (side - 1));
            const std::complex<double> z(re, im);
            const auto m1 = mp_m1(z, r);
            const auto m2 = mp_m2(z, r);
            max_m1_residual = std::max(max_m1_residual, mp_m1_residual(z, m1, r));
            max_m2_residual = std::max(max_m2_residual, mp_m2_residual(z, m2, r));
            const auto lhs = m1;
            const auto rhs = -1.0 / (z * (1.0 + m2 / std::sqrt(r)));
            max_identity_gap = std::max(max_identity_gap, std::abs(lhs - rhs));
        }
    }
    const MpValuesAtZero closed = mp_values_at_zero(r);
    const MpValuesAtZero numeric = mp_values_at_zero_numeric(r);
    auto rel = [](double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(a)); };
    const double max_value_gap = std::max(
        {rel(closed.m1_0, numeric.m1_0), rel(closed.m1p_0, numeric.m1p_0),
         rel(closed.m1pp_0, numeric.m1pp_0), rel(closed.m1ppp_0, numeric.m1ppp_0),
         rel(closed.zm2_0, numeric.zm2_0), rel(closed.zm2p_0, numeric.zm2p_0),
         rel(closed.zm2pp_0, numeric.zm2pp_0), rel(closed.zm2ppp_0, numeric.zm2ppp_0)});
    std::cout << "r=" << fmt(r) << " lambda_minus=" << fmt(params.lambda_minus)
              << " lambda_plus=" << fmt(params.lambda_plus) << '\n'
              << "max_self_consistency_residual=" << fmt(std::max(max_m1_residual, max_m2_residual))
              << '\n'
              << "max_identity_gap=" << fmt(max_identity_gap) << '\n'
              << "max_derivative_rel_gap=" << fmt(max_value_gap) << '\n'
              << "m1_0=" << fmt(closed.m1_0) << " m1p_0=" << fmt(closed.m1p_0)
              << " m1pp_0=" << fmt(closed.m1pp_0) << " m1ppp_0=" << fmt(closed.m1ppp_0) << '\n'
              << "zm2_0=" << fmt(closed.zm2_0) << " zm2p_0=" << fmt(closed.zm2p_0)
              << " zm2pp_0=" << fmt(closed.zm2pp_0) << " zm2ppp_0=" << fmt(closed.zm2ppp_0)
              << '\n';
}

void cmd_clt_check(std::size_t p, std::size_t n0, std::size_t n1, double alpha, int reps,
                   long long seed) {
    SpdMatrix sigma = SpdMatrix::identity(p);
    Vec mu_d(p, 2.0 / std::sqrt(static_cast<double>(p)));  // Delta_d = 4
    LdaModel model(Vec(p, 0.0), std::move(mu_d), std::move(sigma));
    const KsReport report = verify_threshold_clt(model, NpLevels(alpha, 0.1), n0, n1, reps,
                                             SeedSpec{static_cast<std::uint64_t>(seed), 0});
    write_verification_csv(std::cout, {}, {report});
}

void cmd_umbrella_k(long m, double alpha, double delta) {
    const NpLevels levels(alpha, delta);
    std::cout << "min_class0_holdout=" << umbrella_min_size(Probability(alpha), Probability(delta))
              << '\n';
    const auto k = umbrella_order(m, levels);
    if (k) {
        std::cout << "k_star=" << *k << '\n'
                  << "tail_at_k_star=" << fmt(binom_upper_tail(m, *k, 1.0 - alpha)) << '\n';
        if (*k > 1)
            std::cout << "tail_at_k_star_minus_1=" << fmt(binom_upper_tail(m, *k - 1, 1.0 - alpha))
                      << '\n';
    } else {
        std::cout << "k_star=infeasible\n";
    }
}

void cmd_screen(const std::string& data_path, const std::string& label_col, std::size_t top_k,
                double alpha, double delta, int reps, double train_frac, long long seed,
                const std::string& out_dir) {
    const TabularDataset data = read_labeled_csv(data_path, label_col);
    ScreenPlan plan;
    plan.top_k = top_k;
    plan.train_frac = train_frac;
    plan.reps = reps;
    plan.levels = NpLevels(alpha, delta);
    plan.seed = SeedSpec{static_cast<std::uint64_t>(seed), 0};
    const ScreenReport report = run_screen_eval(data, plan);

    std::filesystem::create_directories(out_dir);
    const std::string path = out_dir + "/screen_report.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_screen_csv(out, report);
    std::cout << "mean_type1=" << fmt(report.mean_type1)
              << " mean_type2=" << fmt(report.mean_type2)
              << " violation_rate=" << fmt(report.violation_rate) << " ok=" << report.ok_count
              << "/" << reps << '\n'
              << "wrote " << path << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-splitting Neyman-Pearson LDA classifiers and simulation harness"};
    app.require_subcommand(1);

    auto* simulate = app.add_subcommand("simulate", "Run a simulation study and write CSV results");
    std::string config_path, example_id, out_dir = "out";
    int workers = 1;
    long long seed_override = -1;
    simulate->add_option("--config", config_path, "Experiment config file");
    simulate->add_option("--example", example_id, "Builtin study id (toy_table1, 1a, ..., 3)");
    simulate->add_option("--out", out_dir, "Output directory")->required();
    simulate->add_option("--workers", workers, "Worker threads");
    simulate->add_option("--seed", seed_override, "Override the base seed");

    auto* oracle = app.add_subcommand("oracle", "Population oracle quantities for an AR(1) model");
    std::size_t o_p = 3;
    double o_rho = 0.5, o_beta = 0.0, o_target = 0.0, o_alpha = 0.1;
    oracle->add_option("--p", o_p, "Feature dimension")->required();
    oracle->add_option("--rho", o_rho, "AR(1) correlation");
    auto* o_beta_opt = oracle->add_option("--beta-scale", o_beta, "Flat beta scale");
    auto* o_target_opt = oracle->add_option("--target-type2", o_target, "Calibrate to this type II error");
    oracle->add_option("--alpha", o_alpha, "Type I error level");

    auto* rmt = app.add_subcommand("rmt-check", "Spectral-transform self-consistency checks");
    double r_ratio = 0.25;
    int r_grid = 10;
    rmt->add_option("--r", r_ratio, "Aspect ratio in (0,1)")->required();
    rmt->add_option("--grid", r_grid, "Grid points per axis");

    auto* clt = app.add_subcommand("clt-check", "KS check of the threshold fluctuation");
    std::size_t c_p = 40, c_n0 = 200, c_n1 = 200;
    double c_alpha = 0.05;
    int c_reps = 2000;
    long long c_seed = 1;
    clt->add_option("--p", c_p, "Feature dimension")->required();
    clt->add_option("--n0", c_n0, "Class 0 sample size")->required();
    clt->add_option("--n1", c_n1, "Class 1 sample size")->required();
    clt->add_option("--alpha", c_alpha, "Type I error level");
    clt->add_option("--reps", c_reps, "Repetitions");
    clt->add_option("--seed", c_seed, "Base seed");

    auto* umbrella = app.add_subcommand("umbrella-k", "Order statistic for the umbrella threshold");
    long u_m = 0;
    double u_alpha = 0.1, u_delta = 0.1;
    umbrella->add_option("--m", u_m, "Held-out class 0 count")->required();
    umbrella->add_option("--alpha", u_alpha, "Type I error level")->required();
    umbrella->add_option("--delta", u_delta, "Violation rate target")->required();

    auto* screen = app.add_subcommand("screen", "Feature screening + split evaluation on a CSV");
    std::string s_data, s_label, s_out = "out";
    std::size_t s_topk = 40;
    double s_alpha = 0.05, s_delta = 0.1, s_frac = 0.7;
    int s_reps = 100;
    long long s_seed = 1;
    screen->add_option("--data", s_data, "Input CSV")->required();
    screen->add_option("--label-col", s_label, "Label column name")->required();
    screen->add_option("--top-k", s_topk, "Features kept after screening");
    screen->add_option("--alpha", s_alpha, "Type I error level");
    screen->add_option("--delta", s_delta, "Violation rate target");
    screen->add_option("--reps", s_reps, "Split repetitions");
    screen->add_option("--train-frac", s_frac, "Training fraction per class");
    screen->add_option("--seed", s_seed, "Base seed");
    screen->add_option("--out", s_out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed())
            cmd_simulate(config_path, example_id, out_dir, workers, seed_override);
        else if (oracle->parsed())
            cmd_oracle(o_p, o_rho, o_beta, o_target, o_alpha, o_beta_opt->count() > 0,
                       o_target_opt->count() > 0);
        else if (rmt->parsed())
            cmd_rmt_check(r_ratio, r_grid);
        else if (clt->parsed())
            cmd_clt_check(c_p, c_n0, c_n1, c_alpha, c_reps, c_seed);
        else if (umbrella->parsed())
            cmd_umbrella_k(u_m, u_alpha, u_delta);
        else if (screen->parsed())
            cmd_screen(s_data, s_label, s_topk, s_alpha, s_delta, s_reps, s_frac, s_seed, s_out);
    } catch (const nplda::Error& e) {
        std::cerr << "error: " << e.code() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
