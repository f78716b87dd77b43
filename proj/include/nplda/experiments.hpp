#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nplda/classifiers.hpp"

namespace nplda {

enum class Distribution { gaussian, student_t };

struct DistributionSpec {
    Distribution kind = Distribution::gaussian;
    double df = 0.0;  // student_t only
};

enum class Method { elda, felda, umbrella_lda, oracle };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

// Declarative description of one simulation study.  The population is an
// AR(1) LDA model with mu0 = 0 and mu_d = Sigma beta, where beta is either
// beta_scale on the first p0 coordinates or the flat calibrated direction
// hitting calibrate_target_type2 at the oracle.
struct ExperimentConfig {
    std::string name;
    std::size_t p = 0;   // feature dimension when p_grid is a single point
    std::size_t p0 = 0;  // signal coordinates of beta (beta_scale variant)
    double rho = 0.0;
    std::optional<double> beta_scale;
    std::optional<double> calibrate_target_type2;
    std::vector<std::size_t> n0_grid;
    std::vector<std::size_t> n1_grid;
    std::vector<std::size_t> p_grid;
    double alpha = 0.1;
    double delta = 0.1;
    int reps = 1;
    std::size_t test_per_class = 30000;
    DistributionSpec distribution;
    std::vector<Method> methods;
    std::uint64_t base_seed = 1;
    double split_frac = 0.5;  // umbrella only

    // Throws ConfigError on violated invariants; fills singleton grids.
    void validate_and_normalize();
};

// One (n0, n1, p) grid point; grids of length one broadcast, longer grids
// advance in lockstep, and the axis value is the quantity that varies
// (p first, then n0, then n1).
struct GridPoint {
    std::size_t index = 0;
    std::size_t n0 = 0, n1 = 0, p = 0;
    double axis_value = 0.0;
};

std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg);

struct RepetitionRecord {
    std::string method;
    int rep_index = 0;
    std::size_t n0 = 0, n1 = 0, p = 0;
    double alpha = 0.0, delta = 0.0;
    double threshold = 0.0;
    double type1_emp = 0.0, type2_emp = 0.0;
    std::optional<double> type1_pop;  // Gaussian configs only
    std::optional<double> type2_pop;
    std::string status;  // ok | infeasible | error:<code>
    double axis_value = 0.0;

    bool ok() const { return status == "ok"; }
};

struct AggregateRow {
    std::string method;
    double axis_value = 0.0;
    double mean_type1 = 0.0;  // empirical, over ok reps
    double mean_type2 = 0.0;
    double violation_rate = 0.0;  // type I > alpha (population when available)
    double feasible_fraction = 0.0;
};

struct ExperimentResult {
    std::vector<RepetitionRecord> records;
    std::vector<AggregateRow> aggregates;
};

// Runs reps x grid repetitions: per repetition a fresh seeded training
// sample, every configured method, empirical errors on a fresh seeded test
// set, and exact population errors for Gaussian data.  Output is identical
// for any worker count.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers = 1);

// The simulation studies shipped with the library: toy_table1, 1a, 1b, 1c,
// 1c_prime, 1c_star, 1d, 1d_prime, 2a, 2b, 3.
ExperimentConfig builtin_config(const std::string& example_id);
std::vector<std::string> builtin_config_ids();

// `key = value` config text; unknown keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

// Population model at one grid point.
LdaModel config_model(const ExperimentConfig& cfg, std::size_t p);

void write_records_csv(std::ostream& out, const std::vector<RepetitionRecord>& records);
void write_aggregates_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
void write_records_csv_file(const std::string& path, const std::vector<RepetitionRecord>& records);
void write_aggregates_csv_file(const std::string& path, const std::vector<AggregateRow>& rows);

}  // namespace nplda
