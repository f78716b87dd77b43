#pragma once

#include <functional>
#include <optional>

#include "nplda/sampling.hpp"

namespace nplda {

// Target type I error level alpha and violation-rate target delta, both
// strictly inside (0,1).
struct NpLevels {
    NpLevels(double alpha_in, double delta_in) : alpha(alpha_in), delta(delta_in) {
        if (!(alpha_in > 0.0 && alpha_in < 1.0) || !(delta_in > 0.0 && delta_in < 1.0))
            throw InvalidLevel("NpLevels requires alpha, delta in (0,1)");
    }
    double alpha;
    double delta;
};

// The three-part variance estimate behind the eLDA safety margin.
struct VarianceBreakdown {
    double v1 = 0.0;
    double v2 = 0.0;
    double v3 = 0.0;
    double v_total = 0.0;
    double c_const = 0.0;    // (1-r) / (2 sqrt(signal))
    double phi_alpha = 0.0;  // Phi^{-1}(1-alpha)
};

// Variance estimate for the threshold fluctuation.  `ratio_override`
// substitutes the aspect ratio r everywhere it appears (the r -> 0 limit
// reproduces the fixed-dimension variance); production callers leave it
// unset.
VarianceBreakdown elda_variance(const SampleStats& stats, Probability alpha,
                                std::optional<double> ratio_override = std::nullopt);

// Non-splitting classifier with aspect-ratio corrections: direction
// sigma_hat^{-1} mu_d_hat, threshold inflated by the Phi^{-1}(1-delta)
// quantile of the estimated fluctuation.
LinearClassifier elda_train(const SampleStats& stats, const NpLevels& levels,
                            std::optional<double> ratio_override = std::nullopt);

// Fixed-dimension simplification: drops every r-dependent correction.
LinearClassifier felda_train(const SampleStats& stats, const NpLevels& levels);

// Smallest class-0 holdout size for which the umbrella threshold exists:
// ceil(log(delta) / log(1-alpha)).
long umbrella_min_size(Probability alpha, Probability delta);

// Minimal order k in [1,m] with binom_upper_tail(m,k,1-alpha) <= delta, or
// nullopt when m is below the minimum holdout size.
std::optional<long> umbrella_order(long m, const NpLevels& levels);

// Score function produced by a scorer; linear scorers expose their direction
// so population error rates stay computable.
struct ScoringRule {
    std::function<double(std::span<const double>)> score;
    std::optional<Vec> direction;
};

using Scorer = std::function<ScoringRule(const LabeledSample& train)>;

// Pooled-covariance LDA direction on the training portion.
Scorer lda_scorer();

// Umbrella classifier: score thresholded at the k*-th order statistic of the
// held-out class-0 scores.
struct UmbrellaClassifier {
    ScoringRule rule;
    double threshold = 0.0;
    long k_star = 0;
    long holdout_size = 0;

    std::optional<LinearClassifier> as_linear() const {
        if (!rule.direction) return std::nullopt;
        return LinearClassifier{*rule.direction, threshold};
    }
};

// Splits class 0 (seeded, holdout count round(split_frac * n0)), trains the
// scorer on the remaining class 0 plus all class 1 rows, and thresholds at
// the k*-th smallest held-out score.
UmbrellaClassifier umbrella_train(const LabeledSample& sample, const NpLevels& levels,
                                  double split_frac, const Scorer& scorer, SeedSpec seed);

// 1 iff the score strictly exceeds the threshold.
int predict(const LinearClassifier& clf, std::span<const double> x);
int predict(const UmbrellaClassifier& clf, std::span<const double> x);

}  // namespace nplda
