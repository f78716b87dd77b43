#include "nplda/classifiers.hpp"

#include <algorithm>
#include <cmath>

namespace nplda {

namespace {

double effective_ratio(const SampleStats& stats, std::optional<double> ratio_override) {
    const double r = ratio_override.value_or(stats.r);
    if (!(r >= 0.0 && r < 1.0))
        throw RatioOutOfRange("aspect ratio must lie in [0,1)");
    return r;
}

// (1-r) * signal - r * ||v_1||^2, the bias-corrected estimate of the
// population separation mu_d^T Sigma^{-1} mu_d.
double centered_signal(const SampleStats& stats, double r) {
    return (1.0 - r) * stats.signal - r * stats.v1_norm_sq;
}

}  // namespace

VarianceBreakdown elda_variance(const SampleStats& stats, Probability alpha,
                                std::optional<double> ratio_override) {
    const double a = alpha.value();
    if (!(a > 0.0 && a < 1.0))
        throw InvalidLevel("elda_variance requires alpha in (0,1)");
    if (!(stats.signal > 0.0))
        throw NonPositiveSignal("elda_variance: signal <= 0");
    const double r = effective_ratio(stats, ratio_override);
    const double s = centered_signal(stats, r);
    if (!(s > 0.0))
        throw NonPositiveSignal("elda_variance: (1-r) signal - r ||v1||^2 <= 0");

    const double om = 1.0 - r;
    const double om3 = om * om * om;
    const double om5 = om3 * om * om;
    const double om7 = om5 * om * om;
    const double c = om / (2.0 * std::sqrt(stats.signal));
    const double phi_a = std_normal_quantile(1.0 - a);
    const double c2p2 = c * c * phi_a * phi_a;
    const double v1sq = stats.v1_norm_sq;
    const double n = static_cast<double>(stats.n);
    const double n0 = static_cast<double>(stats.n0);
    const double n1 = static_cast<double>(stats.n1);
    const double cross = 2.0 * c * phi_a * std::sqrt(v1sq) * std::sqrt(n1 / n0);

    VarianceBreakdown out;
    out.c_const = c;
    out.phi_alpha = phi_a;
    out.v1 = s * c2p2 * 2.0 * (1.0 + r) / om7;
    out.v2 = c2p2 * v1sq * 4.0 * r * (1.0 + r) / om7 + n / (n0 * om3) + cross * 2.0 * r / om5;
    out.v3 = (v1sq / s) * (c2p2 * v1sq * 2.0 * r * r * (1.0 + r) / om7 +
                           (n + n1) * r / (n0 * om3) + cross * 2.0 * r * r / om5);
    out.v_total = out.v1 + out.v2 + out.v3;
    return out;
}

LinearClassifier elda_train(const SampleStats& stats, const NpLevels& levels,
                            std::optional<double> ratio_override) {
    const VarianceBreakdown var = elda_variance(stats, Probability(levels.alpha), ratio_override);
    const double r = effective_ratio(stats, ratio_override);
    const double s = centered_signal(stats, r);
    const double n = static_cast<double>(stats.n);
    const double n0 = static_cast<double>(stats.n0);
    // v_1^T e_0 = -sqrt(n/n0), so the correction enters with a plus sign.
    const double f_hat = std::sqrt(stats.signal) / (1.0 - r) * var.phi_alpha +
                         stats.a_dot_mu0_hat() + (n / n0) * r / (1.0 - r);
    const double threshold =
        f_hat + std::sqrt(s * var.v_total / n) * std_normal_quantile(1.0 - levels.delta);
    return {stats.a_hat, threshold};
}

LinearClassifier felda_train(const SampleStats& stats, const NpLevels& levels) {
    if (!(stats.signal > 0.0))
        throw NonPositiveSignal("felda_train: signal <= 0");
    const double phi_a = std_normal_quantile(1.0 - levels.alpha);
    const double n = static_cast<double>(stats.n);
    const double n0 = static_cast<double>(stats.n0);
    const double f_tilde = std::sqrt(stats.signal) * phi_a + stats.a_dot_mu0_hat();
    const double v_tilde = 0.5 * phi_a * phi_a + n / n0;
    const double threshold = f_tilde + std::sqrt(stats.signal) * std::sqrt(v_tilde / n) *
                                           std_normal_quantile(1.0 - levels.delta);
    return {stats.a_hat, threshold};
}

long umbrella_min_size(Probability alpha, Probability delta) {
    const double a = alpha.value();
    const double d = delta.value();
    if (!(a > 0.0 && a < 1.0) || !(d > 0.0 && d < 1.0))
        throw InvalidLevel("umbrella_min_size requires alpha, delta in (0,1)");
    const long m = static_cast<long>(std::ceil(std::log(d) / std::log1p(-a)));
    return std::max<long>(m, 1);
}

std::optional<long> umbrella_order(long m, const NpLevels& levels) {
    if (m < 1)
        throw InvalidLevel("umbrella_order requires m >= 1");
    const double q = 1.0 - levels.alpha;
    if (binom_upper_tail(m, m, q) > levels.delta) return std::nullopt;
    // binom_upper_tail is nonincreasing in k; bisect for the crossing.
    long lo = 1, hi = m;
    if (binom_upper_tail(m, lo, q) <= levels.delta) return lo;
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        if (binom_upper_tail(m, mid, q) <= levels.delta)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

Scorer lda_scorer() {
    return [](const LabeledSample& train) {
        SampleStats stats = compute_stats(train);
        ScoringRule rule;
        Vec direction = stats.a_hat;
        rule.score = [direction](std::span<const double> x) { return dot(direction, x); };
        rule.direction = std::move(direction);
        return rule;
    };
}

UmbrellaClassifier umbrella_train(const LabeledSample& sample, const NpLevels& levels,
                                  double split_frac, const Scorer& scorer, SeedSpec seed) {
    if (!(split_frac > 0.0 && split_frac < 1.0))
        throw InvalidLevel("umbrella_train requires split_frac in (0,1)");
    const std::size_t n0 = sample.n0();
    const std::size_t p = sample.dim();
    const long m = std::llround(split_frac * static_cast<double>(n0));
    const long min_size = umbrella_min_size(Probability(levels.alpha), Probability(levels.delta));
    if (m < min_size)
        throw InsufficientSamples("umbrella_train: class-0 holdout below the minimum size");
    if (static_cast<std::size_t>(m) >= n0)
        throw InsufficientSamples("umbrella_train: holdout leaves no class-0 training rows");

    RngStream rng(seed);
    const std::vector<std::size_t> perm = random_permutation(n0, rng);

    Matrix x0_train(n0 - static_cast<std::size_t>(m), p);
    Matrix x0_holdout(static_cast<std::size_t>(m), p);
    for (long i = 0; i < m; ++i) {
        auto src = sample.x0.row(perm[static_cast<std::size_t>(i)]);
        std::copy(src.begin(), src.end(), x0_holdout.row(static_cast<std::size_t>(i)).begin());
    }
    for (std::size_t i = static_cast<std::size_t>(m); i < n0; ++i) {
        auto src = sample.x0.row(perm[i]);
        std::copy(src.begin(), src.end(),
                  x0_train.row(i - static_cast<std::size_t>(m)).begin());
    }

    const LabeledSample train{std::move(x0_train), sample.x1};
    ScoringRule rule = scorer(train);

    Vec scores(static_cast<std::size_t>(m));
    for (long i = 0; i < m; ++i)
        scores[static_cast<std::size_t>(i)] = rule.score(x0_holdout.row(static_cast<std::size_t>(i)));
    std::stable_sort(scores.begin(), scores.end());

    const std::optional<long> k_star = umbrella_order(m, levels);
    if (!k_star)
        throw InsufficientSamples("umbrella_train: no feasible order statistic");

    UmbrellaClassifier clf;
    clf.threshold = scores[static_cast<std::size_t>(*k_star - 1)];
    clf.k_star = *k_star;
    clf.holdout_size = m;
    clf.rule = std::move(rule);
    return clf;
}

int predict(const LinearClassifier& clf, std::span<const double> x) {
    if (x.size() != clf.direction.size())
        throw DimensionMismatch("predict: feature dimension mismatch");
    return dot(clf.direction, x) > clf.threshold ? 1 : 0;
}

int predict(const UmbrellaClassifier& clf, std::span<const double> x) {
    return clf.rule.score(x) > clf.threshold ? 1 : 0;
}

}  // namespace nplda
