#include "nplda/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace nplda {

namespace {

void check_ratio(double r) {
    if (!(r > 0.0 && r < 1.0))
        throw RatioOutOfRange("aspect ratio r must lie in (0,1)");
}

using cplx = std::complex<double>;

// Roots of a w^2 + b w + c = 0 without subtractive cancellation: the root of
// larger magnitude comes from the quadratic formula, the other from the
// product relation w1 w2 = c/a.
std::pair<cplx, cplx> stable_quadratic_roots(cplx a, cplx b, cplx c) {
    const cplx s = std::sqrt(b * b - 4.0 * a * c);
    const cplx big = (std::abs(b - s) > std::abs(b + s)) ? (b - s) : (b + s);
    const cplx w1 = -big / (2.0 * a);
    const cplx w2 = c / (a * w1);
    return {w1, w2};
}

}  // namespace

MpParams::MpParams(double ratio) : r(ratio) {
    check_ratio(ratio);
    const double root = std::sqrt(ratio);
    lambda_minus = root + 1.0 / root - 2.0;
    lambda_plus = root + 1.0 / root + 2.0;
}

std::complex<double> mp_m1(std::complex<double> z, double r) {
    check_ratio(r);
    const double sr = std::sqrt(r);
    if (z == 0.0) return {sr / (1.0 - r), 0.0};
    // z sqrt(r) m^2 + (z - 1/sqrt(r) + sqrt(r)) m + 1 = 0
    const auto [w1, w2] = stable_quadratic_roots(z * sr, z - 1.0 / sr + sr, 1.0);
    return (w1.imag() > w2.imag()) ? w1 : w2;
}

std::complex<double> mp_zm2(std::complex<double> z, double r) {
    check_ratio(r);
    const double sr = std::sqrt(r);
    if (z == 0.0) return {r - 1.0, 0.0};
    // For w = z m2: (1/sqrt(r)) w^2 + (z - sqrt(r) + 1/sqrt(r)) w + z = 0
    const auto [w1, w2] = stable_quadratic_roots(cplx(1.0 / sr), z - sr + 1.0 / sr, z);
    // m2 = w / z must lie in C+.
    const auto im_m2 = [&](cplx w) { return (w * std::conj(z)).imag(); };
    return (im_m2(w1) > im_m2(w2)) ? w1 : w2;
}

std::complex<double> mp_m2(std::complex<double> z, double r) {
    if (z == 0.0)
        throw RatioOutOfRange("mp_m2 has a pole at z = 0; use mp_zm2");
    return mp_zm2(z, r) / z;
}

double mp_m1_residual(std::complex<double> z, std::complex<double> m, double r) {
    const double sr = std::sqrt(r);
    return std::abs(z * sr * m * m + (z - 1.0 / sr + sr) * m + 1.0);
}

double mp_m2_residual(std::complex<double> z, std::complex<double> m, double r) {
    const double sr = std::sqrt(r);
    return std::abs(z / sr * m * m + (z - sr + 1.0 / sr) * m + 1.0);
}

MpValuesAtZero mp_values_at_zero(double r) {
    check_ratio(r);
    const double om = 1.0 - r;
    const double om3 = om * om * om;
    const double om5 = om3 * om * om;
    const double om7 = om5 * om * om;
    const double sr = std::sqrt(r);
    MpValuesAtZero v;
    v.m1_0 = sr / om;
    v.m1p_0 = r / om3;
    v.m1pp_0 = 2.0 * r * sr * (1.0 + r) / om5;
    v.m1ppp_0 = 6.0 * r * r * (1.0 + 3.0 * r + r * r) / om7;
    v.zm2_0 = r - 1.0;
    v.zm2p_0 = r * sr / om;
    v.zm2pp_0 = 2.0 * r * r / om3;
    v.zm2ppp_0 = 6.0 * r * r * sr * (1.0 + r) / om5;
    return v;
}

MpValuesAtZero mp_values_at_zero_numeric(double r) {
    const MpParams params(r);
    const double eps = 1e-20;
    const double h = std::min(0.05, params.lambda_minus / 56.0);

    // Exact first derivative along the real gap via a complex step; the
    // higher derivatives then need only sixth-order real stencils of it.
    const auto d_m1 = [&](double x) { return mp_m1(cplx(x, eps), r).imag() / eps; };
    const auto d_zm2 = [&](double x) { return mp_zm2(cplx(x, eps), r).imag() / eps; };

    const auto stencil_d1 = [&](auto&& g) {
        return (-g(-3.0 * h) + 9.0 * g(-2.0 * h) - 45.0 * g(-h) + 45.0 * g(h) - 9.0 * g(2.0 * h) +
                g(3.0 * h)) /
               (60.0 * h);
    };
    const auto stencil_d2 = [&](auto&& g) {
        return (2.0 * g(-3.0 * h) - 27.0 * g(-2.0 * h) + 270.0 * g(-h) - 490.0 * g(0.0) +
                270.0 * g(h) - 27.0 * g(2.0 * h) + 2.0 * g(3.0 * h)) /
               (180.0 * h * h);
    };

    MpValuesAtZero v;
    v.m1_0 = mp_m1(cplx(0.0, eps), r).real();
    v.m1p_0 = d_m1(0.0);
    v.m1pp_0 = stencil_d1(d_m1);
    v.m1ppp_0 = stencil_d2(d_m1);
    v.zm2_0 = mp_zm2(cplx(0.0, eps), r).real();
    v.zm2p_0 = d_zm2(0.0);
    v.zm2pp_0 = stencil_d1(d_zm2);
    v.zm2ppp_0 = stencil_d2(d_zm2);
    return v;
}

namespace {

double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double upper = values[mid];
    if (values.size() % 2 == 0) {
        const double lower = *std::max_element(values.begin(), values.begin() + mid);
        return 0.5 * (lower + upper);
    }
    return upper;
}

}  // namespace

ConcentrationReport verify_concentration(const LdaModel& model, std::size_t n0, std::size_t n1,
                                         int reps, SeedSpec seed) {
    const std::size_t p = model.dim();
    const std::size_t n = n0 + n1;
    if (n < p + 3)
        throw InsufficientSamples("verify_concentration requires n - 2 > p");
    const double r = static_cast<double>(p) / static_cast<double>(n);
    const double om = 1.0 - r;
    const double delta_d = model.mahalanobis();
    const double v1sq = static_cast<double>(n) * static_cast<double>(n) /
                        (static_cast<double>(n0) * static_cast<double>(n1));

    const double pred_signal = (r * v1sq + delta_d) / om;
    const double pred_a_sigma_a = (r * v1sq + delta_d) / (om * om * om);
    const double pred_a_mu_d = delta_d / om;
    const double pred_mu0_diff = -(static_cast<double>(n) / static_cast<double>(n0)) * r / om;

    std::vector<double> dev_signal, dev_asa, dev_amud, dev_mu0;
    dev_signal.reserve(reps);
    dev_asa.reserve(reps);
    dev_amud.reserve(reps);
    dev_mu0.reserve(reps);

    for (int rep = 0; rep < reps; ++rep) {
        const SeedSpec rep_seed{seed.base_seed, seed.stream_index + static_cast<std::uint64_t>(rep)};
        const LabeledSample sample = sample_gaussian(model, n0, n1, rep_seed);
        const SampleStats stats = compute_stats(sample);

        const double a_sigma_a = quadratic_form(stats.a_hat, model.sigma(), stats.a_hat);
        const double a_mu_d = dot(stats.a_hat, model.mu_d());
        const double mu0_diff = stats.a_dot_mu0_hat() - dot(stats.a_hat, model.mu0());

        dev_signal.push_back(std::fabs(stats.signal - pred_signal) / std::fabs(pred_signal));
        dev_asa.push_back(std::fabs(a_sigma_a - pred_a_sigma_a) / std::fabs(pred_a_sigma_a));
        dev_amud.push_back(std::fabs(a_mu_d - pred_a_mu_d) / std::fabs(pred_a_mu_d));
        dev_mu0.push_back(std::fabs(mu0_diff - pred_mu0_diff) /
                          std::max(std::fabs(pred_mu0_diff), std::sqrt(delta_d)));
    }

    ConcentrationReport report;
    report.n = n;
    report.p = p;
    report.r = r;
    report.reps = reps;
    report.quantities = {
        {"signal", pred_signal, median_of(std::move(dev_signal))},
        {"a_sigma_a", pred_a_sigma_a, median_of(std::move(dev_asa))},
        {"a_mu_d", pred_a_mu_d, median_of(std::move(dev_amud))},
        {"a_mu0_diff", pred_mu0_diff, median_of(std::move(dev_mu0))},
    };
    return report;
}

double ks_statistic_vs_normal(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    const double count = static_cast<double>(sample.size());
    double stat = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double cdf = std_normal_cdf(sample[i]);
        const double hi = (static_cast<double>(i) + 1.0) / count - cdf;
        const double lo = cdf - static_cast<double>(i) / count;
        stat = std::max({stat, hi, lo});
    }
    return stat;
}

KsReport verify_threshold_clt(const LdaModel& model, const NpLevels& levels, std::size_t n0,
                              std::size_t n1, int reps, SeedSpec seed) {
    const std::size_t p = model.dim();
    const std::size_t n = n0 + n1;
    const double phi_alpha = std_normal_quantile(1.0 - levels.alpha);

    std::vector<double> z_values;
    z_values.reserve(reps);
    int skipped = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const SeedSpec rep_seed{seed.base_seed, seed.stream_index + static_cast<std::uint64_t>(rep)};
        const LabeledSample sample = sample_gaussian(model, n0, n1, rep_seed);
        const SampleStats stats = compute_stats(sample);
        const double s = (1.0 - stats.r) * stats.signal - stats.r * stats.v1_norm_sq;
        if (!(s > 0.0)) {
            ++skipped;
            continue;
        }
        const VarianceBreakdown var = elda_variance(stats, Probability(levels.alpha));
        // Phi^{-1}(1 - 0.5) = 0, so the delta = 0.5 threshold is the plain
        // estimate F_hat without the safety margin.
        const double f_hat = elda_train(stats, NpLevels(levels.alpha, 0.5)).threshold;
        const double a_sigma_a = quadratic_form(stats.a_hat, model.sigma(), stats.a_hat);
        const double f_pop =
            std::sqrt(a_sigma_a) * phi_alpha + dot(stats.a_hat, model.mu0());
        z_values.push_back(std::sqrt(static_cast<double>(n)) * (f_hat - f_pop) /
                           std::sqrt(s * var.v_total));
    }
    if (skipped > reps / 100)
        throw NonPositiveSignal(
            "verify_threshold_clt: centered signal non-positive in over 1% of reps");

    double mean = 0.0;
    for (double z : z_values) mean += z;
    mean /= static_cast<double>(z_values.size());
    double var = 0.0;
    for (double z : z_values) var += (z - mean) * (z - mean);
    var /= static_cast<double>(z_values.size() - 1);

    KsReport report;
    report.n = n;
    report.p = p;
    report.r = static_cast<double>(p) / static_cast<double>(n);
    report.reps = reps;
    report.skipped = skipped;
    report.mean_z = mean;
    report.var_z = var;
    report.ks_stat = ks_statistic_vs_normal(std::move(z_values));
    return report;
}

namespace {

void csv_real(std::ostream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    out << buf;
}

}  // namespace

void write_verification_csv(std::ostream& out,
                            const std::vector<ConcentrationReport>& concentration,
                            const std::vector<KsReport>& clt) {
    out << "quantity,n,p,r,median_rel_dev,ks_stat,var_z\n";
    for (const auto& report : concentration) {
        for (const auto& q : report.quantities) {
            out << q.name << ',' << report.n << ',' << report.p << ',';
            csv_real(out, report.r);
            out << ',';
            csv_real(out, q.median_rel_dev);
            out << ",,\n";
        }
    }
    for (const auto& report : clt) {
        out << "threshold_clt," << report.n << ',' << report.p << ',';
        csv_real(out, report.r);
        out << ",,";
        csv_real(out, report.ks_stat);
        out << ',';
        csv_real(out, report.var_z);
        out << '\n';
    }
}

}  // namespace nplda
