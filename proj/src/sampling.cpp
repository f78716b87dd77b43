#include "nplda/sampling.hpp"

#include <cmath>

namespace nplda {

namespace {

void fill_class_rows(Matrix& out, const Vec& mean, const Matrix& chol, RngStream& rng,
                     double dof) {
    const std::size_t p = out.cols();
    Vec z(p);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        rng.fill_normal(z.data(), p);
        auto row = out.row(i);
        lower_tri_matvec(chol, z, row);
        double scale = 1.0;
        if (dof > 0.0) scale = std::sqrt(dof / rng.next_chi_squared(dof));
        for (std::size_t j = 0; j < p; ++j) row[j] = mean[j] + scale * row[j];
    }
}

LabeledSample sample_impl(const LdaModel& model, std::size_t n0, std::size_t n1, SeedSpec seed,
                          double dof) {
    if (n0 < 1 || n1 < 1)
        throw InsufficientSamples("sampling requires n0, n1 >= 1");
    const std::size_t p = model.dim();
    const Matrix& chol = model.sigma().cholesky_factor();
    RngStream rng(seed);
    LabeledSample sample{Matrix(n0, p), Matrix(n1, p)};
    fill_class_rows(sample.x0, model.mu0(), chol, rng, dof);
    fill_class_rows(sample.x1, model.mu1(), chol, rng, dof);
    return sample;
}

}  // namespace

LabeledSample sample_gaussian(const LdaModel& model, std::size_t n0, std::size_t n1,
                              SeedSpec seed) {
    return sample_impl(model, n0, n1, seed, 0.0);
}

LabeledSample sample_student_t(const LdaModel& model, double df, std::size_t n0, std::size_t n1,
                               SeedSpec seed) {
    if (!(df > 0.0))
        throw InvalidLevel("sample_student_t requires df > 0");
    return sample_impl(model, n0, n1, seed, df);
}

SampleStats compute_stats(const LabeledSample& sample) {
    const std::size_t n0 = sample.n0();
    const std::size_t n1 = sample.n1();
    const std::size_t p = sample.dim();
    const std::size_t n = n0 + n1;
    if (n0 < 2 || n1 < 2)
        throw InsufficientSamples("compute_stats requires n0, n1 >= 2");
    if (sample.x1.cols() != p)
        throw DimensionMismatch("compute_stats: class blocks disagree on p");
    if (n < p + 2)
        throw InsufficientSamples("compute_stats requires n0 + n1 - 2 >= p");

    auto class_mean = [p](const Matrix& x) {
        Vec mean(p, 0.0);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            auto row = x.row(i);
            for (std::size_t j = 0; j < p; ++j) mean[j] += row[j];
        }
        for (double& v : mean) v /= static_cast<double>(x.rows());
        return mean;
    };

    Vec mu0 = class_mean(sample.x0);
    Vec mu1 = class_mean(sample.x1);

    // Centered two-pass accumulation of the pooled scatter.
    Matrix scatter(p, p);
    Vec centered(p);
    auto accumulate = [&](const Matrix& x, const Vec& mean) {
        for (std::size_t i = 0; i < x.rows(); ++i) {
            auto row = x.row(i);
            for (std::size_t j = 0; j < p; ++j) centered[j] = row[j] - mean[j];
            for (std::size_t j = 0; j < p; ++j) {
                const double cj = centered[j];
                double* out = &scatter.at(j, 0);
                for (std::size_t k = j; k < p; ++k) out[k] += cj * centered[k];
            }
        }
    };
    accumulate(sample.x0, mu0);
    accumulate(sample.x1, mu1);
    const double divisor = static_cast<double>(n - 2);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = j; k < p; ++k) {
            const double v = scatter.at(j, k) / divisor;
            scatter.at(j, k) = v;
            scatter.at(k, j) = v;
        }

    SampleStats stats{
        std::move(mu0), std::move(mu1), Vec(p), SpdMatrix(std::move(scatter)), Vec{},
        n0, n1, n, p, 0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < p; ++j) stats.mu_d_hat[j] = stats.mu1_hat[j] - stats.mu0_hat[j];
    stats.a_hat = stats.sigma_hat.solve(stats.mu_d_hat);
    stats.r = static_cast<double>(p) / static_cast<double>(n);
    stats.signal = dot(stats.mu_d_hat, stats.a_hat);
    stats.v1_norm_sq = static_cast<double>(n) * static_cast<double>(n) /
                       (static_cast<double>(n0) * static_cast<double>(n1));
    return stats;
}

}  // namespace nplda
