#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nplda/sampling.hpp"

using namespace nplda;

namespace {

Matrix sample_cov(const Matrix& x) {
    const std::size_t n = x.rows(), p = x.cols();
    Vec mean(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) mean[j] += x.at(i, j);
    for (double& v : mean) v /= static_cast<double>(n);
    Matrix cov(p, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = 0; k < p; ++k)
                cov.at(j, k) += (x.at(i, j) - mean[j]) * (x.at(i, k) - mean[k]);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k) cov.at(j, k) /= static_cast<double>(n - 1);
    return cov;
}

}  // namespace

TEST_CASE("gaussian sampling: means and covariance concentrate") {
    const std::size_t n = 100000;
    const LdaModel model(Vec(3, 0.0), Vec(3, 1.0), SpdMatrix::identity(3));
    const LabeledSample sample = sample_gaussian(model, n, 2, SeedSpec{11, 0});
    for (std::size_t j = 0; j < 3; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += sample.x0.at(i, j);
        mean /= static_cast<double>(n);
        CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    }

    const SpdMatrix sigma = ar1_matrix(3, 0.5);
    const LdaModel ar_model(Vec(3, 0.0), Vec(3, 1.0), sigma);
    const LabeledSample ar_sample = sample_gaussian(ar_model, n, 2, SeedSpec{12, 0});
    const Matrix cov = sample_cov(ar_sample.x0);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(std::fabs(cov.at(j, k) - sigma.at(j, k)) < 0.02);
}

TEST_CASE("sampling is a pure function of the seed") {
    const LdaModel model(Vec(2, 0.0), Vec(2, 1.0), ar1_matrix(2, 0.3));
    const LabeledSample a = sample_gaussian(model, 50, 60, SeedSpec{99, 4});
    const LabeledSample b = sample_gaussian(model, 50, 60, SeedSpec{99, 4});
    for (std::size_t i = 0; i < 50; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(a.x0.at(i, j) == b.x0.at(i, j));
    for (std::size_t i = 0; i < 60; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(a.x1.at(i, j) == b.x1.at(i, j));

    const LabeledSample t1 = sample_student_t(model, 4.0, 30, 30, SeedSpec{5, 5});
    const LabeledSample t2 = sample_student_t(model, 4.0, 30, 30, SeedSpec{5, 5});
    for (std::size_t i = 0; i < 30; ++i) CHECK(t1.x0.at(i, 0) == t2.x0.at(i, 0));
}

TEST_CASE("student t: df -> infinity recovers the gaussian covariance") {
    const SpdMatrix sigma = ar1_matrix(3, 0.5);
    const LdaModel model(Vec(3, 0.0), Vec(3, 1.0), sigma);
    const LabeledSample sample = sample_student_t(model, 1e6, 100000, 2, SeedSpec{21, 0});
    const Matrix cov = sample_cov(sample.x0);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(std::fabs(cov.at(j, k) - sigma.at(j, k)) < 0.025);
}

TEST_CASE("student t at df=4 has covariance 2 Sigma") {
    // Fourth moments of t(4) are infinite, so the sample covariance converges
    // slowly; the tolerance below was frozen from repeated runs at this size.
    const SpdMatrix sigma = ar1_matrix(2, 0.5);
    const LdaModel model(Vec(2, 0.0), Vec(2, 1.0), sigma);
    const LabeledSample sample = sample_student_t(model, 4.0, 400000, 2, SeedSpec{22, 0});
    const Matrix cov = sample_cov(sample.x0);
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t k = 0; k < 2; ++k)
            CHECK(std::fabs(cov.at(j, k) - 2.0 * sigma.at(j, k)) < 0.25);
    CHECK_THROWS_AS(sample_student_t(model, 0.0, 10, 10, SeedSpec{1, 0}), InvalidLevel);
}

TEST_CASE("compute_stats on the one-dimensional hand example") {
    LabeledSample sample{Matrix(2, 1), Matrix(2, 1)};
    sample.x0.at(0, 0) = 0.0;
    sample.x0.at(1, 0) = 2.0;
    sample.x1.at(0, 0) = 1.0;
    sample.x1.at(1, 0) = 3.0;
    const SampleStats stats = compute_stats(sample);
    CHECK(stats.mu0_hat[0] == 1.0);
    CHECK(stats.mu1_hat[0] == 2.0);
    CHECK(stats.mu_d_hat[0] == 1.0);
    CHECK(stats.sigma_hat.at(0, 0) == doctest::Approx(2.0));
    CHECK(stats.a_hat[0] == doctest::Approx(0.5));
    CHECK(stats.r == doctest::Approx(0.25));
    CHECK(stats.signal == doctest::Approx(0.5));
    CHECK(stats.v1_norm_sq == doctest::Approx(4.0));
}

TEST_CASE("compute_stats rejects degenerate inputs") {
    LabeledSample constant{Matrix(3, 1), Matrix(3, 1)};
    for (std::size_t i = 0; i < 3; ++i) {
        constant.x0.at(i, 0) = 2.0;
        constant.x1.at(i, 0) = 5.0;
    }
    CHECK_THROWS_AS(compute_stats(constant), NotPositiveDefinite);

    LabeledSample tiny{Matrix(1, 1), Matrix(2, 1)};
    CHECK_THROWS_AS(compute_stats(tiny), InsufficientSamples);

    LabeledSample wide{Matrix(2, 3), Matrix(2, 3)};
    CHECK_THROWS_AS(compute_stats(wide), InsufficientSamples);  // n - 2 < p
}

TEST_CASE("v1 norm identity re-derived from the explicit vector construction") {
    for (auto [n0, n1] : {std::pair<std::size_t, std::size_t>{50, 50}, {20, 80}, {125, 500}}) {
        const double n = static_cast<double>(n0 + n1);
        // v1 = (-sqrt(n)/n0 repeated n0 times, sqrt(n)/n1 repeated n1 times)
        double norm_sq = 0.0;
        double dot_e0 = 0.0;
        for (std::size_t i = 0; i < n0; ++i) {
            const double v = -std::sqrt(n) / static_cast<double>(n0);
            norm_sq += v * v;
            dot_e0 += v / std::sqrt(static_cast<double>(n0));
        }
        for (std::size_t i = 0; i < n1; ++i) {
            const double v = std::sqrt(n) / static_cast<double>(n1);
            norm_sq += v * v;
        }
        CHECK(norm_sq ==
              doctest::Approx(n * n / (static_cast<double>(n0) * static_cast<double>(n1)))
                  .epsilon(1e-12));
        CHECK(dot_e0 ==
              doctest::Approx(-std::sqrt(n / static_cast<double>(n0))).epsilon(1e-12));
    }
    // n0 = n1 = 50 gives exactly 4
    LabeledSample sample{Matrix(50, 1), Matrix(50, 1)};
    RngStream rng(SeedSpec{3, 3});
    for (std::size_t i = 0; i < 50; ++i) {
        sample.x0.at(i, 0) = rng.next_normal();
        sample.x1.at(i, 0) = 1.0 + rng.next_normal();
    }
    CHECK(compute_stats(sample).v1_norm_sq == 4.0);
}

TEST_CASE("signal equals the quadratic-form identity") {
    const LdaModel model(Vec(5, 0.0), Vec(5, 0.8), ar1_matrix(5, 0.4));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const LabeledSample sample = sample_gaussian(model, 40, 60, SeedSpec{seed, 0});
        const SampleStats stats = compute_stats(sample);
        const double via_quadratic = quadratic_form(stats.a_hat, stats.sigma_hat, stats.a_hat);
        CHECK(std::fabs(stats.signal - via_quadratic) <= 1e-10 * std::fabs(stats.signal));
    }
}

TEST_CASE("stats are invariant under row permutations within classes") {
    const LdaModel model(Vec(3, 0.0), Vec(3, 1.0), ar1_matrix(3, 0.5));
    const LabeledSample sample = sample_gaussian(model, 30, 40, SeedSpec{77, 0});
    LabeledSample shuffled = sample;
    RngStream rng(SeedSpec{78, 0});
    const auto perm0 = random_permutation(30, rng);
    for (std::size_t i = 0; i < 30; ++i) {
        auto src = sample.x0.row(perm0[i]);
        std::copy(src.begin(), src.end(), shuffled.x0.row(i).begin());
    }
    const SampleStats a = compute_stats(sample);
    const SampleStats b = compute_stats(shuffled);
    CHECK(std::fabs(a.signal - b.signal) < 1e-10);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(a.mu0_hat[j] == doctest::Approx(b.mu0_hat[j]).epsilon(1e-13));
}
