#include <doctest.h>

#include <cmath>

#include "nplda/linalg.hpp"
#include "nplda/numerics.hpp"
#include "oracles.hpp"

using namespace nplda;

namespace {

Matrix make2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m.at(0, 0) = a;
    m.at(0, 1) = b;
    m.at(1, 0) = c;
    m.at(1, 1) = d;
    return m;
}

}  // namespace

TEST_CASE("cholesky of identity and a hand case") {
    const SpdMatrix eye = SpdMatrix::identity(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(eye.cholesky_factor().at(i, j) == ((i == j) ? 1.0 : 0.0));

    const SpdMatrix m(make2(4.0, 2.0, 2.0, 3.0));
    CHECK(m.cholesky_factor().at(0, 0) == doctest::Approx(2.0));
    CHECK(m.cholesky_factor().at(1, 0) == doctest::Approx(1.0));
    CHECK(m.cholesky_factor().at(0, 1) == 0.0);
    CHECK(m.cholesky_factor().at(1, 1) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("degenerate matrices are rejected") {
    CHECK_THROWS_AS(SpdMatrix(Matrix(2, 2)), NotPositiveDefinite);  // zero matrix
    Matrix rect(2, 3);
    CHECK_THROWS_AS(SpdMatrix(std::move(rect)), DimensionMismatch);
}

TEST_CASE("solve: identity, scalar, AR(1) round trip") {
    const SpdMatrix eye = SpdMatrix::identity(3);
    const Vec b{1.0, -2.0, 0.5};
    CHECK(eye.solve(b) == b);

    Matrix scalar(1, 1);
    scalar.at(0, 0) = 2.0;
    CHECK(SpdMatrix(std::move(scalar)).solve(Vec{1.0})[0] == doctest::Approx(0.5));

    const SpdMatrix sigma = ar1_matrix(3, 0.5);
    const Vec x_true{1.2, 1.2, 1.2};
    const Vec b2 = sigma.matvec(x_true);
    const Vec x = sigma.solve(b2);
    for (std::size_t i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(1.2).epsilon(1e-12));

    CHECK_THROWS_AS(sigma.solve(Vec{1.0, 2.0}), DimensionMismatch);
}

TEST_CASE("solve round trip over random SPD matrices") {
    RngStream rng(SeedSpec{2024, 0});
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t p = 1 + static_cast<std::size_t>(rng.next_below(64));
        const double cond = std::pow(10.0, 6.0 * rng.next_uniform());
        const SpdMatrix m(oracles::random_spd(p, cond, rng));
        Vec b(p);
        for (double& v : b) v = rng.next_normal();
        const Vec x = m.solve(b);
        const Vec back = m.matvec(x);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            num += (back[i] - b[i]) * (back[i] - b[i]);
            den += b[i] * b[i];
        }
        CHECK(std::sqrt(num) <= 1e-8 * std::sqrt(den));
    }
}

TEST_CASE("cholesky reconstructs the matrix") {
    RngStream rng(SeedSpec{2025, 0});
    const SpdMatrix m(oracles::random_spd(16, 1e4, rng));
    const Matrix& factor = m.cholesky_factor();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < 16; ++k) sum += factor.at(i, k) * factor.at(j, k);
            num += (sum - m.at(i, j)) * (sum - m.at(i, j));
            den += m.at(i, j) * m.at(i, j);
        }
    CHECK(std::sqrt(num) <= 1e-10 * std::sqrt(den));
}

TEST_CASE("quadratic form") {
    const SpdMatrix eye = SpdMatrix::identity(3);
    const Vec u{1.0, 2.0, 3.0};
    CHECK(quadratic_form(u, eye, u) == doctest::Approx(14.0));

    const SpdMatrix sigma = ar1_matrix(3, 0.5);
    const Vec ones{1.0, 1.0, 1.0};
    // entry summation: 3*1 + 4*0.5 + 2*0.25
    CHECK(quadratic_form(ones, sigma, ones) == doctest::Approx(5.5).epsilon(1e-14));

    CHECK(quadratic_form(u, sigma, Vec{0.0, 0.0, 0.0}) == 0.0);
    CHECK_THROWS_AS(quadratic_form(Vec{1.0}, sigma, ones), DimensionMismatch);
}

TEST_CASE("quadratic form symmetry property") {
    RngStream rng(SeedSpec{7, 3});
    const SpdMatrix m(oracles::random_spd(8, 100.0, rng));
    for (int trial = 0; trial < 50; ++trial) {
        Vec a(8), b(8);
        for (double& v : a) v = rng.next_normal();
        for (double& v : b) v = rng.next_normal();
        const double ab = quadratic_form(a, m, b);
        const double ba = quadratic_form(b, m, a);
        CHECK(std::fabs(ab - ba) <= 1e-12 * std::max(1.0, std::fabs(ab)));
    }
}

TEST_CASE("ar1 matrices") {
    const SpdMatrix eye = ar1_matrix(4, 0.0);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(eye.at(i, j) == ((i == j) ? 1.0 : 0.0));

    const SpdMatrix two = ar1_matrix(2, 0.5);
    CHECK(two.at(0, 0) == 1.0);
    CHECK(two.at(0, 1) == 0.5);
    CHECK(two.at(1, 0) == 0.5);

    CHECK(ar1_matrix(3, 0.5).at(0, 2) == doctest::Approx(0.25));
    CHECK_THROWS_AS(ar1_matrix(3, 1.0), InvalidLevel);
}

TEST_CASE("asymmetric input is symmetrized with a warning") {
    static int warnings = 0;
    warnings = 0;
    auto prev = set_warn_handler(+[](const std::string&) { ++warnings; });
    Matrix m = make2(4.0, 2.0, 2.1, 3.0);  // 5% asymmetry
    const SpdMatrix spd(std::move(m));
    CHECK(spd.at(0, 1) == doctest::Approx(2.05));
    CHECK(spd.at(1, 0) == doctest::Approx(2.05));
    CHECK(warnings == 1);
    set_warn_handler(prev);
}
