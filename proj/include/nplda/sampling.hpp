#pragma once

#include "nplda/model.hpp"

namespace nplda {

// Class-wise observation blocks; rows are samples.
struct LabeledSample {
    Matrix x0;  // n0 x p
    Matrix x1;  // n1 x p

    std::size_t n0() const noexcept { return x0.rows(); }
    std::size_t n1() const noexcept { return x1.rows(); }
    std::size_t dim() const noexcept { return x0.cols(); }
};

// Everything the classifiers consume, computed once per training sample.
struct SampleStats {
    Vec mu0_hat;
    Vec mu1_hat;
    Vec mu_d_hat;
    SpdMatrix sigma_hat;  // pooled, divisor n0 + n1 - 2
    Vec a_hat;            // sigma_hat^{-1} mu_d_hat

    std::size_t n0 = 0;
    std::size_t n1 = 0;
    std::size_t n = 0;
    std::size_t p = 0;

    double r = 0.0;           // p / n
    double signal = 0.0;      // mu_d_hat^T a_hat
    double v1_norm_sq = 0.0;  // n^2 / (n0 n1)

    double a_dot_mu0_hat() const { return dot(a_hat, mu0_hat); }
};

// Rows of each class drawn i.i.d. N(mu^a, Sigma) as mu^a + L z with L the
// Cholesky factor of Sigma; class 0 rows are generated first.
LabeledSample sample_gaussian(const LdaModel& model, std::size_t n0, std::size_t n1, SeedSpec seed);

// Multivariate t rows mu^a + L z sqrt(df / chi2_df), one chi-square per row
// (Sigma is the scale matrix, so covariance is Sigma df/(df-2) for df > 2).
LabeledSample sample_student_t(const LdaModel& model, double df, std::size_t n0, std::size_t n1,
                               SeedSpec seed);

// Class means, pooled covariance and derived quantities.  Requires
// n0, n1 >= 2 and n0 + n1 - 2 >= p.
SampleStats compute_stats(const LabeledSample& sample);

}  // namespace nplda
