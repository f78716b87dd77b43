#pragma once

#include <span>

#include "nplda/linalg.hpp"
#include "nplda/numerics.hpp"

namespace nplda {

// Direction vector plus scalar threshold; predicts 1 when
// direction^T x > threshold (strict).
struct LinearClassifier {
    Vec direction;
    double threshold = 0.0;
};

// Two Gaussian classes sharing one covariance matrix.
class LdaModel {
public:
    LdaModel(Vec mu0, Vec mu1, SpdMatrix sigma);

    std::size_t dim() const noexcept { return mu0_.size(); }
    const Vec& mu0() const noexcept { return mu0_; }
    const Vec& mu1() const noexcept { return mu1_; }
    const Vec& mu_d() const noexcept { return mu_d_; }
    const SpdMatrix& sigma() const noexcept { return sigma_; }

    // Sigma^{-1} mu_d, the oracle direction.
    const Vec& bayes_direction() const noexcept { return bayes_direction_; }

    // mu_d^T Sigma^{-1} mu_d.
    double mahalanobis() const noexcept { return mahalanobis_; }

private:
    Vec mu0_, mu1_, mu_d_;
    SpdMatrix sigma_;
    Vec bayes_direction_;
    double mahalanobis_;
};

struct PopulationErrors {
    double type1 = 0.0;
    double type2 = 0.0;
};

// Level-alpha NP oracle: direction Sigma^{-1} mu_d, threshold
// sqrt(Delta_d) Phi^{-1}(1-alpha) + mu_d^T Sigma^{-1} mu0.
LinearClassifier oracle_classifier(const LdaModel& model, Probability alpha);

// Exact Gaussian error rates of 1(w^T x > c) under the two classes.
PopulationErrors population_errors(const LdaModel& model, const LinearClassifier& clf);

// Closed form Phi(Phi^{-1}(1-alpha) - sqrt(Delta_d)).
double oracle_type2(const LdaModel& model, Probability alpha);

// Scale C_p with beta = C_p 1_p giving oracle type II error equal to
// target_type2 under the AR(1) model at level alpha.
double calibrate_flat_beta(std::size_t p, double rho, Probability alpha, double target_type2);

// mu_d = Sigma beta.
Vec beta_to_mu_d(std::span<const double> beta, const SpdMatrix& sigma);

}  // namespace nplda
