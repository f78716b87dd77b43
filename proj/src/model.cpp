#include "nplda/model.hpp"

#include <cmath>

namespace nplda {

LdaModel::LdaModel(Vec mu0, Vec mu1, SpdMatrix sigma)
    : mu0_(std::move(mu0)), mu1_(std::move(mu1)), sigma_(std::move(sigma)) {
    if (mu0_.size() != mu1_.size() || mu0_.size() != sigma_.dim())
        throw DimensionMismatch("LdaModel: mean/covariance dimensions disagree");
    mu_d_.resize(mu0_.size());
    for (std::size_t i = 0; i < mu0_.size(); ++i) mu_d_[i] = mu1_[i] - mu0_[i];
    bayes_direction_ = sigma_.solve(mu_d_);
    mahalanobis_ = dot(mu_d_, bayes_direction_);
    if (mahalanobis_ < 1e-6)
        warn("LdaModel: Mahalanobis distance below 1e-6, classes nearly indistinguishable");
}

LinearClassifier oracle_classifier(const LdaModel& model, Probability alpha) {
    const double a = alpha.value();
    if (!(a > 0.0 && a < 1.0))
        throw InvalidLevel("oracle_classifier requires alpha in (0,1)");
    const Vec& direction = model.bayes_direction();
    const double threshold = std::sqrt(model.mahalanobis()) * std_normal_quantile(1.0 - a) +
                             dot(direction, model.mu0());
    return {direction, threshold};
}

PopulationErrors population_errors(const LdaModel& model, const LinearClassifier& clf) {
    if (clf.direction.size() != model.dim())
        throw DimensionMismatch("population_errors: direction dimension mismatch");
    const double variance = quadratic_form(clf.direction, model.sigma(), clf.direction);
    if (!(variance > 0.0))
        throw NonPositiveSignal("population_errors: w^T Sigma w <= 0");
    const double scale = std::sqrt(variance);
    const double z0 = (clf.threshold - dot(clf.direction, model.mu0())) / scale;
    const double z1 = (clf.threshold - dot(clf.direction, model.mu1())) / scale;
    return {1.0 - std_normal_cdf(z0), std_normal_cdf(z1)};
}

double oracle_type2(const LdaModel& model, Probability alpha) {
    const double a = alpha.value();
    if (!(a > 0.0 && a < 1.0))
        throw InvalidLevel("oracle_type2 requires alpha in (0,1)");
    return std_normal_cdf(std_normal_quantile(1.0 - a) - std::sqrt(model.mahalanobis()));
}

double calibrate_flat_beta(std::size_t p, double rho, Probability alpha, double target_type2) {
    const double a = alpha.value();
    if (!(a > 0.0 && a < 1.0))
        throw InvalidLevel("calibrate_flat_beta requires alpha in (0,1)");
    if (!(target_type2 > 0.0 && target_type2 <= 1.0 - a))
        throw InvalidLevel("calibrate_flat_beta requires target in (0, 1-alpha]");
    if (target_type2 == 1.0 - a) {
        warn("calibrate_flat_beta: target equals 1-alpha, degenerate zero-signal model");
        return 0.0;
    }
    // Delta_d of beta = C 1_p is C^2 1^T Sigma 1, and the oracle type II error
    // is Phi(Phi^{-1}(1-alpha) - sqrt(Delta_d)); invert in closed form.
    const double sqrt_delta = std_normal_quantile(1.0 - a) - std_normal_quantile(target_type2);
    const SpdMatrix sigma = ar1_matrix(p, rho);
    double ones_quad = 0.0;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) ones_quad += sigma.at(i, j);
    return sqrt_delta / std::sqrt(ones_quad);
}

Vec beta_to_mu_d(std::span<const double> beta, const SpdMatrix& sigma) {
    return sigma.matvec(beta);
}

}  // namespace nplda
