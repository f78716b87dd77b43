#include "nplda/linalg.hpp"

#include <cmath>

namespace nplda {

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DimensionMismatch("dot: lengths differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

SpdMatrix::SpdMatrix(Matrix m) : p_(m.rows()), chol_(m.rows(), m.rows()) {
    if (m.rows() != m.cols())
        throw DimensionMismatch("SpdMatrix: input not square");
    entries_.resize(p_ * p_);

    double max_abs = 0.0;
    double max_asym = 0.0;
    for (std::size_t i = 0; i < p_; ++i) {
        for (std::size_t j = 0; j < p_; ++j) {
            const double v = m.at(i, j);
            if (!std::isfinite(v))
                throw NotPositiveDefinite("SpdMatrix: non-finite entry");
            max_abs = std::max(max_abs, std::fabs(v));
            if (j > i) max_asym = std::max(max_asym, std::fabs(v - m.at(j, i)));
            entries_[i * p_ + j] = 0.5 * (v + m.at(j, i));
        }
    }
    if (max_abs > 0.0 && max_asym > 1e-8 * max_abs)
        warn("SpdMatrix: input asymmetry above 1e-8 relative, symmetrized");

    // In-place lower Cholesky.
    for (std::size_t j = 0; j < p_; ++j) {
        double diag = entries_[j * p_ + j];
        for (std::size_t k = 0; k < j; ++k) diag -= chol_.at(j, k) * chol_.at(j, k);
        if (!(diag > 0.0))
            throw NotPositiveDefinite("Cholesky pivot <= 0");
        const double ljj = std::sqrt(diag);
        chol_.at(j, j) = ljj;
        for (std::size_t i = j + 1; i < p_; ++i) {
            double s = entries_[i * p_ + j];
            for (std::size_t k = 0; k < j; ++k) s -= chol_.at(i, k) * chol_.at(j, k);
            chol_.at(i, j) = s / ljj;
        }
    }
}

SpdMatrix SpdMatrix::identity(std::size_t p) {
    Matrix m(p, p);
    for (std::size_t i = 0; i < p; ++i) m.at(i, i) = 1.0;
    return SpdMatrix(std::move(m));
}

Vec SpdMatrix::solve(std::span<const double> b) const {
    if (b.size() != p_)
        throw DimensionMismatch("SpdMatrix::solve: length mismatch");
    Vec x(b.begin(), b.end());
    // Forward substitution L y = b.
    for (std::size_t i = 0; i < p_; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= chol_.at(i, k) * x[k];
        x[i] = s / chol_.at(i, i);
    }
    // Back substitution L^T x = y.
    for (std::size_t ii = p_; ii > 0; --ii) {
        const std::size_t i = ii - 1;
        double s = x[i];
        for (std::size_t k = i + 1; k < p_; ++k) s -= chol_.at(k, i) * x[k];
        x[i] = s / chol_.at(i, i);
    }
    return x;
}

Vec SpdMatrix::matvec(std::span<const double> v) const {
    if (v.size() != p_)
        throw DimensionMismatch("SpdMatrix::matvec: length mismatch");
    Vec y(p_, 0.0);
    for (std::size_t i = 0; i < p_; ++i) {
        double s = 0.0;
        const double* row = entries_.data() + i * p_;
        for (std::size_t j = 0; j < p_; ++j) s += row[j] * v[j];
        y[i] = s;
    }
    return y;
}

double quadratic_form(std::span<const double> a, const SpdMatrix& m, std::span<const double> b) {
    if (a.size() != m.dim() || b.size() != m.dim())
        throw DimensionMismatch("quadratic_form: length mismatch");
    const Vec mb = m.matvec(b);
    return dot(a, mb);
}

SpdMatrix ar1_matrix(std::size_t p, double rho) {
    if (p < 1)
        throw DimensionMismatch("ar1_matrix: p must be >= 1");
    if (!(rho > -1.0 && rho < 1.0))
        throw InvalidLevel("ar1_matrix: rho must lie in (-1,1)");
    Matrix m(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            m.at(i, j) = std::pow(rho, std::fabs(static_cast<double>(i) - static_cast<double>(j)));
    return SpdMatrix(std::move(m));
}

void lower_tri_matvec(const Matrix& lower, std::span<const double> x, std::span<double> y) {
    const std::size_t p = lower.rows();
    if (x.size() != p || y.size() != p)
        throw DimensionMismatch("lower_tri_matvec: length mismatch");
    for (std::size_t i = 0; i < p; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) s += lower.at(i, j) * x[j];
        y[i] = s;
    }
}

}  // namespace nplda
