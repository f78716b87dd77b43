#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nplda/errors.hpp"

namespace nplda {

using Vec = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);

// Dense row-major matrix for observation blocks (rows = samples).
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
};

// Symmetric positive definite matrix with its Cholesky factor.
//
// Construction symmetrizes the input as (M + M^T)/2, warning when the
// relative asymmetry exceeds 1e-8, then factorizes immediately; a pivot <= 0
// throws NotPositiveDefinite.  Instances are immutable afterwards and safe to
// share across threads.
class SpdMatrix {
public:
    explicit SpdMatrix(Matrix m);

    static SpdMatrix identity(std::size_t p);

    std::size_t dim() const noexcept { return p_; }
    double at(std::size_t i, std::size_t j) const { return entries_[i * p_ + j]; }

    // Lower-triangular L with L L^T equal to the matrix.
    const Matrix& cholesky_factor() const noexcept { return chol_; }

    // Solves M x = b through the Cholesky factor.
    Vec solve(std::span<const double> b) const;

    Vec matvec(std::span<const double> v) const;


private:
    std::size_t p_;
    std::vector<double> entries_;
    Matrix chol_;
};

// a^T M b.
double quadratic_form(std::span<const double> a, const SpdMatrix& m, std::span<const double> b);

// AR(1) covariance: entry (i,j) = rho^|i-j|.
SpdMatrix ar1_matrix(std::size_t p, double rho);

// y = L x for the lower-triangular factor of an SpdMatrix.
void lower_tri_matvec(const Matrix& lower, std::span<const double> x, std::span<double> y);

}  // namespace nplda
