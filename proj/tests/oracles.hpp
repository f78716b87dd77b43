#pragma once

#include <cstddef>

#include "nplda/sampling.hpp"

// Independent reference implementations used only to freeze and cross-check
// expected test values.  None of these share code paths with the library.
namespace oracles {

// Normal CDF by adaptive Simpson quadrature of the density from 0 to x.
double normal_cdf_quadrature(double x);

// Inverse of the quadrature CDF by bisection.
double normal_quantile_bisect(double p);

// Binomial upper tail by direct summation with exact Pascal coefficients
// (valid for m <= 30 where every term is exactly representable).
double binom_tail_sum(int m, int k, double q);

// Student-t CDF by quadrature of the density.
double student_t_cdf_quadrature(double t, double nu);

// Line-by-line transcription of the three-part variance expression,
// deliberately written as literal formula text rather than reusing the
// library's factored form.
double variance_transcription(double signal, double r, double v1_norm_sq, double n, double n0,
                              double n1, double phi_alpha);

// Random SPD matrix with bounded condition number (rotations applied to a
// fixed spectrum), for solve round-trip property tests.
nplda::Matrix random_spd(std::size_t p, double cond, nplda::RngStream& rng);

}  // namespace oracles
