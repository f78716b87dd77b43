#pragma once

#include <cstdint>
#include <vector>

#include "nplda/errors.hpp"

namespace nplda {

// Probability value validated to lie in [0,1].
class Probability {
public:
    Probability() : value_(0.0) {}
    explicit Probability(double v) : value_(v) {
        if (!(v >= 0.0 && v <= 1.0))
            throw InvalidLevel("probability outside [0,1]");
    }
    double value() const noexcept { return value_; }

private:
    double value_;
};

// Standard normal CDF, absolute error below 1e-14.
double std_normal_cdf(double x);

// Standard normal density.
double std_normal_pdf(double x);

// Inverse standard normal CDF for p in (0,1).  Wichura's AS 241 rational
// approximation polished with one Newton step; |cdf(quantile(p)) - p| < 1e-12.
double std_normal_quantile(double p);

// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
double regularized_incomplete_beta(double x, double a, double b);

// Upper tail of Binomial(m, q): sum_{j=k}^{m} C(m,j) q^j (1-q)^{m-j}.
// k <= 0 returns 1, k > m returns 0.  Stable up to m ~ 1e6.
double binom_upper_tail(long m, long k, double q);

// CDF of Student's t with nu degrees of freedom.
double student_t_cdf(double t, double nu);

// Identifies one reproducible random stream.  The same (base_seed,
// stream_index) pair always yields the same sequence.
struct SeedSpec {
    std::uint64_t base_seed = 0;
    std::uint64_t stream_index = 0;
};

// Stable 64-bit mix used to derive per-repetition seeds from experiment
// coordinates; chaining splitmix64 finalizers over the words.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c);

// Deterministic, platform-independent random stream.
//
// State setup: splitmix64 chain over (base_seed, stream_index) fills the four
// xoshiro256++ words.  Uniform doubles take the top 53 bits of the 64-bit
// output; normal deviates come from the classic Box-Muller transform, two per
// pair of uniforms, in a fixed order.
class RngStream {
public:
    explicit RngStream(SeedSpec seed);

    std::uint64_t next_u64();
    double next_uniform();        // in [0, 1)
    double next_normal();         // standard normal
    void fill_normal(double* out, std::size_t count);

    // Uniform integer in [0, bound) without modulo bias.
    std::uint64_t next_below(std::uint64_t bound);

    // Chi-square deviate with df > 0 (via Marsaglia-Tsang gamma).
    double next_chi_squared(double df);

private:
    double next_gamma(double shape);

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Seeded permutation of {0,...,n-1} (Fisher-Yates over the stream).
std::vector<std::size_t> random_permutation(std::size_t n, RngStream& rng);

}  // namespace nplda
