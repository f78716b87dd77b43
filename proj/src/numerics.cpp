#include "nplda/numerics.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <numbers>

namespace nplda {

namespace {

WarnHandler g_warn_handler = nullptr;

}  // namespace

void warn(const std::string& message) {
    if (g_warn_handler)
        g_warn_handler(message);
    else
        std::cerr << "warning: " << message << "\n";
}

WarnHandler set_warn_handler(WarnHandler handler) {
    WarnHandler prev = g_warn_handler;
    g_warn_handler = handler;
    return prev;
}

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

double std_normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

namespace {

// Wichura (1988), algorithm AS 241, PPND16 variant.
double as241_quantile(double p) {
    static const double a[8] = {
        3.3871328727963666080e0,  1.3314166789178437745e2,  1.9715909503065514427e3,
        1.3731693765509461125e4,  4.5921953931549871457e4,  6.7265770927008700853e4,
        3.3430575583588128105e4,  2.5090809287301226727e3};
    static const double b[8] = {
        1.0,                      4.2313330701600911252e1,  6.8718700749205790830e2,
        5.3941960214247511077e3,  2.1213794301586595867e4,  3.9307895800092710610e4,
        2.8729085735721942674e4,  5.2264952788528545610e3};
    static const double c[8] = {
        1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
        3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
        2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static const double d[8] = {
        1.0,                      2.05319162663775882187e0, 1.67638483018380384940e0,
        6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
        5.47593808499534494600e-4, 1.05075007164441684324e-9};
    static const double e[8] = {
        6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
        2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
        2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static const double f[8] = {
        1.0,                      5.99832206555887937690e-1, 1.36929880922735805310e-1,
        1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
        1.42151175831644588870e-7, 2.04426310338993978564e-15};

    auto poly = [](const double* k, double r) {
        double s = k[7];
        for (int i = 6; i >= 0; --i) s = s * r + k[i];
        return s;
    };

    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * poly(a, r) / poly(b, r);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = poly(c, r) / poly(d, r);
    } else {
        r -= 5.0;
        value = poly(e, r) / poly(f, r);
    }
    return (q < 0.0) ? -value : value;
}

}  // namespace

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw InvalidLevel("std_normal_quantile requires p in (0,1)");
    double x = as241_quantile(p);
    const double density = std_normal_pdf(x);
    if (density > 1e-280) {
        // One Newton step; AS 241 already leaves |error| ~ 1e-15.
        x -= (std_normal_cdf(x) - p) / density;
    }
    return x;
}

namespace {

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
    const double eps = 3e-16;
    const double fpmin = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0 && b > 0.0))
        throw InvalidLevel("incomplete beta requires a,b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) *
                     beta_continued_fraction(b, a, 1.0 - x) / b;
}

double binom_upper_tail(long m, long k, double q) {
    if (m < 1)
        throw InvalidLevel("binom_upper_tail requires m >= 1");
    if (!(q >= 0.0 && q <= 1.0))
        throw InvalidLevel("binom_upper_tail requires q in [0,1]");
    if (k <= 0) return 1.0;
    if (k > m) return 0.0;
    if (q <= 0.0) return 0.0;
    if (q >= 1.0) return 1.0;
    // P(X >= k) = I_q(k, m-k+1) for X ~ Binomial(m, q).
    return regularized_incomplete_beta(q, static_cast<double>(k), static_cast<double>(m - k + 1));
}

double student_t_cdf(double t, double nu) {
    if (!(nu > 0.0))
        throw InvalidLevel("student_t_cdf requires nu > 0");
    if (t == 0.0) return 0.5;
    const double x = nu / (nu + t * t);
    const double half_tail = 0.5 * regularized_incomplete_beta(x, 0.5 * nu, 0.5);
    return (t < 0.0) ? half_tail : 1.0 - half_tail;
}

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t avalanche(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t splitmix_next(std::uint64_t& state) {
    state += kGolden;
    return avalanche(state);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = avalanche(base + kGolden);
    h = avalanche(h ^ (a + kGolden));
    h = avalanche(h ^ (b + kGolden));
    h = avalanche(h ^ (c + kGolden));
    return h;
}

RngStream::RngStream(SeedSpec seed) {
    std::uint64_t sm = avalanche(seed.base_seed + kGolden);
    sm = avalanche(sm ^ (seed.stream_index + kGolden));
    for (auto& word : s_) word = splitmix_next(sm);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = kGolden;
}

std::uint64_t RngStream::next_u64() {
    // xoshiro256++
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller; u1 shifted into (0,1] so the log is finite.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

void RngStream::fill_normal(double* out, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) out[i] = next_normal();
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
    if (bound == 0) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t value = next_u64();
        if (value >= threshold) return value % bound;
    }
}

double RngStream::next_gamma(double shape) {
    // Marsaglia-Tsang squeeze; boost for shape < 1.
    if (shape < 1.0) {
        const double g = next_gamma(shape + 1.0);
        const double u = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        return g * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double RngStream::next_chi_squared(double df) {
    if (!(df > 0.0))
        throw InvalidLevel("chi-squared requires df > 0");
    return 2.0 * next_gamma(0.5 * df);
}

std::vector<std::size_t> random_permutation(std::size_t n, RngStream& rng) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

}  // namespace nplda
