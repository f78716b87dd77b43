#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "nplda/classifiers.hpp"

namespace nplda {

// Aspect ratio r in (0,1) with the spectral edges sqrt(r) + 1/sqrt(r) -/+ 2.
struct MpParams {
    explicit MpParams(double ratio);
    double r;
    double lambda_minus;
    double lambda_plus;
};

// Stieltjes transform of the companion spectrum (trace over p).  Defined for
// Im z > 0; z = 0 is a removable point for r < 1.  Solved from the
// self-consistent quadratic, picking the branch mapping C+ to C+.
std::complex<double> mp_m1(std::complex<double> z, double r);

// z times the Stieltjes transform of the n-side spectrum; removable at 0.
std::complex<double> mp_zm2(std::complex<double> z, double r);

// Stieltjes transform of the n-side spectrum (pole at z = 0).
std::complex<double> mp_m2(std::complex<double> z, double r);

// Residual of the self-consistent quadratic at (z, m); zero for exact roots.
double mp_m1_residual(std::complex<double> z, std::complex<double> m, double r);
double mp_m2_residual(std::complex<double> z, std::complex<double> m, double r);

// Values and first three derivatives of m1 and z m2 at z = 0.
struct MpValuesAtZero {
    double m1_0, m1p_0, m1pp_0, m1ppp_0;
    double zm2_0, zm2p_0, zm2pp_0, zm2ppp_0;
};

// Closed forms.
MpValuesAtZero mp_values_at_zero(double r);

// Numerical counterpart: the first derivative comes from a pure complex step
// (Im f(x + i eps)/eps along C+), higher ones from seven-point stencils
// applied to that exact first derivative.
MpValuesAtZero mp_values_at_zero_numeric(double r);

// One concentration target of the quadratic-form expansions.
struct ConcentrationQuantity {
    std::string name;
    double predicted = 0.0;       // leading term
    double median_rel_dev = 0.0;  // median over repetitions
};

struct ConcentrationReport {
    std::size_t n = 0, p = 0;
    double r = 0.0;
    int reps = 0;
    std::vector<ConcentrationQuantity> quantities;
};

// Samples `reps` training sets from the model and reports the median relative
// deviation of the four quadratic forms from their leading terms.  The
// mean-difference quantity is normalized by max(|predicted|, sqrt(Delta_d))
// because its leading term vanishes as r -> 0.
ConcentrationReport verify_concentration(const LdaModel& model, std::size_t n0, std::size_t n1,
                                         int reps, SeedSpec seed);

struct KsReport {
    std::size_t n = 0, p = 0;
    double r = 0.0;
    int reps = 0;
    int skipped = 0;  // repetitions with non-positive centered signal
    double ks_stat = 0.0;
    double var_z = 0.0;
    double mean_z = 0.0;
};

// Standardizes the threshold estimate against its population target,
// Z = sqrt(n) (F_hat - F) / sqrt(S V_hat), and reports the two-sided KS
// distance of the Z sample from N(0,1).  Aborts when more than 1% of
// repetitions lose positivity of S.
KsReport verify_threshold_clt(const LdaModel& model, const NpLevels& levels, std::size_t n0,
                              std::size_t n1, int reps, SeedSpec seed);

// Two-sided Kolmogorov-Smirnov statistic against the standard normal.
double ks_statistic_vs_normal(std::vector<double> sample);

// Shared verification CSV: quantity,n,p,r,median_rel_dev,ks_stat,var_z.
void write_verification_csv(std::ostream& out,
                            const std::vector<ConcentrationReport>& concentration,
                            const std::vector<KsReport>& clt);

}  // namespace nplda
