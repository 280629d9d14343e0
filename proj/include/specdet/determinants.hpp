#pragma once

// Regularized determinants exp(-zeta'(0)), reduced determinants, the
// characteristic function det(A + lambda) on C \ (-inf, 0], its large-lambda
// asymptotics, and Fredholm determinants of trace-class perturbations.

#include <cstdint>
#include <utility>
#include <vector>

#include "specdet/mellin.hpp"
#include "specdet/spectrum.hpp"
#include "specdet/theta.hpp"
#include "specdet/types.hpp"

namespace specdet {

// exp(-zeta'(0)) for a kernel-free admissible sequence.
cplx reg_det(const SpectralSequence& seq, const ThetaExpansion& expansion,
             const NumericConfig& cfg = {});
// -zeta'(0); use when the determinant itself would over/underflow.
cplx log_reg_det(const SpectralSequence& seq, const ThetaExpansion& expansion,
                 const NumericConfig& cfg = {});

// kernel_split followed by reg_det of the reduced sequence; the expansion
// must describe the reduced spectrum.
std::pair<std::int64_t, cplx> reduced_det(
    const SpectralSequence& seq_with_kernel,
    const ThetaExpansion& expansion_of_reduced, const NumericConfig& cfg = {});

// Characteristic function ------------------------------------------------------

struct CharFn {
    SpectralSequence seq;          // kernel allowed (shifts make it regular)
    ThetaExpansion expansion;      // of the unshifted theta series
    NumericConfig config;
    // Optional closed form of the theta series; replaces the direct
    // eigenvalue sum (models with slowly converging sums at small t).
    std::function<cplx(double)> theta;
};

struct CharFnValue {
    cplx det = 0.0;
    cplx log_det = 0.0;            // principal value; meaningless when a zero
    std::int64_t zero_order = 0;   // > 0: lambda hit -a_n, det is exactly 0
};

// det(A + lambda) for lambda off (-inf, 0].  Internally the spectrum is
// rescaled by c = max(|lambda|, 1) and eigenvalues whose shifted real part
// is small are split into an explicit finite factor, so the Mellin pipeline
// only ever sees a well-conditioned shifted tail:
//   det(A + lambda) = c^{zeta_{A+lambda}(0)} * prod_head (a/c + mu)^mult
//                     * det_tail,   mu = lambda / c.
CharFnValue char_fn_eval(const CharFn& cf, cplx lambda);

// Large-lambda asymptotics (power terms c_nu Gamma(alpha_nu) lambda^{-alpha},
// log terms for alpha_nu = -k) ---------------------------------------------

struct AsymptoticSeries {
    struct PowerTerm {
        double alpha;
        cplx coef;  // c_nu * Gamma(alpha_nu)
    };
    struct LogTerm {
        int k;
        cplx c;  // the raw expansion coefficient at alpha = -k
    };
    std::vector<PowerTerm> powers;
    std::vector<LogTerm> logs;
    ThetaExpansion source;  // retained for error estimates
    // Where the alpha_nu = 0 coefficient lives in the imaginary-shift
    // variant: false keys it to the (H_k - log lambda) family (consistent
    // with the real-shift formula), true moves it to the constant family
    // with C0 + gamma +- i pi/2 + log lambda.
    bool zero_alpha_constant_family = false;
};

AsymptoticSeries asymptotic_series_from(const ThetaExpansion& expansion);

// Truncated -log det(A + lambda) for large positive lambda.
cplx asymptotic_neg_log_det(const AsymptoticSeries& series, double lambda);

// Variant for A +- i*lambda; sign is +1 or -1.
cplx asymptotic_neg_log_det_imag(const AsymptoticSeries& series,
                                 double lambda, int sign);

// Bound on |exact - truncated| from the retained remainder data: the Mellin
// image of the remainder bound plus the rapidly decreasing g_alpha pieces.
// theta_abs_at_1 bounds sum mult e^{-Re a_n} (pass 0 to skip that tail).
double asymptotic_error_estimate(const AsymptoticSeries& series,
                                 double lambda, double theta_abs_at_1,
                                 const NumericConfig& cfg = {});

// Drops all but the first n terms into the remainder bound (for testing the
// asymptotics at a chosen truncation order).
ThetaExpansion truncate_expansion(const ThetaExpansion& e, std::size_t n);

// C0 = lim_{M->inf} [ int_0^M (1-cos t)/t dt - log M ], evaluated by
// quadrature plus the asymptotic cosine-integral tail.
double cosine_integral_constant();

// Fredholm determinants --------------------------------------------------------

enum class FredholmMethod { product, exp_series };

// det_Fr(1 + T) for normal trace-class T given its eigenvalues (value,
// multiplicity).  product: prod (1 + lambda_n)^mult.  exp_series: requires
// max |lambda_n| < 1.
cplx fredholm_det(const std::vector<std::pair<cplx, std::int64_t>>& eigs,
                  FredholmMethod method, const NumericConfig& cfg = {});

struct FredholmRatioReport {
    bool trace_class = false;   // numerically: partial sums of |1/a_n| Cauchy
    cplx lhs = 0.0;             // det_Fr(1 + A^{-1})
    cplx rhs = 0.0;             // det(A+1) / det(A)
    double rel_gap = 0.0;
    double lhs_tail_err = 0.0;  // extrapolation residual estimate
};

// Both sides of det_Fr(1 + A^{-1}) = det(A+1)/det(A), computed independently
// (Richardson-extrapolated log-product vs the Mellin pipeline).
FredholmRatioReport fredholm_ratio_check(const SpectralSequence& seq,
                                         const ThetaExpansion& expansion,
                                         const NumericConfig& cfg = {});

}  // namespace specdet
