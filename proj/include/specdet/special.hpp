#pragma once

// Complex gamma function and friends.  Accuracy contract: relative error
// below 1e-12 on {|Re z| <= 30, |Im z| <= 30} away from the poles, certified
// by tests against an externally generated reference table.

#include "specdet/types.hpp"

namespace specdet {

// sin(pi z) with argument reduction on Re z, stable near integers.
cplx sin_pi(cplx z);

cplx gamma(cplx z);

// 1/Gamma(z); entire, preferred near z = 0, -1, -2, ... where gamma() poles.
cplx recip_gamma(cplx z);

// log Gamma(z) for Re z > 0 (principal-branch Lanczos sum, no reflection).
cplx log_gamma_right(cplx z);

// Evaluates c / (Gamma(s) (s + alpha)) stably.  For alpha a nonnegative
// integer m the simple pole of 1/(s+alpha) at s=-m is cancelled by the zero
// of 1/Gamma, handled via 1/Gamma(s) = s(s+1)...(s+m) / Gamma(s+m+1).
// For other alpha throws pole_error when |s + alpha| < pole_margin.
cplx pole_term(cplx s, double alpha, cplx c, double pole_margin);

// d/ds at s=0 of the term above: c/alpha for alpha != 0, Euler gamma * c at
// alpha = 0.
cplx pole_term_deriv0(double alpha, cplx c);

// Harmonic number H_k = sum_{j<=k} 1/j, H_0 = 0.
double harmonic(int k);

bool is_nonneg_int(double alpha, double tol = 1e-9);

}  // namespace specdet
