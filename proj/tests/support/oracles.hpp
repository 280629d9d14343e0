#pragma once

// Independent oracles for the test suites.  Everything here deliberately
// avoids the library's Mellin pipeline: Euler-Maclaurin zeta evaluation,
// closed-form determinants, and direct summation.

#include <complex>

namespace oracles {

using cplx = std::complex<double>;

// Hurwitz zeta sum_{n>=0} (n+a)^{-s} by Euler-Maclaurin; good to ~1e-13 for
// |s| <= 20, a > 0.
cplx em_hurwitz_zeta(cplx s, double a);

inline cplx em_riemann_zeta(cplx s) { return em_hurwitz_zeta(s, 1.0); }

// d/ds of the Hurwitz zeta at real s, via a complex step through the
// Euler-Maclaurin formula (no cancellation).
double em_hurwitz_zeta_sderiv(double s, double a);

// det(circle Laplacian of circumference L + lambda) = 4 sinh^2(L sqrt(l)/2),
// zero mode included.
cplx circle_char_fn(double circumference, cplx lambda);

// det(A + lambda) for the integer spectrum a_n = n: sqrt(2 pi)/Gamma(1+l).
double integer_char_fn_log(double lambda);  // -log det, via lgamma

// det(P + s) for the sphere operator {k+1/2, mult 2k+1}:
// exp(-(2 zeta_H'(-1, s+1/2) - 2 s zeta_H'(0, s+1/2))).
double sphere_operator_det(double s);

}  // namespace oracles
