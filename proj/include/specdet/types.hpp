#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace specdet {

using cplx = std::complex<double>;

// Failure taxonomy used for process exit codes: input_error -> 2,
// everything else derived from error -> 3.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed user input: bad flags, unreadable files, violated preconditions
// that are detectable from the data alone.
struct input_error : error {
    using error::error;
};

// A sequence (or a transform of one) left every admissible sector.
struct sector_error : input_error {
    using input_error::input_error;
};

// Evaluation requested within pole_margin of a zeta pole.
struct pole_error : error {
    using error::error;
};

// A truncation/quadrature budget was exhausted before the tolerance held.
struct nonconvergence_error : error {
    using error::error;
};

// Tolerances and budgets governing every continuation.  pole_margin is the
// exclusion radius around the poles -alpha_nu; upper_cutoff_T caps the
// automatically chosen truncation point of the large-t integral.
struct NumericConfig {
    double tol_rel = 1e-12;
    double tol_abs = 1e-14;
    int quad_panels_max = 1 << 15;
    double upper_cutoff_T = 400.0;
    double pole_margin = 1e-8;
    double zero_threshold = 1e-12;
};

inline constexpr double kEulerGamma = 0.57721566490153286061;

}  // namespace specdet
