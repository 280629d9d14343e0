#pragma once

// Panel-doubling composite Gauss-Legendre integration for smooth complex
// integrands on finite intervals.  The panel count doubles until two
// successive refinements agree to tolerance; intended for integrands that
// callers have already flattened by a log substitution.

#include <functional>

#include "specdet/types.hpp"

namespace specdet {

struct QuadResult {
    cplx value{};
    double err_est = 0.0;  // |last refinement change| plus caller-added tails
    int panels = 0;
};

QuadResult integrate(const std::function<cplx(double)>& f, double a, double b,
                     double tol_rel, double tol_abs, int max_panels);

inline QuadResult integrate(const std::function<cplx(double)>& f, double a,
                            double b, const NumericConfig& cfg) {
    return integrate(f, a, b, cfg.tol_rel, cfg.tol_abs, cfg.quad_panels_max);
}

}  // namespace specdet
