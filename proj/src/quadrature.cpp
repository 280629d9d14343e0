#include "specdet/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace specdet {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; the rule
// is symmetric).
constexpr int kHalf = 8;
constexpr double kNode[kHalf] = {
    0.09501250983763744019, 0.28160355077925891323, 0.45801677765722738634,
    0.61787624440264374845, 0.75540440835500303390, 0.86563120238783174388,
    0.94457502307323257608, 0.98940093499164993260,
};
constexpr double kWeight[kHalf] = {
    0.18945061045506849629, 0.18260341504492358887, 0.16915651939500253819,
    0.14959598881657673208, 0.12462897125553387205, 0.09515851168249278481,
    0.06225352393864789286, 0.02715245941175409485,
};

cplx panel(const std::function<cplx(double)>& f, double a, double b,
           double& fmax) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    cplx acc = 0.0;
    for (int i = 0; i < kHalf; ++i) {
        const double dx = half * kNode[i];
        const cplx hi = f(mid + dx);
        const cplx lo = f(mid - dx);
        fmax = std::max({fmax, std::abs(hi), std::abs(lo)});
        acc += kWeight[i] * (hi + lo);
    }
    return acc * half;
}

cplx composite(const std::function<cplx(double)>& f, double a, double b,
               int n, double& fmax) {
    const double h = (b - a) / n;
    cplx acc = 0.0;
    for (int i = 0; i < n; ++i)
        acc += panel(f, a + i * h, a + (i + 1) * h, fmax);
    return acc;
}

}  // namespace

QuadResult integrate(const std::function<cplx(double)>& f, double a, double b,
                     double tol_rel, double tol_abs, int max_panels) {
    if (!(b > a)) return {cplx(0.0), 0.0, 0};
    double fmax = 0.0;
    cplx prev = composite(f, a, b, 1, fmax);
    for (int n = 2; n <= max_panels; n *= 2) {
        const cplx cur = composite(f, a, b, n, fmax);
        const double diff = std::abs(cur - prev);
        // Allowance for integrands that are differences of large terms and
        // bottom out at rounding noise.
        const double floor = 32.0 * std::numeric_limits<double>::epsilon() *
                             fmax * (b - a);
        if (n >= 8 && diff <= tol_abs + tol_rel * std::abs(cur) + floor)
            return {cur, diff + floor, n};
        prev = cur;
    }
    throw nonconvergence_error("quadrature did not converge within " +
                               std::to_string(max_panels) + " panels");
}

}  // namespace specdet
