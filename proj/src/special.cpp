#include "specdet/special.hpp"

#include <cmath>
#include <numbers>

namespace specdet {

namespace {

constexpr double kPi = std::numbers::pi;

// Lanczos coefficients, g = 607/128, n = 15 (Godfrey's set).
constexpr double kLanczosG = 607.0 / 128.0;
constexpr double kLanczosC[15] = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4,
    0.15808870322491248884e-3,  -0.21026444172410488319e-3,
    0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

// Lanczos partial-fraction sum; valid for Re z > 0.
cplx lanczos_sum(cplx z) {
    cplx s = kLanczosC[0];
    for (int i = 1; i < 15; ++i) s += kLanczosC[i] / (z - 1.0 + double(i));
    return s;
}

cplx gamma_right(cplx z) {
    // Gamma(z) = sqrt(2 pi) t^(z-1/2) e^{-t} A(z), t = z + g - 1/2.
    const cplx t = z + (kLanczosG - 0.5);
    return std::sqrt(2.0 * kPi) * std::pow(t, z - 0.5) * std::exp(-t) *
           lanczos_sum(z);
}

}  // namespace

cplx sin_pi(cplx z) {
    const double n = std::round(z.real());
    const cplx r = z - n;
    // sin(pi(n+r)) = (-1)^n sin(pi r)
    const cplx s = std::sin(kPi * r);
    return (std::fmod(n, 2.0) == 0.0) ? s : -s;
}

cplx gamma(cplx z) {
    if (z.real() >= 0.5) return gamma_right(z);
    // Reflection: Gamma(z) = pi / (sin(pi z) Gamma(1-z)).
    return kPi / (sin_pi(z) * gamma_right(1.0 - z));
}

cplx recip_gamma(cplx z) {
    if (z.real() >= 0.5) return 1.0 / gamma_right(z);
    return sin_pi(z) * gamma_right(1.0 - z) / kPi;
}

cplx log_gamma_right(cplx z) {
    const cplx t = z + (kLanczosG - 0.5);
    return 0.5 * std::log(2.0 * kPi) + (z - 0.5) * std::log(t) - t +
           std::log(lanczos_sum(z));
}

bool is_nonneg_int(double alpha, double tol) {
    return alpha > -tol && std::abs(alpha - std::round(alpha)) < tol;
}

cplx pole_term(cplx s, double alpha, cplx c, double pole_margin) {
    if (is_nonneg_int(alpha)) {
        const int m = int(std::round(alpha));
        // c * s(s+1)...(s+m-1) / Gamma(s+m+1): exact cancellation of the
        // 1/(s+m) pole against the zero of 1/Gamma(s).
        cplx prod = 1.0;
        for (int i = 0; i < m; ++i) prod *= s + double(i);
        return c * prod * recip_gamma(s + double(m + 1));
    }
    if (std::abs(s + alpha) < pole_margin)
        throw pole_error("zeta evaluation within pole_margin of s = " +
                         std::to_string(-alpha));
    return c * recip_gamma(s) / (s + alpha);
}

cplx pole_term_deriv0(double alpha, cplx c) {
    if (alpha == 0.0) return kEulerGamma * c;
    return c / alpha;
}

double harmonic(int k) {
    double h = 0.0;
    for (int j = 1; j <= k; ++j) h += 1.0 / j;
    return h;
}

}  // namespace specdet
