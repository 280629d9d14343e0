#include "support/oracles.hpp"

#include <cmath>
#include <numbers>

namespace oracles {

namespace {

// Bernoulli numbers B_2..B_24 (even index).
constexpr double kB[12] = {
    1.0 / 6,      -1.0 / 30,     1.0 / 42,      -1.0 / 30,
    5.0 / 66,     -691.0 / 2730, 7.0 / 6,       -3617.0 / 510,
    43867.0 / 798, -174611.0 / 330, 854513.0 / 138, -236364091.0 / 2730,
};

cplx pochhammer(cplx s, int m) {
    cplx p = 1.0;
    for (int i = 0; i < m; ++i) p *= s + double(i);
    return p;
}

}  // namespace

cplx em_hurwitz_zeta(cplx s, double a) {
    const int M = 60;
    const int J = 12;
    cplx acc = 0.0;
    for (int n = 0; n < M; ++n) acc += std::pow(cplx(n + a), -s);
    const cplx ma(M + a);
    acc += std::pow(ma, 1.0 - s) / (s - 1.0);
    acc += 0.5 * std::pow(ma, -s);
    double fact = 2.0;  // (2j)!
    for (int j = 1; j <= J; ++j) {
        acc += kB[j - 1] / fact * pochhammer(s, 2 * j - 1) *
               std::pow(ma, -s - double(2 * j - 1));
        fact *= (2 * j + 1) * (2 * j + 2);
    }
    return acc;
}

double em_hurwitz_zeta_sderiv(double s, double a) {
    const double h = 1e-150;
    return em_hurwitz_zeta(cplx(s, h), a).imag() / h;
}

cplx circle_char_fn(double circumference, cplx lambda) {
    const cplx sh = std::sinh(circumference * std::sqrt(lambda) / 2.0);
    return 4.0 * sh * sh;
}

double integer_char_fn_log(double lambda) {
    return std::lgamma(1.0 + lambda) -
           0.5 * std::log(2.0 * std::numbers::pi);
}

double sphere_operator_det(double s) {
    const double a = s + 0.5;
    return std::exp(-(2.0 * em_hurwitz_zeta_sderiv(-1.0, a) -
                      2.0 * s * em_hurwitz_zeta_sderiv(0.0, a)));
}

}  // namespace oracles
