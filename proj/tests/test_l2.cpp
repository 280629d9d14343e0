#include <doctest.h>

#include <cmath>
#include <numbers>

#include "specdet/determinants.hpp"
#include "specdet/l2.hpp"
#include "specdet/special.hpp"
#include "support/oracles.hpp"

using namespace specdet;

namespace {
constexpr double kPi = std::numbers::pi;
const NumericConfig cfg{};
}  // namespace

TEST_CASE("line model trace and invariants") {
    auto m = line_model(2.0 * kPi);
    CHECK(m.trace(cplx(1.0)).real() ==
          doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));
    // t -> infinity: trace -> 0 = h^(2).
    CHECK(m.trace(cplx(1e8)).real() < 1e-3);
    CHECK(m.kernel_gamma_dim == 0.0);
    CHECK(m.gns_exact == 1.0);
    // trace(t) - h = O(t^{-gns/2}) along a log grid.
    for (double t : {10.0, 100.0, 1000.0})
        CHECK(m.trace(cplx(t)).real() <=
              1.0001 * m.poly_coef * std::pow(t, -0.5));
}

TEST_CASE("flat model in two dimensions") {
    auto m = flat_model({1.0, 1.0});
    CHECK(m.trace(cplx(1.0)).real() ==
          doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-14));
    CHECK(m.gns_exact == 2.0);
    CHECK_THROWS_AS(flat_model({}), input_error);
}

TEST_CASE("gns estimates recover the exact decay exponents") {
    CHECK(gns_estimate(line_model(2.0 * kPi), 10.0, 1000.0) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(gns_estimate(flat_model({1.0, 1.0}), 10.0, 1000.0) ==
          doctest::Approx(2.0).epsilon(1e-6));
    // Constant-trace model: exponent 0.
    GammaTraceModel flat0 = line_model(1.0);
    flat0.trace = [](cplx) { return cplx(1.0); };
    CHECK(gns_estimate(flat0, 10.0, 1000.0) ==
          doctest::Approx(0.0).epsilon(1e-9));
    // Nonpositive trace - h rejected.
    GammaTraceModel neg = line_model(1.0);
    neg.kernel_gamma_dim = 10.0;
    CHECK_THROWS_AS(gns_estimate(neg, 10.0, 1000.0), input_error);
}

TEST_CASE("l2 zeta closed form for the line") {
    // zeta(s, lambda) = (L/sqrt(4pi)) Gamma(s-1/2)/Gamma(s) lambda^{1/2-s}.
    auto m = line_model(2.0 * kPi);
    CHECK(std::abs(l2_zeta_eval(m, cplx(1.0), cplx(1.0), cfg) - cplx(kPi)) <
          1e-10);
    CHECK(std::abs(l2_zeta_eval(m, cplx(4.0), cplx(1.0), cfg) -
                   cplx(kPi / 2.0)) < 1e-10);
    // s = 0 at lambda > 0: the 1/Gamma zero wins.
    CHECK(std::abs(l2_zeta_eval(m, cplx(1.0), cplx(0.0), cfg)) < 1e-11);
    // General (s, lambda) points against the closed form.
    const double c0 = 2.0 * kPi / std::sqrt(4.0 * kPi);
    for (double s : {0.3, 1.4}) {
        for (cplx lam : {cplx(0.7), cplx(3.0), cplx(1.0, 2.0)}) {
            const cplx want = c0 * specdet::gamma(cplx(s - 0.5)) *
                              recip_gamma(cplx(s)) *
                              std::pow(lam, 0.5 - s);
            const cplx got = l2_zeta_eval(m, lam, cplx(s), cfg);
            CHECK(std::abs(got - want) <= 1e-9 * (1.0 + std::abs(want)));
        }
    }
}

TEST_CASE("l2 determinant of the line is exp(L sqrt(lambda))") {
    auto m = line_model(2.0 * kPi);
    CHECK(std::abs(l2_det(m, cplx(1.0), cfg) -
                   cplx(std::exp(2.0 * kPi))) <=
          1e-10 * std::exp(2.0 * kPi));
    CHECK(std::abs(l2_det(m, cplx(4.0), cfg) -
                   cplx(std::exp(4.0 * kPi))) <=
          1e-9 * std::exp(4.0 * kPi));
    // Complex lambda, including left of the imaginary axis (ray rotation).
    for (cplx lam : {cplx(2.0, 3.0), cplx(-1.0, 1.0), cplx(-2.0, -0.5)}) {
        const cplx want = std::exp(2.0 * kPi * std::sqrt(lam));
        const cplx got = l2_det(m, lam, cfg);
        CHECK(std::abs(got - want) <= 1e-8 * std::abs(want));
    }
    CHECK_THROWS_AS(l2_det(m, cplx(-1.0), cfg), input_error);
}

TEST_CASE("lambda -> 0+ limit matches the direct lambda = 0 evaluation") {
    auto m = flat_model({1.0, 1.0});
    // Closed form: det = exp(vol/(4pi) (lambda - lambda log lambda)) -> 1.
    const cplx at0_path = l2_det(m, cplx(1e-9), cfg);
    CHECK(std::abs(at0_path - cplx(1.0)) < 1e-6);
    const cplx direct = l2_det(m, cplx(0.0), cfg);
    CHECK(std::abs(direct - cplx(1.0)) < 1e-10);
    // zeta^(2)(s, 0) vanishes identically for the flat model: both split
    // halves are the same rational function with opposite signs.
    CHECK(std::abs(l2_zeta_eval(m, cplx(0.0), cplx(0.3), cfg)) < 1e-10);
    // Strip precondition at lambda = 0.
    CHECK_THROWS_AS(l2_zeta_eval(m, cplx(0.0), cplx(1.5), cfg), input_error);
}

TEST_CASE("zeta differential equation in lambda") {
    // d/dlambda zeta(s, lambda) + s zeta(s+1, lambda) = 0.
    auto m = line_model(2.0 * kPi);
    for (double s : {0.3, 1.1}) {
        for (double lam : {1.0, 2.5}) {
            const double h = 1e-4;
            const cplx up = l2_zeta_eval(m, cplx(lam + h), cplx(s), cfg);
            const cplx dn = l2_zeta_eval(m, cplx(lam - h), cplx(s), cfg);
            const cplx dlam = (up - dn) / (2.0 * h);
            const cplx rhs = -s * l2_zeta_eval(m, cplx(lam), cplx(s + 1.0),
                                               cfg);
            CHECK(std::abs(dlam - rhs) < 1e-6);
        }
    }
}

TEST_CASE("iterated-integration continuation cross-check") {
    // log det(lambda) = log det(1) + int_1^lambda zeta(1, z) dz, checked at
    // three sample points including a rotated-ray one.
    auto m = line_model(2.0 * kPi);
    for (cplx lam : {cplx(4.0), cplx(2.0, 2.0), cplx(-1.0, 1.0)}) {
        const cplx base = std::log(l2_det(m, cplx(1.0), cfg));
        cplx integral = 0.0;
        const int steps = 64;  // Gauss on the straight segment 1 -> lambda
        const cplx dz = (lam - cplx(1.0)) / double(steps);
        for (int i = 0; i < steps; ++i) {
            const cplx z1 = cplx(1.0) + dz * (double(i) + 0.2113248654051871);
            const cplx z2 = cplx(1.0) + dz * (double(i) + 0.7886751345948129);
            integral += 0.5 * dz *
                        (l2_zeta_eval(m, z1, cplx(1.0), cfg) +
                         l2_zeta_eval(m, z2, cplx(1.0), cfg));
        }
        // Compare multiplicatively: the principal log of the direct value
        // can differ from the continued log by 2 pi i.
        const cplx via_ode = std::exp(base + integral);
        const cplx direct = l2_det(m, lam, cfg);
        CHECK(std::abs(via_ode - direct) <= 1e-6 * std::abs(direct));
    }
}

TEST_CASE("equivariant line traces decay rapidly at small t") {
    const double L = 2.0 * kPi;
    CHECK(equivariant_l2_trace(L, 1, 1.0) ==
          doctest::Approx(std::sqrt(kPi) * std::exp(-kPi * kPi))
              .epsilon(1e-12));
    // t -> 0 faster than any power: check against C e^{-c/t} on a grid.
    for (double t : {0.5, 0.2, 0.1, 0.05})
        CHECK(equivariant_l2_trace(L, 1, t) <=
              1.0 * std::exp(-9.0 / t));  // c = 9 < (nL)^2/4 = pi^2
    CHECK_THROWS_AS(equivariant_l2_trace(L, 0, 1.0), input_error);
}

TEST_CASE("equivariant l2 determinants against the closed form") {
    const double L = 2.0 * kPi;
    for (int n : {1, 2, 3, -1}) {
        for (cplx lam : {cplx(0.25), cplx(1.0), cplx(4.0)}) {
            const double an = std::abs(n);
            const cplx want = std::exp(
                -std::exp(-an * L * std::sqrt(lam)) / an);
            const cplx got = equivariant_l2_det(L, n, lam, cfg);
            CHECK(std::abs(got - want) <= 1e-11 * std::abs(want));
        }
    }
    CHECK(equivariant_l2_det(L, 1, cplx(1.0), cfg).real() ==
          doctest::Approx(0.99813429985457464).epsilon(1e-11));
}

TEST_CASE("circle product identity assembles det from l2 factors") {
    // e^{L sqrt(l)} prod_n exp(-(1/n)e^{-n L sqrt(l)})^2 = 4 sinh^2(L
    // sqrt(l)/2), every factor from this module's operations.
    const double L = 2.0 * kPi;
    auto line = line_model(L);
    for (double lam : {0.25, 1.0, 4.0}) {
        cplx log_acc = std::log(l2_det(line, cplx(lam), cfg));
        for (int n = 1; n <= 40; ++n) {
            const cplx f = equivariant_l2_det(L, n, cplx(lam), cfg);
            log_acc += 2.0 * std::log(f);
            if (std::abs(std::log(f)) < 1e-18) break;
        }
        const cplx lhs = std::exp(log_acc);
        const cplx rhs = oracles::circle_char_fn(L, cplx(lam));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
    }
}

TEST_CASE("equivariant spectra: zeta values and determinants") {
    // Rotation by pi on the circle: weights 2(-1)^k.
    auto eq = circle_rotation_spectrum(2.0 * kPi, 2);
    // s = 1: sum 2(-1)^k/k^2 = -pi^2/6.
    CHECK(std::abs(equivariant_zeta(eq, cplx(1.0), cfg) -
                   cplx(-kPi * kPi / 6.0)) < 1e-10);
    // Determinant: (pi/2)^2 from the eta-function closed form.
    CHECK(std::abs(equivariant_det(eq, cfg) - cplx(kPi * kPi / 4.0)) <
          1e-9);

    // Identity rotation weights equal plain multiplicities: the equivariant
    // path must reproduce the plain regularized determinant.
    EquivariantSpectrum id;
    id.generator = [](std::size_t i) {
        const double k = double(i + 1);
        return EquivariantEntry{k * k, cplx(2.0)};
    };
    id.weight_bound = 2.0;
    id.expansion = circle_theta_expansion(2.0 * kPi, true);
    const cplx det_eq = equivariant_det(id, cfg);
    CHECK(std::abs(det_eq - cplx(4.0 * kPi * kPi)) < 1e-9);

    // Finite equivariant spectrum {(2, -1)}: det = exp(log 2) ... = 1/2.
    auto fin = finite_equivariant_spectrum({{2.0, cplx(-1.0)}});
    CHECK(std::abs(equivariant_det(fin, cfg) - cplx(0.5)) < 1e-12);
}

TEST_CASE("rotation model expansion is certified") {
    auto eq = circle_rotation_spectrum(2.0 * kPi, 3);
    const NumericConfig c = cfg;
    for (double t : {0.5, 0.2, 0.1, 0.05, 0.02}) {
        cplx th = 0.0;
        for (std::size_t i = 0; i < 4000; ++i) {
            const auto e = eq.entry(i);
            th += e.weight * std::exp(-t * e.eigenvalue);
        }
        const double rem = std::abs(th - eq.expansion.eval_terms(t));
        CHECK(rem <= eq.expansion.truncation_bound(t, 1) + 1e-13);
    }
    (void)c;
}

TEST_CASE("limit relation det_g(D) = lim lambda^{-tr(g|ker)} det_g(D+l)") {
    auto eq = circle_rotation_spectrum(2.0 * kPi, 2);
    const cplx direct = equivariant_det(eq, cfg);
    // Kernel of the circle Laplacian is the constants; rotation acts
    // trivially there, so tr(g|ker) = 1.
    for (double lam : {1e-3, 1e-4}) {
        const cplx shifted =
            equivariant_det_shifted(eq, cplx(lam), cplx(1.0), cfg);
        const cplx limit = shifted * std::pow(lam, -1.0);
        CHECK(std::abs(limit - direct) < 60.0 * lam * std::abs(direct));
    }
}
