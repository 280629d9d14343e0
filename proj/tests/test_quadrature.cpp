#include <doctest.h>

#include <cmath>

#include "specdet/quadrature.hpp"

using specdet::cplx;
using specdet::integrate;

TEST_CASE("polynomial and oscillatory integrands") {
    auto cubic = [](double x) { return cplx(x * x * x); };
    CHECK(integrate(cubic, 0.0, 2.0, 1e-13, 1e-15, 1 << 14).value.real() ==
          doctest::Approx(4.0).epsilon(1e-12));

    auto osc = [](double x) { return std::exp(cplx(0.0, 5.0) * x); };
    const cplx got = integrate(osc, 0.0, 1.0, 1e-13, 1e-15, 1 << 14).value;
    const cplx want =
        (std::exp(cplx(0.0, 5.0)) - 1.0) / cplx(0.0, 5.0);
    CHECK(std::abs(got - want) < 1e-12);
}

TEST_CASE("log-substituted improper integral") {
    // int_0^1 t^{-1/2} dt = 2 via u = log t.
    auto f = [](double u) {
        const double t = std::exp(u);
        return cplx(std::pow(t, 0.5));  // t^{s-1} * t at s = 1/2
    };
    const double lo = std::log(1e-26);
    CHECK(integrate(f, lo, 0.0, 1e-13, 1e-15, 1 << 15).value.real() ==
          doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("panel budget exhaustion raises nonconvergence") {
    auto f = [](double x) { return cplx(std::cos(200.0 * x)); };
    CHECK_THROWS_AS(integrate(f, 0.0, 50.0, 1e-14, 1e-30, 4),
                    specdet::nonconvergence_error);
}

TEST_CASE("error estimate reflects the last refinement") {
    auto f = [](double x) { return cplx(std::exp(-x * x)); };
    const auto r = integrate(f, 0.0, 3.0, 1e-12, 1e-15, 1 << 14);
    CHECK(r.err_est < 1e-10);
    CHECK(r.value.real() == doctest::Approx(0.88620734825952140).epsilon(1e-12));
}
