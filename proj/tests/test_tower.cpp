#include <doctest.h>

#include <cmath>
#include <numbers>

#include "specdet/determinants.hpp"
#include "specdet/tower.hpp"
#include "support/oracles.hpp"

using namespace specdet;

namespace {
constexpr double kPi = std::numbers::pi;
const NumericConfig cfg{};
const double kE2Pi = std::exp(2.0 * kPi);
}  // namespace

TEST_CASE("level spectra of the circle tower") {
    auto tower = circle_tower(2.0 * kPi, {1, 2, 4});
    auto l1 = level_spectrum(tower, 1);
    CHECK(l1.entry(0).value == cplx(0.0));
    CHECK(l1.entry(1).value == cplx(1.0));
    // Level 2: circle of circumference 4 pi, leading nonzero 1/4.
    auto l2s = level_spectrum(tower, 2);
    CHECK(l2s.entry(1).value.real() == doctest::Approx(0.25));
    // Kernel dimension is always 1.
    for (int j : {1, 2, 4})
        CHECK(kernel_split(level_spectrum(tower, j)).kernel_dimension == 1);
    CHECK(level_index(tower, 4) == 4.0);
    CHECK_THROWS_AS(circle_tower(2.0 * kPi, {2, 2}), input_error);
}

TEST_CASE("counting functions and the Weyl ratio") {
    auto tower = circle_tower(2.0 * kPi, {1, 2, 4, 8, 16, 32, 64});
    for (int j : {1, 4, 16, 64}) {
        CountingFunction N(level_spectrum(tower, j), 1200.0);
        CHECK(N.kernel() == 1.0);
        // N_j(x) = 1 + 2 floor(j L sqrt(x) / 2pi).
        for (double x : {0.5, 2.0, 10.0, 900.0}) {
            const double expect =
                1.0 + 2.0 * std::floor(double(j) * std::sqrt(x));
            CHECK(N(x) == expect);
        }
        // N_j(x)/j approaches (L/pi) sqrt(x) within 2/j.
        const double x = 900.0;
        CHECK(std::abs(N(x) / j - 2.0 * std::sqrt(x)) <= 2.0 / j + 1e-12);
    }
}

TEST_CASE("heat trace convergence toward the line model") {
    auto tower = circle_tower(2.0 * kPi, {1, 2, 4, 8, 16});
    auto rows = heat_trace_convergence(tower, 1.0, cfg);
    CHECK(rows[0].limit == doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));
    CHECK(rows[0].value ==
          doctest::Approx(1.7726372048266522).epsilon(1e-12));
    // Gaps decrease with j down to the noise floor.
    CHECK(rows[1].gap < rows[0].gap);
    for (const auto& r : rows) CHECK(r.gap <= rows[0].gap + r.noise_floor);
    // Large level: gap at the rounding floor, far below 1e-6.
    CHECK(rows.back().gap < 1e-6);
    // The level-1 gap equals the Poisson tail 2 sqrt(pi) e^{-pi^2} + ...
    CHECK(rows[0].gap == doctest::Approx(2.0 * std::sqrt(kPi) *
                                         std::exp(-kPi * kPi))
                             .epsilon(1e-3));
}

TEST_CASE("uniform heat-gap envelope with R below the exact pi") {
    auto tower = circle_tower(2.0 * kPi, {1, 2, 4});
    std::vector<double> grid;
    for (double t = 0.05; t < 0.95; t += 0.05) grid.push_back(t);
    EnvelopeFit fit = heat_diff_decay(tower, grid, cfg);
    CHECK(fit.signal_points >= 4);
    CHECK(fit.R >= 3.0);
    CHECK(fit.R <= kPi + 0.1);  // exact decay constant is R = pi
    CHECK(fit.dominates);
    CHECK(fit.violations == 0);
}

TEST_CASE("determinant convergence to the L2 determinant") {
    auto tower = circle_tower(2.0 * kPi, {1, 2, 4, 8});
    auto rows = det_convergence(tower, cplx(1.0), cfg);
    CHECK(rows[0].limit == doctest::Approx(kE2Pi).epsilon(1e-11));
    // Level 1: 4 sinh^2(pi); level 2: 2 sinh(2 pi).
    CHECK(rows[0].value ==
          doctest::Approx(533.49352296749644).epsilon(1e-11));
    CHECK(rows[1].value ==
          doctest::Approx(2.0 * std::sinh(2.0 * kPi)).epsilon(1e-11));
    // Monotone decrease of gaps while above the floor.
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(rows[i].gap <=
              std::max(rows[i - 1].gap, rows[i].noise_floor));
    // Every level determinant also matches the sinh closed form.
    for (const auto& r : rows) {
        const double want = std::pow(
            oracles::circle_char_fn(r.index * 2.0 * kPi, cplx(1.0)).real(),
            1.0 / r.index);
        CHECK(std::abs(r.value - want) <= 1e-8 * want);
    }
}

TEST_CASE("kernel ratios, reduced determinants, and their limits") {
    auto tower = circle_tower(2.0 * kPi, {1, 2, 4, 8});
    KernelConvergence kc = det_convergence_with_kernels(
        tower, KernelMode::uniform_bound, cfg);
    CHECK(kc.h2 == 0.0);
    for (const auto& r : kc.rows) {
        CHECK(r.h_ratio == doctest::Approx(1.0 / r.index));
        // det'(D_j)^{1/j} = ((j L)^2)^{1/j}.
        const double want =
            std::pow(std::pow(double(r.j) * 2.0 * kPi, 2.0), 1.0 / r.index);
        CHECK(r.det_prime_root == doctest::Approx(want).epsilon(1e-10));
    }
    // ((jL)^2)^{1/j} -> 1 = det^(2), reported via the lambda -> 0+ path.
    CHECK(kc.det2_limit == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(kc.hypothesis_holds);
    // Thm-3.8-style constant: sup_j (tr'/j) sqrt(t) stays modest.
    CHECK(kc.hypothesis_constant < 2.0);

    // The spectral-gap hypothesis fails for the circle tower (bottom
    // eigenvalues shrink like 1/j^2).
    KernelConvergence sg = det_convergence_with_kernels(
        tower, KernelMode::spectral_gap, cfg);
    CHECK_FALSE(sg.hypothesis_holds);
}

TEST_CASE("uniform trace and resolvent bounds") {
    auto tower = circle_tower(2.0 * kPi, {1, 2, 4, 8, 16});
    // sup_j tr e^{-t D'_j}/j <= 2 t^{-1/2} on [1, 100].
    for (double t : {1.0, 4.0, 25.0, 100.0})
        CHECK(uniform_trace_bound(tower, t, cfg) <= 2.0 / std::sqrt(t));
    CHECK(uniform_trace_bound(tower, 1.0, cfg) >= std::sqrt(kPi) - 0.5);
    CHECK(uniform_resolvent_bound(tower, 2, cfg) < 10.0);
    CHECK_THROWS_AS(uniform_trace_bound(tower, -1.0, cfg), input_error);
}

TEST_CASE("Kazhdan inequality report") {
    auto circle = circle_tower(2.0 * kPi, {1, 2, 4, 8, 16, 32, 64});
    KazhdanReport rep = kazhdan_check(circle);
    CHECK(rep.h2 == 0.0);
    CHECK(rep.ratios.back().second == doctest::Approx(1.0 / 64.0));
    CHECK(rep.limsup_estimate <= 1e-12);
    CHECK(rep.consistent);

    auto torus = torus_tower({2.0 * kPi, 2.0 * kPi}, {1, 2, 4});
    KazhdanReport trep = kazhdan_check(torus);
    CHECK(trep.consistent);

    // A single finite level is trivially consistent with limsup >= 0.
    KazhdanReport one = kazhdan_check(circle_tower(2.0 * kPi, {4}));
    CHECK(one.limsup_estimate >= 0.0);
}

TEST_CASE("spectral gap probe verdicts") {
    auto tower = circle_tower(2.0 * kPi, {1, 2, 4, 8, 16});
    // x = 0.5: ratio = 2 floor(j sqrt(x))/j stays near 2 sqrt(x): no gap.
    GapProbe no_gap = spectral_gap_probe(tower, 0.5);
    CHECK(no_gap.verdict.find("no gap conclusion") != std::string::npos);
    // x below the first eigenvalue of every listed level.
    GapProbe with_gap = spectral_gap_probe(tower, 1.0 / (17.0 * 17.0));
    for (const auto& [j, r] : with_gap.ratios) CHECK(r == 0.0);
    CHECK(with_gap.verdict.find("consistent with a spectral gap") !=
          std::string::npos);
    CHECK(with_gap.verdict.find("not proven") != std::string::npos);
}

TEST_CASE("global growth estimate checks") {
    auto tower = circle_tower(2.0 * kPi, {1, 2, 4, 8, 16, 32, 64});
    std::vector<double> xs;
    for (int i = 0; i <= 40; ++i) xs.push_back(25.0 * i);
    // C = L/pi + 1 = 3 with a = b = 1/2 passes everywhere.
    for (const auto& row : growth_estimate_check(tower, 0.5, 0.5, 3.0, xs))
        CHECK(row.pass);
    // Too small a constant fails at large x.
    bool some_fail = false;
    for (const auto& row : growth_estimate_check(tower, 0.5, 0.5, 0.9, xs))
        some_fail = some_fail || !row.pass;
    CHECK(some_fail);
    // x = 0 rows pass trivially (0 <= 0).
    for (const auto& row : growth_estimate_check(tower, 0.5, 0.5, 3.0, {0.0}))
        CHECK(row.pass);
}

TEST_CASE("torus tower levels aggregate lattice multiplicities") {
    auto tower = torus_tower({2.0 * kPi, 2.0 * kPi}, {1, 2});
    auto s = level_spectrum(tower, 1);
    CHECK(s.entry(0).value == cplx(0.0));
    CHECK(s.entry(1).value == cplx(1.0));
    CHECK(s.entry(1).mult == 4);
    CHECK(level_index(tower, 2) == 4.0);
    auto rows = heat_trace_convergence(tower, 1.0, cfg);
    CHECK(rows[0].limit ==
          doctest::Approx(4.0 * kPi * kPi / (4.0 * kPi)).epsilon(1e-12));
    CHECK(rows.back().gap <= rows.front().gap + rows.back().noise_floor);
}
