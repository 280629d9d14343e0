#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <thread>

#include "specdet/spectrum.hpp"

using namespace specdet;

namespace {
constexpr double kPi = std::numbers::pi;

double power_sum(const SpectralSequence& s, int k, std::size_t M) {
    double acc = 0.0;
    for (std::size_t i = 0; i < M; ++i)
        acc += double(s.entry(i).mult) /
               std::pow(std::abs(s.entry(i).value), double(k));
    return acc;
}
}  // namespace

TEST_CASE("integer spectrum basics") {
    auto s = integer_spectrum();
    CHECK(s.entry(0).value == cplx(1.0));
    CHECK(s.entry(1).value == cplx(2.0));
    CHECK(s.entry(2).value == cplx(3.0));
    CHECK(s.entry(0).mult == 1);
    // 0 never appears.
    for (std::size_t i = 0; i < 100; ++i)
        CHECK(std::abs(s.entry(i).value) > 0.0);
    // Truncated zeta(2) sum.
    CHECK(power_sum(s, 2, 10000) ==
          doctest::Approx(1.6449340668482264).epsilon(1e-4));
}

TEST_CASE("circle spectrum: values, zero mode, scaling of circumference") {
    auto s = circle_spectrum(2.0 * kPi);
    CHECK(s.entry(0).value == cplx(1.0));
    CHECK(s.entry(0).mult == 2);
    CHECK(s.entry(1).value == cplx(4.0));
    CHECK(s.entry(2).value == cplx(9.0));

    auto with_zero = circle_spectrum(2.0 * kPi, true);
    CHECK(with_zero.entry(0).value == cplx(0.0));
    CHECK(with_zero.entry(0).mult == 1);

    auto stretched = circle_spectrum(4.0 * kPi);
    CHECK(stretched.entry(0).value.real() == doctest::Approx(0.25));

    CHECK_THROWS_AS(circle_spectrum(-1.0), input_error);
}

TEST_CASE("semilattice spectra and sector checks") {
    auto s = semilattice_spectrum(cplx(0.5), cplx(1.0));
    CHECK(s.entry(0).value == cplx(0.5));
    CHECK(s.entry(1).value == cplx(1.5));
    CHECK(s.entry(2).value == cplx(2.5));

    // arg(1 + n i) -> pi/2 stays inside the sector: accepted.
    auto tilted = semilattice_spectrum(cplx(1.0), cplx(0.0, 1.0));
    for (std::size_t i = 0; i < 10000; ++i) {
        const double a = std::arg(tilted.entry(i).value);
        CHECK(std::abs(a) < kPi - tilted.epsilon());
    }

    // Negative real part but inside W_eps: accepted.
    auto shifted = semilattice_spectrum(cplx(-1.0, 0.1), cplx(1.0));
    CHECK(shifted.entry(0).value.real() == doctest::Approx(-1.0));

    // Direction on the negative axis leaves every sector.
    CHECK_THROWS_AS(semilattice_spectrum(cplx(1.0), cplx(-1.0, 0.0)),
                    error);
}

TEST_CASE("torus spectrum by brute-force lattice enumeration") {
    auto s1 = torus_spectrum({2.0 * kPi}, 10.0);
    REQUIRE(s1.count());
    CHECK(*s1.count() == 4);
    CHECK(s1.entry(0).value == cplx(0.0));
    CHECK(s1.entry(0).mult == 1);
    CHECK(s1.entry(1).value == cplx(1.0));
    CHECK(s1.entry(1).mult == 2);
    CHECK(s1.entry(3).value == cplx(9.0));

    auto s2 = torus_spectrum({2.0 * kPi, 2.0 * kPi}, 2.0);
    CHECK(*s2.count() == 3);
    CHECK(s2.entry(1).value == cplx(1.0));
    CHECK(s2.entry(1).mult == 4);
    CHECK(s2.entry(2).value == cplx(2.0));
    CHECK(s2.entry(2).mult == 4);

    auto tiny = torus_spectrum({2.0 * kPi}, 0.5);
    CHECK(*tiny.count() == 1);
    CHECK(tiny.entry(0).mult == 1);

    CHECK_THROWS_AS(torus_spectrum({}, 1.0), input_error);
    CHECK_THROWS_AS(torus_spectrum({1.0}, -1.0), input_error);
}

TEST_CASE("scale / shift / power algebra") {
    auto s = integer_spectrum();
    auto doubled = scale(s, 2.0);
    CHECK(doubled.entry(2).value == cplx(6.0));

    auto shifted = shift(circle_spectrum(2.0 * kPi), cplx(1.0));
    CHECK(shifted.entry(0).value == cplx(2.0));
    CHECK(shifted.entry(1).value == cplx(5.0));
    CHECK(shifted.entry(2).value == cplx(10.0));

    auto squared = power(s, cplx(2.0));
    CHECK(std::abs(squared.entry(2).value - cplx(9.0)) < 1e-12);
    CHECK(squared.k() == 1);

    CHECK_THROWS_AS(scale(s, -2.0), input_error);
    CHECK_THROWS_AS(power(s, cplx(-1.0)), input_error);
    // Shift hitting an eigenvalue head-on makes the value zero and is
    // caught when the entry materializes under determinant preconditions.
    auto hit = shift(s, cplx(-1.0));
    CHECK(std::abs(hit.entry(0).value) == 0.0);
}

TEST_CASE("scale composition is exact entrywise") {
    auto s = integer_spectrum();
    auto a = scale(scale(s, 2.0), 3.0);
    auto b = scale(s, 6.0);
    for (std::size_t i = 0; i < 200; ++i)
        CHECK(a.entry(i).value == b.entry(i).value);
}

TEST_CASE("kernel_split removes zero modes and is idempotent") {
    auto ks = kernel_split(circle_spectrum(2.0 * kPi, true));
    CHECK(ks.kernel_dimension == 1);
    CHECK(ks.reduced.entry(0).value == cplx(1.0));

    auto again = kernel_split(ks.reduced);
    CHECK(again.kernel_dimension == 0);
    for (std::size_t i = 0; i < 50; ++i)
        CHECK(again.reduced.entry(i).value == ks.reduced.entry(i).value);

    CHECK(kernel_split(integer_spectrum()).kernel_dimension == 0);
    auto torus = kernel_split(torus_spectrum({2.0 * kPi, 2.0 * kPi}, 2.0));
    CHECK(torus.kernel_dimension == 1);
}

TEST_CASE("sector closure and monotone reality invariants") {
    for (auto s : {integer_spectrum(), circle_spectrum(2.0 * kPi),
                   semilattice_spectrum(cplx(0.5), cplx(1.0, 0.2))}) {
        for (std::size_t i = 0; i < 10000; ++i) {
            const cplx v = s.entry(i).value;
            const double a = std::arg(v);
            CHECK(a > -kPi + s.epsilon());
            CHECK(a < kPi - s.epsilon());
            if (i > 0)
                CHECK(v.real() >= s.entry(i - 1).value.real() - 1e-12);
        }
        CHECK(s.entry(9999).value.real() >=
              1e3 * s.entry(9).value.real());
    }
}

TEST_CASE("k-th power sums are Cauchy between 1e3 and 1e4 entries") {
    for (auto s : {integer_spectrum(), circle_spectrum(2.0 * kPi)}) {
        const int k = 2;  // both models have summable |a|^{-2}
        const double s3 = power_sum(s, k, 1000);
        const double s4 = power_sum(s, k, 10000);
        CHECK(std::abs(s4 - s3) < 1e-3);
        const double s5 = power_sum(s, k + 1, 1000);
        const double s6 = power_sum(s, k + 1, 10000);
        CHECK(std::abs(s6 - s5) < 1e-6);
    }
}

TEST_CASE("JSON round trip sorts and validates") {
    const char* doc = R"({
      "epsilon": 1.0, "k": 2,
      "entries": [{"re": 3.0, "im": 0.0, "mult": 1},
                  {"re": 2.0, "im": 0.5, "mult": 2}]
    })";
    auto s = load_spectrum_json(doc);
    CHECK(s.entry(0).value == cplx(2.0, 0.5));
    CHECK(s.entry(1).value == cplx(3.0));
    auto round = load_spectrum_json(spectrum_to_json(s));
    CHECK(round.entry(0).value == s.entry(0).value);
    CHECK(round.entry(0).mult == s.entry(0).mult);

    CHECK_THROWS_AS(load_spectrum_json("{\"k\": 2}"), input_error);
    CHECK_THROWS_AS(load_spectrum_json("not json"), input_error);
    // Sector violation rejected by the loader.
    CHECK_THROWS_AS(
        load_spectrum_json(R"({"epsilon": 3.0, "k": 1,
                               "entries": [{"re": -1.0, "im": 0.0}]})"),
        sector_error);
}

TEST_CASE("union merges by real part") {
    auto u = union_spectra(integer_spectrum(), circle_spectrum(2.0 * kPi));
    // 1 (int), 1 (circle, mult 2), 2, 3, 4 (int), 4 (circle), ...
    double prev = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
        CHECK(u.entry(i).value.real() >= prev - 1e-12);
        prev = u.entry(i).value.real();
    }
}

TEST_CASE("concurrent readers on a lazy sequence") {
    auto s = integer_spectrum();
    std::vector<std::thread> pool;
    std::atomic<bool> ok{true};
    for (int w = 0; w < 4; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = 0; i < 20000; ++i)
                if (s.entry(i).value != cplx(double(i + 1))) ok = false;
        });
    for (auto& t : pool) t.join();
    CHECK(ok.load());
}
