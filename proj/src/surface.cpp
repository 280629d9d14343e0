#include "specdet/surface.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "specdet/determinants.hpp"
#include "specdet/parallel.hpp"

namespace specdet {

namespace {

constexpr double kPi = std::numbers::pi;

double sqrt_shift(double lambda) {
    if (!(lambda > -0.25))
        throw input_error("lambda must lie off the cut (-inf, -1/4]");
    return std::sqrt(lambda + 0.25);
}

void validate(const LengthSpectrum& ls) {
    if (ls.genus < 1) throw input_error("genus must be >= 1");
    double prev = 0.0;
    for (const auto& p : ls.primitives) {
        if (!(p.length > 0.0))
            throw input_error("primitive lengths must be positive");
        if (p.length < prev - 1e-12)
            throw input_error("primitive lengths must be sorted increasing");
        if (p.count <= 0) throw input_error("counts must be positive");
        prev = p.length;
    }
}

}  // namespace

// JSON --------------------------------------------------------------------------

LengthSpectrum load_length_spectrum_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("bad length-spectrum JSON: ") +
                          e.what());
    }
    LengthSpectrum ls;
    ls.genus = j.value("genus", 2);
    for (const auto& p : j.value("primitives", nlohmann::json::array()))
        ls.primitives.push_back(
            {p.value("length", 0.0), p.value("count", std::int64_t(1))});
    std::sort(ls.primitives.begin(), ls.primitives.end(),
              [](const PrimitiveClass& a, const PrimitiveClass& b) {
                  return a.length < b.length;
              });
    validate(ls);
    return ls;
}

LengthSpectrum load_length_spectrum_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot read length spectrum: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_length_spectrum_json(ss.str());
}

std::string length_spectrum_to_json(const LengthSpectrum& ls) {
    nlohmann::json j;
    j["genus"] = ls.genus;
    j["primitives"] = nlohmann::json::array();
    for (const auto& p : ls.primitives)
        j["primitives"].push_back(
            {{"length", p.length}, {"count", p.count}});
    return j.dump(2);
}

// Sphere operator ----------------------------------------------------------------

SpectralSequence sphere_operator_spectrum() {
    return SpectralSequence::lazy(
        [](std::size_t i) {
            return SpectrumEntry{cplx(double(i) + 0.5),
                                 std::int64_t(2 * i + 1)};
        },
        kPi / 2, 3);
}

cplx sphere_operator_theta(double t) {
    const double x = 0.5 * t;
    const double sh = std::sinh(x);
    return cplx(std::cosh(x) / (2.0 * sh * sh));
}

ThetaExpansion sphere_operator_expansion() {
    // cosh(t/2) / (2 sinh^2(t/2)) = 2 t^-2 + 1/12 - 7 t^2/960
    //                               + 31 t^4/96768 + O(t^6).
    ThetaExpansion e;
    e.terms = {{-2.0, cplx(2.0)},
               {0.0, cplx(1.0 / 12.0)},
               {2.0, cplx(-7.0 / 960.0)},
               {4.0, cplx(31.0 / 96768.0)}};
    // Next Laurent coefficient is ~ -1.3e-5; grid-certified with padding.
    e.remainder.atoms = {{1e-4, 6.0, 0.0, 1.0}};
    e.valid_to = e.terms.size();
    return e;
}

double identity_term(int genus, double lambda, const NumericConfig& cfg,
                     double prefactor) {
    if (genus < 1) throw input_error("genus must be >= 1");
    if (!(prefactor > 0.0)) throw input_error("prefactor must be positive");
    const double s = sqrt_shift(lambda);
    const int exponent = 2 - 2 * genus;
    if (exponent == 0) return 1.0;
    CharFn cf{sphere_operator_spectrum(), sphere_operator_expansion(), cfg,
              [](double t) { return sphere_operator_theta(t); }};
    const cplx log_det_p = char_fn_eval(cf, cplx(s)).log_det;
    const double log_base =
        std::log(prefactor) - lambda - 0.25 + log_det_p.real();
    return std::exp(double(exponent) * log_base);
}

double conj_class_factor(const ConjClassTerm& term, double lambda,
                         double tol_abs, int n_max) {
    if (term.power < 1) throw input_error("class power must be >= 1");
    if (!(term.primitive_length > 0.0))
        throw input_error("primitive length must be positive");
    const double s = sqrt_shift(lambda);
    const double l = term.length();
    const double mu = term.multiplicity();
    int N = n_max;
    if (N < 0) {
        // Geometric tail e^{-(s+N+1) l} / (mu (1 - e^{-l})) < tol_abs.
        N = 0;
        while (std::exp(-(s + N + 1) * l) / (mu * (1.0 - std::exp(-l))) >=
                   tol_abs &&
               N < 100000)
            ++N;
    }
    double acc = 0.0;
    for (int n = N; n >= 0; --n) acc += std::exp(-(s + n) * l);
    return std::exp(-acc / mu);
}

ProductResult geodesic_product(const LengthSpectrum& spectrum, double lambda,
                               double tol_abs) {
    validate(spectrum);
    const double s = sqrt_shift(lambda);
    ProductResult out;
    if (spectrum.primitives.empty()) return out;  // empty product = 1

    std::vector<double> logs(spectrum.primitives.size());
    std::vector<double> tails(spectrum.primitives.size());
    parallel_for(spectrum.primitives.size(), [&](std::size_t i) {
        const auto& p = spectrum.primitives[i];
        const double l = p.length;
        // sum_N log(1 - e^{-(s+N) l}) with geometric truncation.
        CompensatedSum acc;
        int N = 0;
        double x = std::exp(-s * l);
        const double r = std::exp(-l);
        while (x >= tol_abs && N < 200000) {
            acc.add(std::log1p(-x));
            x *= r;
            ++N;
        }
        // |log(1-x)| <= 2x for x <= 1/2 over the dropped tail.
        tails[i] = double(p.count) * 2.0 * x / (1.0 - r);
        logs[i] = double(p.count) * acc.value();
    });
    CompensatedSum total;
    double tail = 0.0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        total.add(logs[i]);
        tail += tails[i];
    }
    out.log_value = total.value();
    out.value = std::exp(out.log_value);
    out.tail_bound = tail;
    return out;
}

ProductResult geodesic_product_via_classes(const LengthSpectrum& spectrum,
                                           double lambda, double tol_abs) {
    validate(spectrum);
    const double s = sqrt_shift(lambda);
    ProductResult out;
    if (spectrum.primitives.empty()) return out;

    std::vector<double> logs(spectrum.primitives.size());
    std::vector<double> tails(spectrum.primitives.size());
    parallel_for(spectrum.primitives.size(), [&](std::size_t i) {
        const auto& p = spectrum.primitives[i];
        CompensatedSum acc;
        double tail = 0.0;
        int m = 1;
        for (; m <= 200000; ++m) {
            const ConjClassTerm term{p.length, m};
            const double l = term.length();
            // -sum_N e^{-(s+N) l} / m, summed exactly as the factor log.
            const double lead = std::exp(-s * l) / (m * (1.0 - std::exp(-l)));
            if (lead < tol_abs) {
                // Remaining powers: sum_{m' > m} e^{-s m' l0} bound.
                tail = lead / (1.0 - std::exp(-s * p.length));
                break;
            }
            acc.add(std::log(
                conj_class_factor(term, lambda, tol_abs * 1e-2)));
        }
        logs[i] = double(p.count) * acc.value();
        tails[i] = double(p.count) * tail;
    });
    CompensatedSum total;
    double tail = 0.0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        total.add(logs[i]);
        tail += tails[i];
    }
    out.log_value = total.value();
    out.value = std::exp(out.log_value);
    out.tail_bound = tail;
    return out;
}

SurfaceDet surface_det(const LengthSpectrum& spectrum, double lambda,
                       const NumericConfig& cfg, double identity_prefactor) {
    validate(spectrum);
    SurfaceDet out;
    out.identity = identity_term(spectrum.genus, lambda, cfg,
                                 identity_prefactor);
    ProductResult pr = geodesic_product(spectrum, lambda, cfg.tol_abs);
    out.product = pr.value;
    out.tail_bound = pr.tail_bound;
    out.det = out.identity * out.product;
    return out;
}

}  // namespace specdet
