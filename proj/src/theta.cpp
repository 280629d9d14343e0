#include "specdet/theta.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace specdet {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void sort_and_merge_terms(std::vector<ExpansionTerm>& terms) {
    std::sort(terms.begin(), terms.end(),
              [](const ExpansionTerm& a, const ExpansionTerm& b) {
                  return a.alpha < b.alpha;
              });
    std::vector<ExpansionTerm> merged;
    for (const auto& t : terms) {
        if (!merged.empty() && std::abs(t.alpha - merged.back().alpha) < 1e-12)
            merged.back().c += t.c;
        else
            merged.push_back(t);
    }
    std::erase_if(merged, [](const ExpansionTerm& t) {
        return std::abs(t.c) == 0.0;
    });
    terms = std::move(merged);
}

// Keeps the atom list short: power atoms collapse onto the smallest power.
void coalesce_atoms(std::vector<RemainderAtom>& atoms) {
    std::vector<RemainderAtom> out;
    for (const auto& a : atoms) {
        if (a.C == 0.0) continue;
        bool merged = false;
        for (auto& o : out) {
            if (o.c == a.c && o.q == a.q &&
                (o.p == a.p || (o.c == 0.0 && out.size() >= 6))) {
                if (o.c == 0.0)
                    o.p = std::min(o.p, a.p);  // t^p <= t^min(p) on (0,1]
                o.C += a.C;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(a);
    }
    atoms = std::move(out);
}

}  // namespace

double RemainderBound::eval(double t) const {
    double b = 0.0;
    for (const auto& a : atoms) {
        double v = a.C * std::pow(t, a.p);
        if (a.c > 0.0) v *= std::exp(-a.c / std::pow(t, a.q));
        b += v;
    }
    return b;
}

double RemainderBound::alpha_next() const {
    double p = kInf;
    for (const auto& a : atoms)
        if (a.c == 0.0 && a.C > 0.0) p = std::min(p, a.p);
    return p;
}

cplx ThetaExpansion::eval_terms(double t, std::size_t n_terms) const {
    cplx acc = 0.0;
    const std::size_t n = std::min(n_terms, terms.size());
    for (std::size_t i = 0; i < n; ++i)
        acc += terms[i].c * std::pow(t, terms[i].alpha);
    return acc;
}

double ThetaExpansion::truncation_bound(double t, std::size_t N_used) const {
    double b = remainder.eval(t);
    for (std::size_t i = N_used; i < terms.size(); ++i)
        b += std::abs(terms[i].c) * std::pow(t, terms[i].alpha);
    return b;
}

double ThetaExpansion::alpha_after(std::size_t N_used) const {
    if (N_used < terms.size()) return terms[N_used].alpha;
    return remainder.alpha_next();
}

// Evaluation ------------------------------------------------------------------

cplx theta_eval(const SpectralSequence& seq, double t,
                const NumericConfig& cfg) {
    if (!(t > 0.0)) throw input_error("theta_eval needs t > 0");
    cplx acc = 0.0;
    double acc_mag = 0.0;  // running magnitude scale for the stopping rule
    int quiet = 0;
    bool done = false;
    std::size_t budget = 2'000'000;
    seq.scan([&](const SpectrumEntry& e, std::size_t) {
        const double weight = double(e.mult) * std::exp(-t * e.value.real());
        acc += double(e.mult) * std::exp(-t * e.value);
        acc_mag = std::max(acc_mag, std::abs(acc));
        // Well below tol_rel: theta feeds subtracted integrands whose values
        // are far smaller than theta itself.
        if (weight < 1e-4 * (cfg.tol_rel * acc_mag + cfg.tol_abs)) {
            if (++quiet >= 4) {
                done = true;
                return false;
            }
        } else {
            quiet = 0;
        }
        if (--budget == 0) return false;
        return true;
    });
    if (!done && !seq.is_finite())
        throw nonconvergence_error(
            "theta truncation budget exceeded at t = " + std::to_string(t));
    return acc;
}

// Bundled expansions ----------------------------------------------------------

ThetaExpansion circle_theta_expansion(double circumference, bool reduced) {
    if (!(circumference > 0.0))
        throw input_error("circumference must be positive");
    const double L = circumference;
    ThetaExpansion e;
    e.terms.push_back({-0.5, cplx(L / std::sqrt(4.0 * kPi))});
    if (reduced) e.terms.push_back({0.0, cplx(-1.0)});
    // Poisson tail: 2 (L/sqrt(4 pi)) t^{-1/2} sum_{m>=1} e^{-L^2 m^2/(4t)}.
    const double c = L * L / 4.0;
    double geom = 1.0 / (1.0 - std::exp(-3.0 * c));  // sum over m >= 1, t <= 1
    e.remainder.atoms.push_back(
        {2.0 * L / std::sqrt(4.0 * kPi) * geom, -0.5, c, 1.0});
    e.valid_to = e.terms.size();
    return e;
}

ThetaExpansion integer_theta_expansion() {
    // 1/(e^t - 1) = 1/t - 1/2 + t/12 - t^3/720 + t^5/30240 - t^7/1209600 + ...
    ThetaExpansion e;
    e.terms = {{-1.0, cplx(1.0)},          {0.0, cplx(-0.5)},
               {1.0, cplx(1.0 / 12.0)},    {3.0, cplx(-1.0 / 720.0)},
               {5.0, cplx(1.0 / 30240.0)}, {7.0, cplx(-1.0 / 1209600.0)}};
    // Next Bernoulli term is t^9/47900160; padded constant certified on a
    // grid by the tests.
    e.remainder.atoms.push_back({1e-7, 9.0, 0.0, 1.0});
    e.valid_to = e.terms.size();
    return e;
}

ThetaExpansion torus_theta_expansion(const std::vector<double>& lengths) {
    if (lengths.empty()) throw input_error("torus needs at least one length");
    double vol = 1.0;
    double min_l = kInf;
    for (double L : lengths) {
        if (!(L > 0.0)) throw input_error("torus lengths must be positive");
        vol *= L;
        min_l = std::min(min_l, L);
    }
    const double n = double(lengths.size());
    ThetaExpansion e;
    e.terms.push_back({-n / 2.0, cplx(vol / std::pow(4.0 * kPi, n / 2.0))});
    // Dominant Poisson correction carries e^{-min_l^2/(4t)}; the prefactor
    // 3^n covers the lattice-direction count for the bundled cases (n <= 3).
    const double c = min_l * min_l / 4.0;
    e.remainder.atoms.push_back(
        {std::pow(3.0, n) * (vol / std::pow(4.0 * kPi, n / 2.0)) /
             (1.0 - std::exp(-3.0 * c)),
         -n / 2.0, c, 1.0});
    e.valid_to = e.terms.size();
    return e;
}

ThetaExpansion finite_spectrum_expansion(const SpectralSequence& seq,
                                         int max_power) {
    if (!seq.is_finite())
        throw input_error("finite_spectrum_expansion needs a finite spectrum");
    ThetaExpansion e;
    std::vector<cplx> coef(std::size_t(max_power) + 1, cplx(0.0));
    double tail_c = 0.0;
    seq.scan([&](const SpectrumEntry& en, std::size_t) {
        cplx pw = 1.0;  // (-a)^n / n!
        for (int n = 0; n <= max_power; ++n) {
            coef[std::size_t(n)] += double(en.mult) * pw;
            pw *= -en.value / double(n + 1);
        }
        double fact = 1.0;
        for (int j = 2; j <= max_power + 1; ++j) fact *= j;
        tail_c += double(en.mult) *
                  std::pow(std::abs(en.value), double(max_power + 1)) / fact *
                  std::exp(std::abs(en.value));
        return true;
    });
    for (int n = 0; n <= max_power; ++n)
        if (std::abs(coef[std::size_t(n)]) != 0.0)
            e.terms.push_back({double(n), coef[std::size_t(n)]});
    if (tail_c > 0.0)
        e.remainder.atoms.push_back({tail_c, double(max_power + 1), 0.0, 1.0});
    e.valid_to = e.terms.size();
    return e;
}

// Algebra ---------------------------------------------------------------------

ThetaExpansion expansion_scale_time(const ThetaExpansion& e, double c) {
    if (!(c > 0.0)) throw input_error("time scale must be positive");
    ThetaExpansion out;
    for (const auto& t : e.terms)
        out.terms.push_back({t.alpha, t.c * std::pow(c, t.alpha)});
    for (const auto& a : e.remainder.atoms)
        out.remainder.atoms.push_back(
            {a.C * std::pow(c, a.p), a.p, a.c / std::pow(c, a.q), a.q});
    out.remainder.valid_up_to =
        std::min(1.0, e.remainder.valid_up_to / c);
    out.valid_to = out.terms.size();
    return out;
}

ThetaExpansion expansion_fold_exp(const ThetaExpansion& e, cplx mu,
                                  double window) {
    const double amu = std::abs(mu);
    ThetaExpansion out;
    for (const auto& t : e.terms) {
        cplx pw = t.c;  // c (-mu)^n / n!
        int n = 0;
        while (t.alpha + n <= window) {
            out.terms.push_back({t.alpha + n, pw});
            pw *= -mu / double(n + 1);
            ++n;
        }
        // Tail of the exponential series beyond the window.
        double fact = 1.0;
        for (int j = 2; j <= n; ++j) fact *= j;
        const double tail =
            std::abs(t.c) * std::pow(amu, double(n)) / fact * std::exp(amu);
        if (tail > 0.0)
            out.remainder.atoms.push_back({tail, t.alpha + n, 0.0, 1.0});
    }
    for (const auto& a : e.remainder.atoms)
        out.remainder.atoms.push_back(
            {a.C * std::exp(amu * e.remainder.valid_up_to), a.p, a.c, a.q});
    out.remainder.valid_up_to = e.remainder.valid_up_to;
    sort_and_merge_terms(out.terms);
    coalesce_atoms(out.remainder.atoms);
    out.valid_to = out.terms.size();
    return out;
}

ThetaExpansion expansion_add(const ThetaExpansion& a, const ThetaExpansion& b) {
    ThetaExpansion out;
    out.terms = a.terms;
    out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
    sort_and_merge_terms(out.terms);
    out.remainder.atoms = a.remainder.atoms;
    out.remainder.atoms.insert(out.remainder.atoms.end(),
                               b.remainder.atoms.begin(),
                               b.remainder.atoms.end());
    coalesce_atoms(out.remainder.atoms);
    out.remainder.valid_up_to =
        std::min(a.remainder.valid_up_to, b.remainder.valid_up_to);
    out.valid_to = out.terms.size();
    return out;
}

ThetaExpansion expansion_subtract(const ThetaExpansion& a,
                                  const ThetaExpansion& b) {
    ThetaExpansion neg = b;
    for (auto& t : neg.terms) t.c = -t.c;
    return expansion_add(a, neg);
}

// Certification ---------------------------------------------------------------

std::vector<RemainderRow> expansion_remainder_report(
    const SpectralSequence& seq, const ThetaExpansion& expansion,
    std::size_t n_terms, const std::vector<double>& t_grid,
    const NumericConfig& cfg) {
    std::vector<RemainderRow> rows;
    rows.reserve(t_grid.size());
    for (double t : t_grid) {
        const cplx th = theta_eval(seq, t, cfg);
        const double rem = std::abs(th - expansion.eval_terms(t, n_terms));
        const double bound = expansion.truncation_bound(t, n_terms);
        // Direct summation noise sets the resolution of the comparison.
        const double floor =
            64.0 * std::numeric_limits<double>::epsilon() * std::abs(th);
        rows.push_back({t, rem, bound, rem > bound + floor});
    }
    return rows;
}

// JSON ------------------------------------------------------------------------

ThetaExpansion load_expansion_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("bad expansion JSON: ") + e.what());
    }
    ThetaExpansion e;
    for (const auto& t : j.value("terms", nlohmann::json::array()))
        e.terms.push_back({t.value("alpha", 0.0),
                           cplx(t.value("c_re", 0.0), t.value("c_im", 0.0))});
    sort_and_merge_terms(e.terms);
    for (std::size_t i = 1; i < e.terms.size(); ++i)
        if (e.terms[i].alpha <= e.terms[i - 1].alpha)
            throw input_error("expansion alphas must strictly increase");
    if (j.contains("remainder")) {
        const auto& r = j["remainder"];
        e.remainder.atoms.push_back(
            {r.value("C", 0.0), r.value("alpha_next", 0.0), 0.0, 1.0});
    }
    e.valid_to = e.terms.size();
    return e;
}

ThetaExpansion load_expansion_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot read expansion file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_expansion_json(ss.str());
}

std::string expansion_to_json(const ThetaExpansion& e) {
    nlohmann::json j;
    j["terms"] = nlohmann::json::array();
    for (const auto& t : e.terms)
        j["terms"].push_back({{"alpha", t.alpha},
                              {"c_re", t.c.real()},
                              {"c_im", t.c.imag()}});
    if (!e.remainder.atoms.empty()) {
        const auto& a = e.remainder.atoms.front();
        j["remainder"] = {{"C", a.C}, {"alpha_next", a.p}};
    }
    return j.dump(2);
}

}  // namespace specdet
