#include "specdet/mellin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "specdet/quadrature.hpp"
#include "specdet/special.hpp"

namespace specdet {

namespace detail {

namespace {

constexpr double kHeadRealCut = 0.25;

// Tail of int_0^{t} x^{sigma-1} * atom(x) dx for one bound atom; conservative.
double atom_tail(const RemainderAtom& a, double sigma, double t) {
    const double beta = sigma + a.p;
    if (a.c == 0.0) {
        if (beta <= 0.0) return std::numeric_limits<double>::infinity();
        return a.C * std::pow(t, beta) / beta;
    }
    // int_0^t x^{beta-1} e^{-c/x^q} dx <= 2 t^{beta+q} e^{-c/t^q} / (q c)
    // once c / t^q dominates |beta/q + 1|.
    const double u = a.c / std::pow(t, a.q);
    if (u < 2.0 * (std::abs(beta / a.q + 1.0) + 1.0))
        return std::numeric_limits<double>::infinity();  // caller shrinks t
    return 2.0 * a.C * std::pow(t, beta + a.q) * std::exp(-u) / (a.q * a.c);
}

double truncation_tail(const ThetaExpansion& e, std::size_t n_used,
                       double sigma, double t) {
    double tail = 0.0;
    for (std::size_t i = n_used; i < e.terms.size(); ++i) {
        const double beta = sigma + e.terms[i].alpha;
        if (beta <= 0.0) return std::numeric_limits<double>::infinity();
        tail += std::abs(e.terms[i].c) * std::pow(t, beta) / beta;
    }
    for (const auto& a : e.remainder.atoms) tail += atom_tail(a, sigma, t);
    return tail;
}

}  // namespace

std::size_t pick_term_count(const ThetaExpansion& e, double sigma) {
    for (std::size_t n = 0; n <= e.terms.size(); ++n)
        if (e.alpha_after(n) > -sigma + 2.0) return n;
    throw nonconvergence_error(
        "expansion window insufficient for Re s = " + std::to_string(sigma) +
        " (first neglected exponent " +
        std::to_string(e.alpha_after(e.terms.size())) + ")");
}

double lower_t_min(const ThetaExpansion& e, std::size_t n_used, double sigma,
                   double budget) {
    double t = std::min(0.5, e.remainder.valid_up_to);
    for (int iter = 0; iter < 600; ++iter) {
        if (truncation_tail(e, n_used, sigma, t) < budget) return t;
        t *= 0.5;
        if (t < 1e-280) break;
    }
    throw nonconvergence_error(
        "could not certify the small-t truncation of the Mellin integral");
}

double upper_cutoff(double sigma, double rate, double coef, double budget,
                    double cap) {
    if (!(rate > 0.0))
        throw input_error(
            "heat trace must eventually decay; spectrum needs entries with "
            "positive real part");
    double T = 2.0;
    while (T < cap) {
        if (rate * T >= 2.0 * std::max(1.0, sigma - 1.0)) {
            const double tail =
                2.0 * coef * std::pow(T, sigma - 1.0) * std::exp(-rate * T) /
                rate;
            if (tail < budget) return T;
        }
        T *= 1.5;
    }
    throw nonconvergence_error(
        "upper Mellin integral did not fit below upper_cutoff_T");
}

std::pair<std::vector<SpectrumEntry>, SpectralSequence> split_head(
    const SpectralSequence& seq, double real_cut, std::size_t max_head) {
    std::vector<SpectrumEntry> head;
    std::size_t n = 0;
    seq.scan([&](const SpectrumEntry& e, std::size_t) {
        if (e.value.real() > real_cut || head.size() >= max_head)
            return false;
        head.push_back(e);
        ++n;
        return true;
    });
    if (head.size() >= max_head)
        throw nonconvergence_error(
            "too many eigenvalues below the split threshold");
    if (n == 0) return {std::move(head), seq};
    if (seq.is_finite()) {
        std::vector<SpectrumEntry> rest;
        seq.scan([&](const SpectrumEntry& e, std::size_t i) {
            if (i >= n) rest.push_back(e);
            return true;
        });
        // A fully consumed finite spectrum leaves an empty tail.
        if (rest.empty())
            return {std::move(head),
                    SpectralSequence::finite({}, seq.epsilon(), seq.k())};
        return {std::move(head), SpectralSequence::finite(
                                     std::move(rest), seq.epsilon(), seq.k())};
    }
    SpectralSequence tail = SpectralSequence::lazy(
        [seq, n](std::size_t i) { return seq.entry(i + n); }, seq.epsilon(),
        seq.k());
    return {std::move(head), std::move(tail)};
}

HeatSource source_for(const SpectralSequence& seq, const ThetaExpansion& e,
                      const NumericConfig& cfg) {
    HeatSource hs;
    hs.expansion = e;
    hs.theta = [seq, cfg](double t) { return theta_eval(seq, t, cfg); };
    // |Theta(t)| <= (sum mult e^{-Re a}) e^{-Re a_0 (t-1)} for t >= 1.
    const double a0 = seq.entry(0).value.real();
    double abs1 = 0.0;
    seq.scan([&](const SpectrumEntry& en, std::size_t) {
        const double w = double(en.mult) * std::exp(-en.value.real());
        abs1 += w;
        return w > 1e-18 * (1.0 + abs1);
    });
    hs.decay_rate = a0;
    hs.decay_coef = abs1 * std::exp(a0) + 1e-300;
    return hs;
}

cplx hs_zeta(const HeatSource& hs, cplx s, const NumericConfig& cfg) {
    const double sigma = s.real();
    pick_term_count(hs.expansion, sigma);  // precondition on the window
    // All certified terms are subtracted: a larger t_min keeps the
    // theta-minus-terms cancellation away from rounding noise.
    const std::size_t n_used = hs.expansion.terms.size();

    cplx poles = 0.0;
    for (std::size_t i = 0; i < n_used; ++i)
        poles += pole_term(s, hs.expansion.terms[i].alpha,
                           hs.expansion.terms[i].c, cfg.pole_margin);

    const double budget = 0.05 * cfg.tol_abs;
    const double t_min = lower_t_min(hs.expansion, n_used, sigma, budget);
    const auto& exp_ref = hs.expansion;
    // u = log t
    const auto low = [&](double u) {
        const double t = std::exp(u);
        return std::exp(s * u) *
               (hs.theta(t) - exp_ref.eval_terms(t, n_used));
    };
    QuadResult i1 = integrate(low, std::log(t_min), 0.0, cfg);

    const double T = upper_cutoff(sigma, hs.decay_rate, hs.decay_coef, budget,
                                  cfg.upper_cutoff_T);
    const auto up = [&](double u) {
        return std::exp(s * u) * hs.theta(std::exp(u));
    };
    QuadResult i2 = integrate(up, 0.0, std::log(T), cfg);

    return poles + recip_gamma(s) * (i1.value + i2.value);
}

cplx hs_zeta_deriv0(const HeatSource& hs, const NumericConfig& cfg) {
    pick_term_count(hs.expansion, 0.0);  // precondition on the window
    const std::size_t n_used = hs.expansion.terms.size();

    cplx acc = 0.0;
    for (std::size_t i = 0; i < n_used; ++i)
        acc += pole_term_deriv0(hs.expansion.terms[i].alpha,
                                hs.expansion.terms[i].c);

    const double budget = 0.05 * cfg.tol_abs;
    const double t_min = lower_t_min(hs.expansion, n_used, 0.0, budget);
    const auto low = [&](double u) {
        const double t = std::exp(u);
        return hs.theta(t) - hs.expansion.eval_terms(t, n_used);
    };
    acc += integrate(low, std::log(t_min), 0.0, cfg).value;

    const double T = upper_cutoff(0.0, hs.decay_rate, hs.decay_coef, budget,
                                  cfg.upper_cutoff_T);
    const auto up = [&](double u) { return hs.theta(std::exp(u)); };
    acc += integrate(up, 0.0, std::log(T), cfg).value;
    return acc;
}

cplx hs_zeta_value0(const ThetaExpansion& e) {
    cplx v = 0.0;
    for (const auto& t : e.terms)
        if (std::abs(t.alpha) < 1e-12) v += t.c;
    return v;
}

}  // namespace detail

// Public evaluator ------------------------------------------------------------

namespace {

// Head entries are summed as a finite Dirichlet part; the remaining tail has
// Re a > 0.25 and runs through the Mellin machinery.
struct SplitEvaluator {
    std::vector<SpectrumEntry> head;
    detail::HeatSource tail;
};

SplitEvaluator prepare(const ZetaEvaluator& ev, double needed_sigma) {
    auto [head, tail_seq] = detail::split_head(ev.seq, 0.25);
    ThetaExpansion tail_exp = ev.expansion;
    if (!head.empty()) {
        const int w =
            std::max(8, int(std::ceil(-needed_sigma)) + 4);
        auto head_seq = SpectralSequence::finite(
            std::vector<SpectrumEntry>(head), ev.seq.epsilon(), ev.seq.k());
        tail_exp = expansion_subtract(
            tail_exp, finite_spectrum_expansion(head_seq, w));
    }
    SplitEvaluator se;
    se.head = std::move(head);
    if (tail_seq.is_finite() && *tail_seq.count() == 0) {
        se.tail.theta = [](double) { return cplx(0.0); };
        se.tail.expansion = std::move(tail_exp);
        se.tail.decay_rate = 1.0;
        se.tail.decay_coef = 1e-300;
    } else {
        se.tail = detail::source_for(tail_seq, tail_exp, ev.config);
    }
    return se;
}

cplx head_dirichlet(const std::vector<SpectrumEntry>& head, cplx s) {
    cplx acc = 0.0;
    for (const auto& e : head)
        acc += double(e.mult) * std::pow(e.value, -s);
    return acc;
}

cplx head_log_sum(const std::vector<SpectrumEntry>& head) {
    cplx acc = 0.0;
    for (const auto& e : head) acc += double(e.mult) * std::log(e.value);
    return acc;
}

}  // namespace

ZetaEvaluator make_zeta_evaluator(SpectralSequence seq,
                                  ThetaExpansion expansion,
                                  NumericConfig config) {
    require_kernel_free(seq, config.zero_threshold);
    if (expansion.terms.empty() && expansion.remainder.atoms.empty())
        throw input_error("zeta evaluator needs a theta expansion");
    return ZetaEvaluator{std::move(seq), std::move(expansion), config};
}

cplx zeta_eval(const ZetaEvaluator& ev, cplx s) {
    SplitEvaluator se = prepare(ev, s.real());
    return head_dirichlet(se.head, s) +
           detail::hs_zeta(se.tail, s, ev.config);
}

cplx zeta_deriv_at_zero(const ZetaEvaluator& ev) {
    SplitEvaluator se = prepare(ev, 0.0);
    // d/ds of sum mult a^{-s} at 0 is -sum mult log a.
    return -head_log_sum(se.head) +
           detail::hs_zeta_deriv0(se.tail, ev.config);
}

cplx zeta_value_at_zero(const ZetaEvaluator& ev) {
    SplitEvaluator se = prepare(ev, 0.0);
    cplx head_count = 0.0;
    for (const auto& e : se.head) head_count += double(e.mult);
    return head_count + detail::hs_zeta_value0(se.tail.expansion);
}

cplx residue_at(const ZetaEvaluator& ev, double alpha_nu) {
    for (const auto& t : ev.expansion.terms) {
        if (std::abs(t.alpha - alpha_nu) < 1e-9) {
            if (is_nonneg_int(alpha_nu))
                throw input_error(
                    "no pole: alpha_nu is a nonnegative integer");
            return t.c * recip_gamma(cplx(-alpha_nu));
        }
    }
    throw input_error("alpha_nu not present in the expansion");
}

cplx contour_residue(const ZetaEvaluator& ev, cplx s0, double radius,
                     int points) {
    cplx acc = 0.0;
    for (int j = 0; j < points; ++j) {
        const double th = 2.0 * std::numbers::pi * double(j) / points;
        const cplx dir(std::cos(th), std::sin(th));
        acc += dir * zeta_eval(ev, s0 + radius * dir);
    }
    return acc * (radius / double(points));
}

cplx direct_dirichlet(const SpectralSequence& seq, cplx s,
                      const NumericConfig& cfg) {
    cplx acc = 0.0;
    int quiet = 0;
    std::size_t budget = 50'000'000;
    seq.scan([&](const SpectrumEntry& e, std::size_t) {
        const cplx term = double(e.mult) * std::pow(e.value, -s);
        acc += term;
        if (std::abs(term) < cfg.tol_rel * std::abs(acc) + cfg.tol_abs) {
            if (++quiet >= 4) return false;
        } else {
            quiet = 0;
        }
        return --budget != 0;
    });
    if (budget == 0)
        throw nonconvergence_error("Dirichlet sum truncation budget exceeded");
    return acc;
}

}  // namespace specdet
