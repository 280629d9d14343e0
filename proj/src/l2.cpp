#include "specdet/l2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "specdet/quadrature.hpp"
#include "specdet/special.hpp"

namespace specdet {

namespace {

constexpr double kPi = std::numbers::pi;

bool on_cut(cplx lambda) {
    return lambda.imag() == 0.0 && lambda.real() <= 0.0;
}

// Pole term along the ray t = e^{i phi} tau: the split point moves to
// e^{i phi}, so int_0^{e^{i phi}} t^{s+alpha-1} dt = e^{i phi (s+alpha)} /
// (s+alpha).
cplx pole_term_ray(cplx s, double alpha, cplx c, double phi,
                   double pole_margin) {
    const cplx ray = std::exp(cplx(0.0, phi) * (s + alpha));
    if (is_nonneg_int(alpha)) {
        const int m = int(std::round(alpha));
        cplx prod = 1.0;
        for (int i = 0; i < m; ++i) prod *= s + double(i);
        return c * ray * prod * recip_gamma(s + double(m + 1));
    }
    if (std::abs(s + alpha) < pole_margin)
        throw pole_error("zeta evaluation within pole_margin of a pole");
    return c * ray * recip_gamma(s) / (s + alpha);
}

cplx pole_term_ray_deriv0(double alpha, cplx c, double phi) {
    if (alpha == 0.0) return c * (kEulerGamma + cplx(0.0, phi));
    return c * std::exp(cplx(0.0, phi * alpha)) / alpha;
}

// Remainder atoms transported to the ray: |e^{-c / (e^{i phi} tau)^q}| =
// e^{-c cos(q phi) / tau^q}.
RemainderBound bound_on_ray(const RemainderBound& b, double phi) {
    RemainderBound out = b;
    for (auto& a : out.atoms)
        if (a.c > 0.0) a.c *= std::max(std::cos(a.q * std::abs(phi)), 0.05);
    return out;
}

double atom_tail(const RemainderAtom& a, double sigma, double t) {
    const double beta = sigma + a.p;
    if (a.c == 0.0) {
        if (beta <= 0.0) return std::numeric_limits<double>::infinity();
        return a.C * std::pow(t, beta) / beta;
    }
    const double u = a.c / std::pow(t, a.q);
    if (u < 2.0 * (std::abs(beta / a.q + 1.0) + 1.0))
        return std::numeric_limits<double>::infinity();
    return 2.0 * a.C * std::pow(t, beta + a.q) * std::exp(-u) / (a.q * a.c);
}

double ray_t_min(const RemainderBound& bound, double sigma, double budget) {
    double t = std::min(0.5, bound.valid_up_to);
    for (int iter = 0; iter < 600; ++iter) {
        double tail = 0.0;
        for (const auto& a : bound.atoms) tail += atom_tail(a, sigma, t);
        if (tail < budget) return t;
        t *= 0.5;
        if (t < 1e-280) break;
    }
    throw nonconvergence_error("L2 Mellin lower truncation failed");
}

struct L2Parts {
    cplx value;  // zeta or its s-derivative at 0, of the rescaled model
    cplx zeta0;
    double log_c;
};

// Shared evaluation core: rescale by c = max(|lambda|, 1), fold e^{-mu t}
// into the expansion, rotate the ray when mu points toward the cut, then run
// the standard split.  mode 0: zeta(s); mode 1: d/ds at 0.
L2Parts l2_mellin(const GammaTraceModel& model, cplx lambda, cplx s, int mode,
                  const NumericConfig& cfg) {
    const double h = model.kernel_gamma_dim;
    ThetaExpansion exp0 = model.small_t_expansion;
    if (h != 0.0)
        exp0 = expansion_subtract(
            exp0, ThetaExpansion{{{0.0, cplx(h)}}, {}, 1});

    const double sigma = (mode == 0) ? s.real() : 0.0;
    L2Parts out;
    out.zeta0 = 0.0;
    out.log_c = 0.0;

    const std::function<cplx(cplx)>& tr = model.trace;
    const double budget = 0.05 * cfg.tol_abs;

    if (lambda == cplx(0.0)) {
        if (!(sigma < model.gns_exact / 2.0 - 1e-9))
            throw input_error(
                "s outside the zeta^2 convergence strip at lambda = 0 "
                "(needs Re s < GNS/2)");
        for (std::size_t n = 0; n <= exp0.terms.size(); ++n) {
            if (exp0.alpha_after(n) > -sigma + 2.0) break;
            if (n == exp0.terms.size())
                throw nonconvergence_error("model expansion window too small");
        }
        const std::size_t n_used = exp0.terms.size();
        out.zeta0 = detail::hs_zeta_value0(exp0);

        cplx poles = 0.0;
        for (std::size_t i = 0; i < n_used; ++i)
            poles += (mode == 0)
                         ? pole_term(s, exp0.terms[i].alpha, exp0.terms[i].c,
                                     cfg.pole_margin)
                         : pole_term_deriv0(exp0.terms[i].alpha,
                                            exp0.terms[i].c);

        const double t_min = ray_t_min(exp0.remainder, sigma, budget);
        const auto low = [&](double u) {
            const double t = std::exp(u);
            const cplx r = tr(cplx(t)) - h - exp0.eval_terms(t, n_used);
            return (mode == 0) ? std::exp(s * u) * r : r;
        };
        cplx i1 = integrate(low, std::log(t_min), 0.0, cfg).value;

        // Polynomial tail: |trace - h| <= poly_coef t^{-gns/2}.
        const double p = model.gns_exact / 2.0;
        double T = 2.0;
        while (model.poly_coef * std::pow(T, sigma - p) / (p - sigma) >
               budget) {
            T *= 2.0;
            if (T > 1e30)
                throw nonconvergence_error("L2 upper integral truncation");
        }
        const auto up = [&](double u) {
            const double t = std::exp(u);
            const cplx r = tr(cplx(t)) - h;
            return (mode == 0) ? std::exp(s * u) * r : r;
        };
        cplx i2 = integrate(up, 0.0, std::log(T), cfg).value;

        out.value = (mode == 0) ? poles + recip_gamma(s) * (i1 + i2)
                                : poles + i1 + i2;
        return out;
    }

    if (on_cut(lambda))
        throw input_error("lambda must lie off the cut (-inf, 0]");

    const double c = std::max(std::abs(lambda), 1.0);
    const cplx mu = lambda / c;
    out.log_c = std::log(c);

    ThetaExpansion exp_c = expansion_scale_time(exp0, 1.0 / c);
    const double window = std::max(6.5, -sigma + 3.0);
    ThetaExpansion folded = expansion_fold_exp(exp_c, mu, window);
    out.zeta0 = detail::hs_zeta_value0(folded);

    const double arg_mu = std::arg(mu);
    const double phi = (mu.real() > 0.5) ? 0.0 : -arg_mu / 2.0;
    const double rate = std::abs(mu) * std::cos(arg_mu + phi);
    const cplx ray = std::exp(cplx(0.0, phi));  // unit ray direction

    for (std::size_t n = 0; n <= folded.terms.size(); ++n) {
        if (folded.alpha_after(n) > -sigma + 2.0) break;
        if (n == folded.terms.size())
            throw nonconvergence_error("folded expansion window too small");
    }
    const std::size_t n_used = folded.terms.size();

    cplx poles = 0.0;
    for (std::size_t i = 0; i < n_used; ++i)
        poles += (mode == 0)
                     ? pole_term_ray(s, folded.terms[i].alpha,
                                     folded.terms[i].c, phi, cfg.pole_margin)
                     : pole_term_ray_deriv0(folded.terms[i].alpha,
                                            folded.terms[i].c, phi);

    const RemainderBound rb = bound_on_ray(folded.remainder, phi);
    const double t_min = ray_t_min(rb, sigma, budget);
    const auto theta_ray = [&, c, mu, h](double tau) {
        const cplx t = ray * tau;
        return (tr(t / c) - h) * std::exp(-mu * t);
    };
    const auto low = [&](double u) {
        const double tau = std::exp(u);
        cplx r = theta_ray(tau);
        for (std::size_t i = 0; i < n_used; ++i)
            r -= folded.terms[i].c * std::pow(tau, folded.terms[i].alpha) *
                 std::exp(cplx(0.0, phi * folded.terms[i].alpha));
        if (mode == 0) r *= std::exp(s * u) * std::exp(cplx(0.0, phi) * s);
        return r;
    };
    cplx i1 = integrate(low, std::log(t_min), 0.0, cfg).value;

    // Upper truncation: polynomial growth bound times e^{-rate tau}.
    const double p = model.gns_exact / 2.0;
    const double pad =
        std::pow(1.0 / std::max(std::cos(phi), 0.05), model.dimension + 1);
    const double coef =
        model.poly_coef * pad * std::pow(c, p) + std::abs(h) + 1.0;
    double T = 2.0;
    while (true) {
        const double tail = 2.0 * coef *
                            std::pow(T, std::max(sigma - 1.0 - p, -1.0)) *
                            std::exp(-rate * T) / rate;
        if (rate * T >= 2.0 * std::max(1.0, sigma) && tail < budget) break;
        T *= 1.5;
        if (T > 1e12)
            throw nonconvergence_error("L2 upper integral truncation");
    }
    const auto up = [&](double u) {
        const double tau = std::exp(u);
        cplx r = theta_ray(tau);
        if (mode == 0) r *= std::exp(s * u) * std::exp(cplx(0.0, phi) * s);
        return r;
    };
    cplx i2 = integrate(up, 0.0, std::log(T), cfg).value;

    out.value = (mode == 0) ? poles + recip_gamma(s) * (i1 + i2)
                            : poles + i1 + i2;
    return out;
}

}  // namespace

// Models ------------------------------------------------------------------------

GammaTraceModel line_model(double L) {
    if (!(L > 0.0)) throw input_error("line model needs L > 0");
    GammaTraceModel m;
    m.name = "line";
    m.dimension = 1;
    m.volume = L;
    const double c0 = L / std::sqrt(4.0 * kPi);
    m.trace = [c0](cplx t) { return c0 * std::pow(t, cplx(-0.5)); };
    m.small_t_expansion.terms = {{-0.5, cplx(c0)}};
    m.small_t_expansion.valid_to = 1;
    m.kernel_gamma_dim = 0.0;
    m.gns_exact = 1.0;
    m.poly_coef = c0;
    return m;
}

GammaTraceModel flat_model(const std::vector<double>& lengths) {
    if (lengths.empty()) throw input_error("flat model needs lengths");
    double vol = 1.0;
    for (double L : lengths) {
        if (!(L > 0.0)) throw input_error("flat model lengths must be > 0");
        vol *= L;
    }
    const int n = int(lengths.size());
    GammaTraceModel m;
    m.name = "flat";
    m.dimension = n;
    m.volume = vol;
    const double c0 = vol / std::pow(4.0 * kPi, n / 2.0);
    m.trace = [c0, n](cplx t) { return c0 * std::pow(t, cplx(-n / 2.0)); };
    m.small_t_expansion.terms = {{-n / 2.0, cplx(c0)}};
    m.small_t_expansion.valid_to = 1;
    m.kernel_gamma_dim = 0.0;
    m.gns_exact = double(n);
    m.poly_coef = c0;
    return m;
}

GammaTraceModel equivariant_line_model(double L, int n) {
    if (n == 0)
        throw input_error("class n = 0 is the plain line model (use l2_det)");
    GammaTraceModel m = line_model(L);
    m.name = "line-class-" + std::to_string(n);
    const double a2 = (double(n) * L) * (double(n) * L) / 4.0;
    const double c0 = L / std::sqrt(4.0 * kPi);
    m.trace = [c0, a2](cplx t) {
        return c0 * std::pow(t, cplx(-0.5)) * std::exp(-a2 / t);
    };
    m.small_t_expansion.terms.clear();
    m.small_t_expansion.remainder.atoms = {{c0, -0.5, a2, 1.0}};
    m.small_t_expansion.valid_to = 0;
    m.poly_coef = c0;  // e^{-a2/t} <= 1 for t >= 1
    return m;
}

double gns_estimate(const GammaTraceModel& model, double t0, double t1,
                    int samples) {
    if (!(t0 > 0.0 && t1 > t0) || samples < 2)
        throw input_error("gns_estimate needs 0 < t0 < t1 and >= 2 samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < samples; ++i) {
        const double u =
            std::log(t0) + (std::log(t1) - std::log(t0)) * i / (samples - 1);
        const double tr =
            (model.trace(cplx(std::exp(u))) - model.kernel_gamma_dim).real();
        if (!(tr > 0.0))
            throw input_error(
                "trace - h nonpositive inside the GNS window");
        const double y = std::log(tr);
        sx += u;
        sy += y;
        sxx += u * u;
        sxy += u * y;
    }
    const double slope =
        (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
    return -2.0 * slope;
}

cplx l2_zeta_eval(const GammaTraceModel& model, cplx lambda, cplx s,
                  const NumericConfig& cfg) {
    L2Parts parts = l2_mellin(model, lambda, s, 0, cfg);
    return std::exp(-s * parts.log_c) * parts.value;
}

cplx l2_det(const GammaTraceModel& model, cplx lambda,
            const NumericConfig& cfg) {
    L2Parts parts = l2_mellin(model, lambda, cplx(0.0), 1, cfg);
    // zeta'(0) = -log(c) zeta(0) + zeta'_rescaled(0).
    const cplx deriv = -parts.log_c * parts.zeta0 + parts.value;
    return std::exp(-deriv);
}

double equivariant_l2_trace(double L, int n, double t) {
    if (n == 0) throw input_error("class n must be nonzero");
    if (!(t > 0.0)) throw input_error("t must be positive");
    const double d = double(n) * L;
    return L / std::sqrt(4.0 * kPi * t) * std::exp(-d * d / (4.0 * t));
}

cplx equivariant_l2_det(double L, int n, cplx lambda,
                        const NumericConfig& cfg) {
    return l2_det(equivariant_line_model(L, n), lambda, cfg);
}

// Equivariant spectra -----------------------------------------------------------

EquivariantEntry EquivariantSpectrum::entry(std::size_t i) const {
    if (generator) return generator(i);
    if (i >= entries.size())
        throw input_error("index past the end of the equivariant spectrum");
    return entries[i];
}

EquivariantSpectrum circle_rotation_spectrum(double circumference, int m) {
    if (!(circumference > 0.0)) throw input_error("circumference must be > 0");
    if (m < 2) throw input_error("rotation order m must be >= 2");
    const double L = circumference;
    const double base = 2.0 * kPi / L;
    EquivariantSpectrum eq;
    eq.generator = [base, m](std::size_t i) {
        const double k = double(i + 1);
        return EquivariantEntry{(base * k) * (base * k),
                                cplx(2.0 * std::cos(2.0 * kPi * k / m))};
    };
    eq.weight_bound = 2.0;
    eq.expansion.terms = {{0.0, cplx(-1.0)}};
    // Poisson offsets j + 1/m: nearest distance to an integer.
    const double d = L * std::min(1.0 / m, 1.0 - 1.0 / m);
    const double cexp = d * d / 4.0;
    eq.expansion.remainder.atoms = {
        {2.4 * L / std::sqrt(4.0 * kPi) / (1.0 - std::exp(-3.0 * cexp)),
         -0.5, cexp, 1.0}};
    eq.expansion.valid_to = 1;
    return eq;
}

EquivariantSpectrum finite_equivariant_spectrum(
    std::vector<EquivariantEntry> entries, int max_power) {
    std::sort(entries.begin(), entries.end(),
              [](const EquivariantEntry& a, const EquivariantEntry& b) {
                  return a.eigenvalue < b.eigenvalue;
              });
    EquivariantSpectrum eq;
    double wb = 0.0;
    std::vector<cplx> coef(std::size_t(max_power) + 1, cplx(0.0));
    double tail_c = 0.0;
    for (const auto& e : entries) {
        if (!(e.eigenvalue > 0.0))
            throw input_error("equivariant eigenvalues must be positive");
        wb = std::max(wb, std::abs(e.weight));
        cplx pw = e.weight;
        for (int n = 0; n <= max_power; ++n) {
            coef[std::size_t(n)] += pw;
            pw *= -e.eigenvalue / double(n + 1);
        }
        double fact = 1.0;
        for (int j = 2; j <= max_power + 1; ++j) fact *= j;
        tail_c += std::abs(e.weight) *
                  std::pow(e.eigenvalue, double(max_power + 1)) / fact *
                  std::exp(e.eigenvalue);
    }
    for (int n = 0; n <= max_power; ++n)
        if (std::abs(coef[std::size_t(n)]) != 0.0)
            eq.expansion.terms.push_back({double(n), coef[std::size_t(n)]});
    if (tail_c > 0.0)
        eq.expansion.remainder.atoms.push_back(
            {tail_c, double(max_power + 1), 0.0, 1.0});
    eq.expansion.valid_to = eq.expansion.terms.size();
    eq.weight_bound = wb;
    eq.entries = std::move(entries);
    return eq;
}

namespace {

detail::HeatSource equivariant_source(const EquivariantSpectrum& eq,
                                      cplx lambda, cplx kernel_weight,
                                      const NumericConfig& cfg) {
    ThetaExpansion exp0 = eq.expansion;
    if (kernel_weight != cplx(0.0)) {
        ThetaExpansion kw;
        kw.terms = {{0.0, kernel_weight}};
        kw.valid_to = 1;
        exp0 = expansion_add(exp0, kw);
    }
    const double window = 6.5;
    ThetaExpansion folded =
        (lambda == cplx(0.0)) ? exp0 : expansion_fold_exp(exp0, lambda, window);

    detail::HeatSource src;
    src.expansion = folded;
    const double wb = eq.weight_bound;
    src.theta = [eq, lambda, kernel_weight, wb, cfg](double t) -> cplx {
        cplx acc = kernel_weight;
        double scale = std::max(std::abs(kernel_weight), 1.0);
        int quiet = 0;
        for (std::size_t i = 0;; ++i) {
            if (eq.is_finite() && i >= eq.entries.size()) break;
            const EquivariantEntry e = eq.entry(i);
            acc += e.weight * std::exp(-t * e.eigenvalue);
            scale = std::max(scale, std::abs(acc));
            if (wb * std::exp(-t * e.eigenvalue) <
                1e-4 * (cfg.tol_rel * scale + cfg.tol_abs)) {
                if (++quiet >= 4) break;
            } else {
                quiet = 0;
            }
            if (i > 20'000'000)
                throw nonconvergence_error(
                    "equivariant theta truncation budget exceeded");
        }
        return acc * std::exp(-lambda * t);
    };
    const double lam0 = eq.entry(0).eigenvalue;
    double abs1 = std::abs(kernel_weight);
    for (std::size_t i = 0;; ++i) {
        if (eq.is_finite() && i >= eq.entries.size()) break;
        const EquivariantEntry e = eq.entry(i);
        const double w = std::abs(e.weight) * std::exp(-e.eigenvalue);
        abs1 += w;
        if (w < 1e-18 * (1.0 + abs1)) break;
    }
    const double rate0 = (kernel_weight == cplx(0.0)) ? lam0 : 0.0;
    src.decay_rate = rate0 + lambda.real();
    src.decay_coef = abs1 * std::exp(rate0) + 1e-300;
    if (!(src.decay_rate > 0.0))
        throw input_error("shifted equivariant trace does not decay");
    return src;
}

}  // namespace

namespace {

// Slowly decaying shifted traces need the upper integral to reach
// ~60/rate; the log-substituted quadrature handles the length.
NumericConfig stretch_cutoff(const NumericConfig& cfg, double rate) {
    NumericConfig out = cfg;
    out.upper_cutoff_T =
        std::max(cfg.upper_cutoff_T, 80.0 / std::max(rate, 1e-9));
    return out;
}

}  // namespace

cplx equivariant_zeta(const EquivariantSpectrum& eq, cplx s,
                      const NumericConfig& cfg) {
    return detail::hs_zeta(equivariant_source(eq, 0.0, 0.0, cfg), s, cfg);
}

cplx equivariant_det(const EquivariantSpectrum& eq, const NumericConfig& cfg) {
    return std::exp(
        -detail::hs_zeta_deriv0(equivariant_source(eq, 0.0, 0.0, cfg), cfg));
}

cplx equivariant_det_shifted(const EquivariantSpectrum& eq, cplx lambda,
                             cplx kernel_weight, const NumericConfig& cfg) {
    if (std::abs(lambda) > 40.0)
        throw input_error(
            "equivariant shift supported for |lambda| <= 40; rescale first");
    detail::HeatSource src =
        equivariant_source(eq, lambda, kernel_weight, cfg);
    return std::exp(
        -detail::hs_zeta_deriv0(src, stretch_cutoff(cfg, src.decay_rate)));
}

}  // namespace specdet
