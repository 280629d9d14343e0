#include "specdet/determinants.hpp"

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

}  // namespace

cplx log_reg_det(const SpectralSequence& seq, const ThetaExpansion& expansion,
                 const NumericConfig& cfg) {
    const ZetaEvaluator ev = make_zeta_evaluator(seq, expansion, cfg);
    return -zeta_deriv_at_zero(ev);
}

cplx reg_det(const SpectralSequence& seq, const ThetaExpansion& expansion,
             const NumericConfig& cfg) {
    return std::exp(log_reg_det(seq, expansion, cfg));
}

std::pair<std::int64_t, cplx> reduced_det(
    const SpectralSequence& seq_with_kernel,
    const ThetaExpansion& expansion_of_reduced, const NumericConfig& cfg) {
    KernelSplit ks = kernel_split(seq_with_kernel, cfg.zero_threshold);
    return {ks.kernel_dimension,
            reg_det(ks.reduced, expansion_of_reduced, cfg)};
}

// Characteristic function -------------------------------------------------------

CharFnValue char_fn_eval(const CharFn& cf, cplx lambda) {
    if (on_cut(lambda))
        throw input_error("char_fn is evaluated off the cut (-inf, 0]");
    const NumericConfig& cfg = cf.config;
    const double c = std::max(std::abs(lambda), 1.0);
    const cplx mu = lambda / c;

    // Scaled spectrum a/c and its expansion Theta_{A/c}(t) = Theta_A(t/c).
    SpectralSequence seq_c = (c == 1.0) ? cf.seq : scale(cf.seq, 1.0 / c);
    ThetaExpansion exp_c = (c == 1.0)
                               ? cf.expansion
                               : expansion_scale_time(cf.expansion, 1.0 / c);

    // Entries whose shifted real part is small are handled as an explicit
    // finite factor (this also catches zero hits lambda = -a_n).
    auto [head, tail_seq] =
        detail::split_head(seq_c, 0.25 - mu.real(), 1 << 22);
    CharFnValue out;
    for (const auto& e : head) {
        if (std::abs(e.value + mu) * c <= cfg.zero_threshold) {
            out.zero_order += e.mult;
        }
    }
    if (out.zero_order > 0) {
        out.det = 0.0;
        out.log_det = -std::numeric_limits<double>::infinity();
        return out;
    }

    // zeta_{A+lambda}(0) from the folded expansion of the full scaled theta:
    // only integer powers alpha+n = 0 contribute.
    const ThetaExpansion folded_full = expansion_fold_exp(exp_c, mu, 0.5);
    cplx zeta0 = detail::hs_zeta_value0(folded_full);

    cplx log_det = 0.0;
    for (const auto& e : head)
        log_det += double(e.mult) * std::log(e.value + mu);

    // Shifted tail through the Mellin pipeline.
    const bool tail_empty = tail_seq.is_finite() && *tail_seq.count() == 0;
    ThetaExpansion tail_exp = exp_c;
    if (!head.empty()) {
        auto head_seq = SpectralSequence::finite(
            std::vector<SpectrumEntry>(head), seq_c.epsilon(), seq_c.k());
        tail_exp =
            expansion_subtract(tail_exp, finite_spectrum_expansion(head_seq, 9));
    }
    const ThetaExpansion tail_folded = expansion_fold_exp(tail_exp, mu, 6.5);
    if (!tail_empty) {
        detail::HeatSource src =
            detail::source_for(tail_seq, tail_folded, cfg);
        std::function<cplx(double)> base = src.theta;
        if (cf.theta) {
            // Closed form of the full theta, scaled and head-corrected.
            auto closed = cf.theta;
            auto head_copy = head;
            base = [closed, head_copy, c](double t) {
                cplx v = closed(t / c);
                for (const auto& e : head_copy)
                    v -= double(e.mult) * std::exp(-t * e.value);
                return v;
            };
        }
        src.theta = [base, mu](double t) {
            return std::exp(-mu * t) * base(t);
        };
        src.decay_rate += mu.real();
        src.decay_coef *= std::exp(std::abs(mu.real()));
        log_det += -detail::hs_zeta_deriv0(src, cfg);
    } else {
        zeta0 = 0.0;  // finite spectrum fully in the head
        for (const auto& e : head) zeta0 += double(e.mult);
    }

    log_det += zeta0 * std::log(c);
    out.log_det = log_det;
    out.det = std::exp(log_det);
    return out;
}

// Asymptotics -------------------------------------------------------------------

AsymptoticSeries asymptotic_series_from(const ThetaExpansion& expansion) {
    AsymptoticSeries s;
    s.source = expansion;
    for (const auto& t : expansion.terms) {
        const double neg = -t.alpha;
        if (neg >= -1e-12 && std::abs(neg - std::round(neg)) < 1e-12) {
            s.logs.push_back({int(std::round(neg)), t.c});
        } else {
            s.powers.push_back({t.alpha, t.c * gamma(cplx(t.alpha))});
        }
    }
    return s;
}

cplx asymptotic_neg_log_det(const AsymptoticSeries& series, double lambda) {
    cplx acc = 0.0;
    const double ll = std::log(lambda);
    for (const auto& p : series.powers)
        acc += p.coef * std::pow(lambda, -p.alpha);
    for (const auto& l : series.logs) {
        double sign_fact = (l.k % 2 == 0) ? 1.0 : -1.0;
        double kfact = 1.0;
        for (int j = 2; j <= l.k; ++j) kfact *= j;
        acc += l.c * (sign_fact / kfact) * (harmonic(l.k) - ll) *
               std::pow(lambda, double(l.k));
    }
    return acc;
}

cplx asymptotic_neg_log_det_imag(const AsymptoticSeries& series,
                                 double lambda, int sign) {
    if (sign != 1 && sign != -1) throw input_error("sign must be +-1");
    const cplx i_unit(0.0, double(sign));
    const double ll = std::log(lambda);
    const cplx half_i_pi(0.0, sign * kPi / 2.0);
    cplx acc = 0.0;
    for (const auto& p : series.powers)
        acc += p.coef * std::pow(i_unit, cplx(-p.alpha)) *
               std::pow(lambda, -p.alpha);
    const double c0 = cosine_integral_constant();
    for (const auto& l : series.logs) {
        if (l.k == 0 && series.zero_alpha_constant_family) {
            acc += l.c * (c0 + kEulerGamma + half_i_pi + ll);
            continue;
        }
        // (-+ i)^k / k! (H_k - log lambda -+ i pi/2) lambda^k
        cplx mik = std::pow(cplx(0.0, -double(sign)), double(l.k));
        double kfact = 1.0;
        for (int j = 2; j <= l.k; ++j) kfact *= j;
        acc += l.c * mik / kfact * (harmonic(l.k) - ll - half_i_pi) *
               std::pow(lambda, double(l.k));
    }
    return acc;
}

double asymptotic_error_estimate(const AsymptoticSeries& series,
                                 double lambda, double theta_abs_at_1,
                                 const NumericConfig& cfg) {
    // Mellin image of the remainder bound over (0, 1].
    const auto& rem = series.source.remainder;
    const auto f = [&](double u) {
        const double t = std::exp(u);
        return cplx(rem.eval(t) * std::exp(-lambda * t));
    };
    const double lo = std::log(1e-8 / lambda);
    double est =
        std::abs(integrate(f, lo, 0.0, 1e-6, 1e-300, cfg.quad_panels_max)
                     .value);
    // g_alpha(lambda) = int_1^inf t^{alpha-1} e^{-lambda t} dt pieces from
    // resumming each retained term to its Gamma(alpha) lambda^{-alpha} form.
    for (const auto& t : series.source.terms) {
        const auto g = [&](double x) {
            return cplx(std::pow(x, t.alpha - 1.0) * std::exp(-lambda * x));
        };
        const double hi = 1.0 + (60.0 + std::abs(t.alpha) * 8.0) / lambda;
        est += std::abs(t.c) *
               std::abs(integrate(g, 1.0, hi, 1e-6, 1e-300,
                                  cfg.quad_panels_max)
                            .value);
    }
    // Dropped upper Mellin integral of the true theta series.
    if (theta_abs_at_1 > 0.0)
        est += theta_abs_at_1 * std::exp(-lambda) / lambda;
    return est;
}

ThetaExpansion truncate_expansion(const ThetaExpansion& e, std::size_t n) {
    ThetaExpansion out;
    out.terms.assign(e.terms.begin(),
                     e.terms.begin() + std::min(n, e.terms.size()));
    out.remainder = e.remainder;
    for (std::size_t i = n; i < e.terms.size(); ++i)
        out.remainder.atoms.push_back(
            {std::abs(e.terms[i].c), e.terms[i].alpha, 0.0, 1.0});
    out.valid_to = out.terms.size();
    return out;
}

double cosine_integral_constant() {
    const double M = 40.0;
    const auto f = [](double t) {
        if (t < 1e-8) return cplx(0.5 * t);
        return cplx((1.0 - std::cos(t)) / t);
    };
    const double head =
        integrate(f, 0.0, M, 1e-14, 1e-16, 1 << 16).value.real();
    // Ci(M) by its asymptotic series: sin(M) sum (-1)^j (2j)!/M^{2j+1}
    //                               + cos(M) sum (-1)^j (2j+1)!/M^{2j+2}.
    double ci = 0.0, fact = 1.0;
    double sgn = 1.0;
    for (int j = 0; j <= 4; ++j) {
        // (2j)! / M^{2j+1}
        ci += sgn * fact / std::pow(M, 2 * j + 1) * std::sin(M);
        fact *= (2 * j + 1);
        ci -= sgn * fact / std::pow(M, 2 * j + 2) * std::cos(M);
        fact *= (2 * j + 2);
        sgn = -sgn;
    }
    return head - std::log(M) + ci;
}

// Fredholm ----------------------------------------------------------------------

cplx fredholm_det(const std::vector<std::pair<cplx, std::int64_t>>& eigs,
                  FredholmMethod method, const NumericConfig& cfg) {
    double abs_sum = 0.0, abs_max = 0.0;
    for (const auto& [v, m] : eigs) {
        abs_sum += double(m) * std::abs(v);
        abs_max = std::max(abs_max, std::abs(v));
    }
    if (method == FredholmMethod::product) {
        cplx log_acc = 0.0;
        for (const auto& [v, m] : eigs)
            log_acc += double(m) * std::log(1.0 + v);
        return std::exp(log_acc);
    }
    if (!(abs_max < 1.0))
        throw input_error(
            "exp_series needs operator norm < 1 (max |eig| = " +
            std::to_string(abs_max) + ")");
    // log det = sum_{n>=1} (-1)^{n+1}/n tr T^n, |tr T^n| <= abs_sum
    // abs_max^{n-1}.
    cplx log_acc = 0.0;
    std::vector<cplx> pw(eigs.size());
    for (std::size_t i = 0; i < eigs.size(); ++i) pw[i] = eigs[i].first;
    for (int n = 1; n < 100000; ++n) {
        cplx tr = 0.0;
        for (std::size_t i = 0; i < eigs.size(); ++i) {
            tr += double(eigs[i].second) * pw[i];
            pw[i] *= eigs[i].first;
        }
        const double sgn = (n % 2 == 1) ? 1.0 : -1.0;
        log_acc += sgn / double(n) * tr;
        if (abs_sum * std::pow(abs_max, n) / (n + 1) <
            cfg.tol_abs + cfg.tol_rel * std::abs(log_acc))
            return std::exp(log_acc);
    }
    throw nonconvergence_error("Fredholm exponential series stalled");
}

namespace {

// Polynomial (Neville) extrapolation to x = 0; y[i] holds P_{i..i+level-1}
// entering each level.
cplx extrapolate_to_zero(std::vector<double> x, std::vector<cplx> y) {
    const std::size_t n = x.size();
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t i = 0; i + level < n; ++i)
            y[i] = (x[i + level] * y[i] - x[i] * y[i + 1]) /
                   (x[i + level] - x[i]);
    return y[0];
}

}  // namespace

FredholmRatioReport fredholm_ratio_check(const SpectralSequence& seq,
                                         const ThetaExpansion& expansion,
                                         const NumericConfig& cfg) {
    require_kernel_free(seq, cfg.zero_threshold);
    FredholmRatioReport rep;

    // Partial log-products of prod (1 + 1/a_n)^mult at K, 2K, 4K entries,
    // with the trace-class probe on the absolute sums.
    const std::size_t K = 25000;
    std::vector<cplx> logs(3, cplx(0.0));
    std::vector<double> abss(3, 0.0);
    cplx log_acc = 0.0;
    double abs_acc = 0.0;
    std::size_t idx = 0;
    seq.scan([&](const SpectrumEntry& e, std::size_t i) {
        log_acc += double(e.mult) * std::log(1.0 + 1.0 / e.value);
        abs_acc += double(e.mult) / std::abs(e.value);
        if (i + 1 == K) logs[0] = log_acc, abss[0] = abs_acc;
        if (i + 1 == 2 * K) logs[1] = log_acc, abss[1] = abs_acc;
        if (i + 1 == 4 * K) logs[2] = log_acc, abss[2] = abs_acc;
        idx = i + 1;
        return i + 1 < 4 * K;
    });
    if (idx < 4 * K) {
        // Finite spectrum: exact product, no tail.
        rep.trace_class = true;
        rep.lhs = std::exp(log_acc);
        rep.lhs_tail_err = 0.0;
    } else {
        const double d1 = abss[1] - abss[0];
        const double d2 = abss[2] - abss[1];
        rep.trace_class = d2 < 0.75 * d1;
        if (!rep.trace_class) {
            rep.lhs = std::exp(logs[2]);
            rep.lhs_tail_err = std::numeric_limits<double>::infinity();
            return rep;
        }
        const cplx lim = extrapolate_to_zero(
            {1.0 / K, 0.5 / K, 0.25 / K}, {logs[0], logs[1], logs[2]});
        // Residual of the cubic-and-beyond tail orders.
        rep.lhs_tail_err = 8.0 * std::abs(lim - logs[2]) / double(K);
        rep.lhs = std::exp(lim);
    }

    // Right side det(A+1)/det(A) through the Mellin pipeline.
    CharFn cf{seq, expansion, cfg};
    const cplx log_num = char_fn_eval(cf, cplx(1.0)).log_det;
    const cplx log_den = log_reg_det(seq, expansion, cfg);
    rep.rhs = std::exp(log_num - log_den);
    rep.rel_gap = std::abs(rep.lhs - rep.rhs) / std::abs(rep.rhs);
    return rep;
}

}  // namespace specdet
