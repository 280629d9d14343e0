#include "specdet/tower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "specdet/determinants.hpp"
#include "specdet/parallel.hpp"

namespace specdet {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void validate_levels(const std::vector<int>& levels) {
    if (levels.empty()) throw input_error("tower needs at least one level");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] <= 0) throw input_error("levels must be positive");
        if (i > 0 && levels[i] <= levels[i - 1])
            throw input_error("levels must strictly increase");
    }
}

std::vector<double> scaled_lengths(const std::vector<double>& lengths, int j) {
    std::vector<double> out = lengths;
    for (double& L : out) L *= j;
    return out;
}

}  // namespace

TowerSpec circle_tower(double L, std::vector<int> levels) {
    if (!(L > 0.0)) throw input_error("circumference must be positive");
    validate_levels(levels);
    TowerSpec t;
    t.base = TowerSpec::Base::circle;
    t.L = L;
    t.levels = std::move(levels);
    return t;
}

TowerSpec torus_tower(std::vector<double> lengths, std::vector<int> levels) {
    if (lengths.empty()) throw input_error("torus tower needs lengths");
    validate_levels(levels);
    TowerSpec t;
    t.base = TowerSpec::Base::torus;
    t.lengths = std::move(lengths);
    t.levels = std::move(levels);
    return t;
}

double level_index(const TowerSpec& tower, int j) {
    if (tower.base == TowerSpec::Base::circle) return double(j);
    return std::pow(double(j), double(tower.lengths.size()));
}

SpectralSequence level_spectrum(const TowerSpec& tower, int j) {
    if (j <= 0) throw input_error("level must be positive");
    if (tower.base == TowerSpec::Base::circle)
        return circle_spectrum(double(j) * tower.L, /*include_zero=*/true);
    return torus_spectrum(scaled_lengths(tower.lengths, j),
                          tower.counting_cutoff);
}

ThetaExpansion level_expansion(const TowerSpec& tower, int j, bool reduced) {
    if (tower.base == TowerSpec::Base::circle)
        return circle_theta_expansion(double(j) * tower.L, reduced);
    ThetaExpansion e = torus_theta_expansion(scaled_lengths(tower.lengths, j));
    if (reduced) {
        ThetaExpansion zero;
        zero.terms = {{0.0, cplx(1.0)}};
        zero.valid_to = 1;
        e = expansion_subtract(e, zero);
    }
    return e;
}

GammaTraceModel tower_limit_model(const TowerSpec& tower) {
    if (tower.base == TowerSpec::Base::circle) return line_model(tower.L);
    return flat_model(tower.lengths);
}

// Counting ----------------------------------------------------------------------

CountingFunction::CountingFunction(const SpectralSequence& seq, double max_x)
    : max_x_(max_x) {
    seq.scan([&](const SpectrumEntry& e, std::size_t) {
        if (e.value.real() > max_x) return false;
        if (std::abs(e.value.imag()) > 1e-9)
            throw input_error("counting functions need real spectra");
        steps_.push_back({e.value.real(), double(e.mult)});
        return true;
    });
}

double CountingFunction::operator()(double x) const {
    if (x > max_x_)
        throw input_error("counting function evaluated past its cutoff");
    double n = 0.0;
    for (const auto& [v, m] : steps_) {
        if (v > x + 1e-12 * std::max(1.0, std::abs(x))) break;
        n += m;
    }
    return n;
}

// Heat traces -------------------------------------------------------------------

std::vector<TraceRow> heat_trace_convergence(const TowerSpec& tower, double t,
                                             const NumericConfig& cfg) {
    if (!(t > 0.0)) throw input_error("t must be positive");
    const GammaTraceModel limit = tower_limit_model(tower);
    const double lim = limit.trace(cplx(t)).real();
    std::vector<TraceRow> rows(tower.levels.size());
    parallel_for(tower.levels.size(), [&](std::size_t i) {
        const int j = tower.levels[i];
        const double index = level_index(tower, j);
        const double tr =
            theta_eval(level_spectrum(tower, j), t, cfg).real();
        const double value = tr / index;
        rows[i] = {j,
                   index,
                   value,
                   lim,
                   std::abs(value - lim),
                   512.0 * kEps * std::max(value, lim)};
    });
    return rows;
}

EnvelopeFit heat_diff_decay(const TowerSpec& tower,
                            const std::vector<double>& t_grid,
                            const NumericConfig& cfg) {
    for (double t : t_grid)
        if (!(t > 0.0 && t < 1.0))
            throw input_error("decay grid must lie in (0, 1)");
    struct Point {
        double inv_t, log_gap, gap, floor;
    };
    std::vector<Point> signal, all;
    for (double t : t_grid) {
        for (const TraceRow& r : heat_trace_convergence(tower, t, cfg)) {
            all.push_back({1.0 / t, 0.0, r.gap, r.noise_floor});
            if (r.gap > 10.0 * r.noise_floor)
                signal.push_back({1.0 / t, std::log(r.gap), r.gap,
                                  r.noise_floor});
        }
    }
    if (signal.size() < 2)
        throw nonconvergence_error(
            "no resolvable heat-trace gaps on this grid; nothing to fit");
    // log gap = log C - R^2 / t: least squares in x = 1/t.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const Point& p : signal) {
        sx += p.inv_t;
        sy += p.log_gap;
        sxx += p.inv_t * p.inv_t;
        sxy += p.inv_t * p.log_gap;
    }
    const double n = double(signal.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    EnvelopeFit fit;
    fit.R = std::sqrt(std::max(-slope, 0.0));
    // Lift the intercept so the envelope covers every signal point.
    double logC = -std::numeric_limits<double>::infinity();
    for (const Point& p : signal)
        logC = std::max(logC, p.log_gap - slope * p.inv_t);
    fit.C = std::exp(logC) * 1.05;
    fit.signal_points = int(signal.size());
    fit.violations = 0;
    for (const Point& p : all) {
        const double env = fit.C * std::exp(slope * p.inv_t);
        if (p.gap > env + 10.0 * p.floor) ++fit.violations;
    }
    fit.dominates = fit.violations == 0;
    return fit;
}

// Determinants ------------------------------------------------------------------

std::vector<TraceRow> det_convergence(const TowerSpec& tower, cplx lambda,
                                      const NumericConfig& cfg) {
    if (tower.base != TowerSpec::Base::circle)
        throw input_error("determinant experiments run on circle towers");
    const double lim = std::abs(l2_det(tower_limit_model(tower), lambda, cfg));
    std::vector<TraceRow> rows(tower.levels.size());
    parallel_for(tower.levels.size(), [&](std::size_t i) {
        const int j = tower.levels[i];
        const double index = level_index(tower, j);
        CharFn cf{level_spectrum(tower, j), level_expansion(tower, j, false),
                  cfg, {}};
        const cplx root = std::exp(char_fn_eval(cf, lambda).log_det / index);
        const double value = std::abs(root);
        rows[i] = {j,
                   index,
                   value,
                   lim,
                   std::abs(value - lim),
                   1e-9 * std::max(value, lim)};
    });
    return rows;
}

KernelConvergence det_convergence_with_kernels(const TowerSpec& tower,
                                               KernelMode mode,
                                               const NumericConfig& cfg) {
    if (tower.base != TowerSpec::Base::circle)
        throw input_error("determinant experiments run on circle towers");
    KernelConvergence out;
    out.h2 = tower_limit_model(tower).kernel_gamma_dim;
    out.rows.resize(tower.levels.size());
    parallel_for(tower.levels.size(), [&](std::size_t i) {
        const int j = tower.levels[i];
        const double index = level_index(tower, j);
        KernelSplit ks =
            kernel_split(level_spectrum(tower, j), cfg.zero_threshold);
        const cplx logd = log_reg_det(ks.reduced,
                                      level_expansion(tower, j, true), cfg);
        out.rows[i] = {j, index, double(ks.kernel_dimension) / index,
                       std::exp(logd / index).real()};
    });
    // det^(2) at 0 via the lambda -> 0+ continuation of the limit model.
    const GammaTraceModel limit = tower_limit_model(tower);
    out.det2_limit = std::abs(l2_det(limit, cplx(1e-8), cfg));

    if (mode == KernelMode::spectral_gap) {
        // First nonzero eigenvalue per level; the hypothesis asks for a
        // j-independent lower bound.
        double first_min = std::numeric_limits<double>::infinity();
        double first_at_jmax = 0.0;
        for (int j : tower.levels) {
            KernelSplit ks =
                kernel_split(level_spectrum(tower, j), cfg.zero_threshold);
            const double first = ks.reduced.entry(0).value.real();
            first_min = std::min(first_min, first);
            first_at_jmax = first;
        }
        out.hypothesis_constant = first_min;
        // Declining bottom eigenvalues mean the finite data is inconsistent
        // with a uniform gap.
        const double first_at_jmin =
            kernel_split(level_spectrum(tower, tower.levels.front()),
                         cfg.zero_threshold)
                .reduced.entry(0)
                .value.real();
        out.hypothesis_holds = first_at_jmax >= 0.5 * first_at_jmin;
    } else {
        // sup over t in [1, 100] and levels of (tr' / index) t^{1/2}.
        double C = 0.0;
        for (double t : {1.0, 2.0, 5.0, 10.0, 25.0, 50.0, 100.0})
            C = std::max(C, uniform_trace_bound(tower, t, cfg) *
                                std::sqrt(t));
        out.hypothesis_constant = C;
        out.hypothesis_holds = std::isfinite(C);
    }
    return out;
}

double uniform_trace_bound(const TowerSpec& tower, double t,
                           const NumericConfig& cfg) {
    if (!(t > 0.0)) throw input_error("t must be positive");
    double sup = 0.0;
    for (int j : tower.levels) {
        KernelSplit ks =
            kernel_split(level_spectrum(tower, j), cfg.zero_threshold);
        const double tr = theta_eval(ks.reduced, t, cfg).real();
        sup = std::max(sup, tr / level_index(tower, j));
    }
    return sup;
}

double uniform_resolvent_bound(const TowerSpec& tower, int n,
                               const NumericConfig& cfg) {
    if (n <= 0) throw input_error("resolvent power must be positive");
    double sup = 0.0;
    for (int j : tower.levels) {
        double acc = 0.0;
        int quiet = 0;
        level_spectrum(tower, j).scan(
            [&](const SpectrumEntry& e, std::size_t) {
                const double term =
                    double(e.mult) /
                    std::pow(1.0 + e.value.real(), double(n));
                acc += term;
                if (term < cfg.tol_rel * acc) {
                    if (++quiet > 4) return false;
                } else {
                    quiet = 0;
                }
                return true;
            });
        sup = std::max(sup, acc / level_index(tower, j));
    }
    return sup;
}

KazhdanReport kazhdan_check(const TowerSpec& tower) {
    KazhdanReport rep;
    rep.h2 = tower_limit_model(tower).kernel_gamma_dim;
    NumericConfig cfg;
    for (int j : tower.levels) {
        KernelSplit ks =
            kernel_split(level_spectrum(tower, j), cfg.zero_threshold);
        rep.ratios.push_back(
            {j, double(ks.kernel_dimension) / level_index(tower, j)});
    }
    const std::size_t n = rep.ratios.size();
    if (n >= 2) {
        // Linear extrapolation in 1/index of the last two ratios.
        const double r1 = rep.ratios[n - 2].second;
        const double r2 = rep.ratios[n - 1].second;
        const double x1 = 1.0 / level_index(tower, rep.ratios[n - 2].first);
        const double x2 = 1.0 / level_index(tower, rep.ratios[n - 1].first);
        rep.limsup_estimate =
            std::max(0.0, r2 - x2 * (r1 - r2) / (x1 - x2));
    } else {
        rep.limsup_estimate = rep.ratios.back().second;
    }
    rep.consistent = rep.limsup_estimate <= rep.h2 + 1e-9;
    return rep;
}

GapProbe spectral_gap_probe(const TowerSpec& tower, double x) {
    if (!(x > 0.0)) throw input_error("probe point x must be positive");
    GapProbe probe;
    bool all_zero = true;
    double first = -1.0, last = -1.0;
    for (int j : tower.levels) {
        CountingFunction N(level_spectrum(tower, j), std::max(x, 1.0) * 2.0);
        const double ratio = (N(x) - N(0.0)) / level_index(tower, j);
        probe.ratios.push_back({j, ratio});
        if (ratio != 0.0) all_zero = false;
        if (first < 0.0) first = ratio;
        last = ratio;
    }
    if (all_zero)
        probe.verdict = "consistent with a spectral gap at zero (not proven)";
    else if (last <= 0.5 * std::max(first, 1e-300))
        probe.verdict =
            "ratios decreasing; gap hypothesis plausible (not proven)";
    else
        probe.verdict =
            "ratios do not vanish; hypothesis fails, no gap conclusion";
    return probe;
}

std::vector<GrowthRow> growth_estimate_check(const TowerSpec& tower, double a,
                                             double b, double C,
                                             const std::vector<double>& xs) {
    if (!(C > 0.0)) throw input_error("growth constant must be positive");
    double max_x = 0.0;
    for (double x : xs) {
        if (x < 0.0) throw input_error("growth grid must be nonnegative");
        max_x = std::max(max_x, x);
    }
    std::vector<GrowthRow> rows;
    for (int j : tower.levels) {
        CountingFunction N(level_spectrum(tower, j), max_x + 1.0);
        GrowthRow row{j, true, 0.0};
        for (double x : xs) {
            const double lhs = (N(x) - N(0.0)) / level_index(tower, j);
            const double rhs = C * (std::pow(x, a) + std::pow(x, b));
            if (x == 0.0) {
                if (lhs > 0.0) row.pass = false;
                continue;
            }
            row.worst_ratio = std::max(row.worst_ratio, lhs / rhs);
            if (lhs > rhs) row.pass = false;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace specdet
