#include "specdet/cli.hpp"

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "specdet/determinants.hpp"
#include "specdet/l2.hpp"
#include "specdet/mellin.hpp"
#include "specdet/special.hpp"
#include "specdet/spectrum.hpp"
#include "specdet/surface.hpp"
#include "specdet/table.hpp"
#include "specdet/theta.hpp"
#include "specdet/tower.hpp"
#include "specdet/types.hpp"

namespace specdet {

namespace {

struct RunConfig {
    std::string model;
    std::string spectrum_path;
    std::string expansion_path;
    std::string lambda_str;
    std::string lambda_grid;  // a:b:n
    std::string s_str;
    std::string levels = "1,2,4,8,16,32,64";
    std::string lengths;  // comma-separated
    double L = 2.0 * 3.14159265358979323846;
    int genus = 2;
    std::string out_path;
    std::string format = "csv";
    NumericConfig numeric;
};

cplx parse_complex(const std::string& s) {
    std::istringstream in(s);
    double re = 0.0, im = 0.0;
    char comma = 0;
    if (!(in >> re)) throw input_error("bad complex number: " + s);
    if (in >> comma) {
        if (comma != ',' || !(in >> im))
            throw input_error("bad complex number: " + s);
    }
    return {re, im};
}

std::vector<double> parse_grid(const std::string& s) {
    // a:b:n, n >= 2, a < b
    double a = 0.0, b = 0.0;
    long n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':')
        throw input_error("bad grid (want a:b:n): " + s);
    if (!(a < b) || n < 2) throw input_error("grid needs a < b and n >= 2");
    const std::size_t count = std::size_t(n);
    std::vector<double> xs(count);
    for (std::size_t i = 0; i < count; ++i)
        xs[i] = a + (b - a) * double(i) / double(n - 1);
    return xs;
}

std::vector<int> parse_levels(const std::string& s) {
    std::vector<int> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

std::vector<double> parse_lengths(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::vector<cplx> lambda_list(const RunConfig& rc) {
    if (!rc.lambda_grid.empty()) {
        std::vector<cplx> out;
        for (double x : parse_grid(rc.lambda_grid)) out.push_back(cplx(x));
        return out;
    }
    if (!rc.lambda_str.empty()) return {parse_complex(rc.lambda_str)};
    throw input_error("need --lambda or --lambda-grid");
}

// Bundled spectra by name; "circle" is the reduced circle, "circle-full"
// keeps the zero mode.
struct NamedModel {
    SpectralSequence seq;
    ThetaExpansion expansion;
    std::function<cplx(double)> theta;  // optional closed form
};

NamedModel named_model(const RunConfig& rc) {
    NamedModel m;
    if (rc.model == "integers") {
        m.seq = integer_spectrum();
        m.expansion = integer_theta_expansion();
        m.theta = [](double t) { return cplx(1.0 / std::expm1(t)); };
    } else if (rc.model == "circle") {
        m.seq = circle_spectrum(rc.L, false);
        m.expansion = circle_theta_expansion(rc.L, true);
    } else if (rc.model == "circle-full") {
        m.seq = circle_spectrum(rc.L, true);
        m.expansion = circle_theta_expansion(rc.L, false);
    } else if (rc.model == "sphere-op") {
        m.seq = sphere_operator_spectrum();
        m.expansion = sphere_operator_expansion();
        m.theta = [](double t) { return sphere_operator_theta(t); };
    } else if (rc.model == "torus") {
        m.seq = torus_spectrum(parse_lengths(rc.lengths), 1000.0);
        m.expansion = torus_theta_expansion(parse_lengths(rc.lengths));
    } else {
        throw input_error("unknown model: " + rc.model);
    }
    return m;
}

NamedModel resolve_input(const RunConfig& rc) {
    if (!rc.model.empty()) return named_model(rc);
    if (rc.spectrum_path.empty())
        throw input_error("need --model or --spectrum");
    NamedModel m;
    m.seq = load_spectrum_file(rc.spectrum_path);
    KernelSplit ks = kernel_split(m.seq, rc.numeric.zero_threshold);
    m.seq = ks.reduced;
    m.expansion = rc.expansion_path.empty()
                      ? finite_spectrum_expansion(m.seq, 8)
                      : load_expansion_file(rc.expansion_path);
    return m;
}

void print_scalar(const RunConfig& rc, const std::string& name, cplx value,
                  double est_err) {
    Table t;
    t.columns = {name + "_re", name + "_im", "est_err"};
    t.rows = {{value.real(), value.imag(), est_err}};
    if (rc.out_path.empty() && rc.format == "csv") {
        // Bare scalar on stdout for scripting; grids always go through emit.
        std::cout << format_double(value.real());
        if (value.imag() != 0.0)
            std::cout << "," << format_double(value.imag());
        std::cout << "\n";
        return;
    }
    emit(t, rc.format, rc.out_path);
}

int cmd_regdet(const RunConfig& rc) {
    NamedModel m = resolve_input(rc);
    KernelSplit ks = kernel_split(m.seq, rc.numeric.zero_threshold);
    const cplx det = reg_det(ks.reduced, m.expansion, rc.numeric);
    if (ks.kernel_dimension > 0)
        std::cerr << "kernel dimension " << ks.kernel_dimension
                  << " removed (reduced determinant)\n";
    print_scalar(rc, "det", det, 100.0 * rc.numeric.tol_rel * std::abs(det));
    return 0;
}

int cmd_charfn(const RunConfig& rc) {
    NamedModel m = resolve_input(rc);
    CharFn cf{m.seq, m.expansion, rc.numeric, m.theta};
    Table t;
    t.columns = {"lambda_re", "lambda_im", "det_re", "det_im", "est_err"};
    for (cplx lam : lambda_list(rc)) {
        CharFnValue v = char_fn_eval(cf, lam);
        t.rows.push_back({lam.real(), lam.imag(), v.det.real(),
                          v.det.imag(),
                          100.0 * rc.numeric.tol_rel * std::abs(v.det)});
    }
    emit(t, rc.format, rc.out_path);
    return 0;
}

int cmd_fredholm(const RunConfig& rc) {
    if (!rc.model.empty() || !rc.expansion_path.empty()) {
        NamedModel m = resolve_input(rc);
        FredholmRatioReport rep =
            fredholm_ratio_check(m.seq, m.expansion, rc.numeric);
        if (!rep.trace_class)
            throw input_error(
                "A^{-1} is not trace class; the ratio identity needs "
                "sum |a_n|^{-1} < infinity");
        Table t;
        t.columns = {"lhs_re", "lhs_im", "rhs_re", "rhs_im", "rel_gap",
                     "lhs_tail_err"};
        t.rows = {{rep.lhs.real(), rep.lhs.imag(), rep.rhs.real(),
                   rep.rhs.imag(), rep.rel_gap, rep.lhs_tail_err}};
        emit(t, rc.format, rc.out_path);
        return 0;
    }
    // Spectrum file entries are the eigenvalues of the trace-class T.
    if (rc.spectrum_path.empty())
        throw input_error("fredholm needs --spectrum or --model");
    SpectralSequence seq = load_spectrum_file(rc.spectrum_path);
    std::vector<std::pair<cplx, std::int64_t>> eigs;
    seq.scan([&](const SpectrumEntry& e, std::size_t) {
        eigs.push_back({e.value, e.mult});
        return true;
    });
    const cplx prod = fredholm_det(eigs, FredholmMethod::product, rc.numeric);
    Table t;
    t.columns = {"product_re", "product_im", "exp_series_re", "exp_series_im",
                 "method_gap"};
    double max_abs = 0.0;
    for (const auto& [v, mult] : eigs)
        max_abs = std::max(max_abs, std::abs(v));
    if (max_abs < 1.0) {
        const cplx es =
            fredholm_det(eigs, FredholmMethod::exp_series, rc.numeric);
        t.rows = {{prod.real(), prod.imag(), es.real(), es.imag(),
                   std::abs(prod - es)}};
    } else {
        t.rows = {{prod.real(), prod.imag(), std::nan(""), std::nan(""),
                   std::nan("")}};
    }
    emit(t, rc.format, rc.out_path);
    return 0;
}

int cmd_residues(const RunConfig& rc) {
    NamedModel m = resolve_input(rc);
    ZetaEvaluator ev = make_zeta_evaluator(m.seq, m.expansion, rc.numeric);
    Table t;
    t.columns = {"alpha",      "residue_re", "residue_im",
                 "contour_re", "contour_im", "abs_gap"};
    for (const auto& term : m.expansion.terms) {
        if (is_nonneg_int(term.alpha)) continue;
        const cplx res = residue_at(ev, term.alpha);
        const cplx est = contour_residue(ev, cplx(-term.alpha));
        t.rows.push_back({term.alpha, res.real(), res.imag(), est.real(),
                          est.imag(), std::abs(res - est)});
    }
    emit(t, rc.format, rc.out_path);
    return 0;
}

int cmd_asymptotics(const RunConfig& rc) {
    NamedModel m = resolve_input(rc);
    // Keep the terms with alpha <= 1 so the neglected part is visible on a
    // double-precision grid.
    std::size_t keep = 0;
    while (keep < m.expansion.terms.size() &&
           m.expansion.terms[keep].alpha <= 1.0 + 1e-12)
        ++keep;
    const ThetaExpansion trunc = truncate_expansion(m.expansion, keep);
    const AsymptoticSeries series = asymptotic_series_from(trunc);
    CharFn cf{m.seq, m.expansion, rc.numeric, m.theta};
    double theta_abs1 = std::abs(theta_eval(m.seq, 1.0, rc.numeric));
    Table t;
    t.columns = {"lambda", "neg_log_det", "asymptotic", "abs_gap",
                 "next_term_estimate"};
    for (cplx lamc : lambda_list(rc)) {
        const double lam = lamc.real();
        const cplx exact = -char_fn_eval(cf, cplx(lam)).log_det;
        const cplx approx = asymptotic_neg_log_det(series, lam);
        t.rows.push_back(
            {lam, exact.real(), approx.real(), std::abs(exact - approx),
             asymptotic_error_estimate(series, lam, theta_abs1, rc.numeric)});
    }
    emit(t, rc.format, rc.out_path);
    return 0;
}

int cmd_l2det(const RunConfig& rc) {
    GammaTraceModel model;
    if (rc.model == "line" || rc.model.empty())
        model = line_model(rc.L);
    else if (rc.model == "flat")
        model = flat_model(parse_lengths(rc.lengths));
    else
        throw input_error("l2det models: line, flat");
    if (!rc.s_str.empty()) {
        const cplx s = parse_complex(rc.s_str);
        const cplx lam = rc.lambda_str.empty() ? cplx(0.0)
                                               : parse_complex(rc.lambda_str);
        const cplx z = l2_zeta_eval(model, lam, s, rc.numeric);
        print_scalar(rc, "zeta2", z, 100.0 * rc.numeric.tol_rel * std::abs(z));
        return 0;
    }
    Table t;
    t.columns = {"lambda_re", "lambda_im", "det_re", "det_im", "est_err"};
    for (cplx lam : lambda_list(rc)) {
        const cplx det = l2_det(model, lam, rc.numeric);
        t.rows.push_back({lam.real(), lam.imag(), det.real(), det.imag(),
                          100.0 * rc.numeric.tol_rel * std::abs(det)});
    }
    if (t.rows.size() == 1 && rc.out_path.empty() && rc.format == "csv") {
        print_scalar(rc, "det", {t.rows[0][2], t.rows[0][3]}, t.rows[0][4]);
        return 0;
    }
    emit(t, rc.format, rc.out_path);
    return 0;
}

int cmd_tower(const RunConfig& rc, const std::string& experiment, double t_val,
              double x_val, double growth_a, double growth_b,
              double growth_C) {
    TowerSpec tower =
        (rc.model == "torus")
            ? torus_tower(parse_lengths(rc.lengths), parse_levels(rc.levels))
            : circle_tower(rc.L, parse_levels(rc.levels));
    nlohmann::json summary;
    summary["experiment"] = experiment;
    Table t;
    if (experiment == "heat") {
        t.columns = {"j", "index", "value", "limit", "gap", "noise_floor"};
        for (const TraceRow& r :
             heat_trace_convergence(tower, t_val, rc.numeric))
            t.rows.push_back(
                {double(r.j), r.index, r.value, r.limit, r.gap,
                 r.noise_floor});
        summary["params"] = {{"t", t_val}};
        summary["verdict"] =
            t.rows.back()[4] <= t.rows.front()[4] ? "gaps shrink" : "check";
    } else if (experiment == "det") {
        const cplx lam = rc.lambda_str.empty() ? cplx(1.0)
                                               : parse_complex(rc.lambda_str);
        t.columns = {"j", "index", "value", "limit", "gap", "noise_floor"};
        for (const TraceRow& r : det_convergence(tower, lam, rc.numeric))
            t.rows.push_back(
                {double(r.j), r.index, r.value, r.limit, r.gap,
                 r.noise_floor});
        summary["params"] = {{"lambda_re", lam.real()},
                             {"lambda_im", lam.imag()}};
        summary["verdict"] =
            t.rows.back()[4] <= t.rows.front()[4] ? "gaps shrink" : "check";
    } else if (experiment == "kernels") {
        KernelConvergence kc = det_convergence_with_kernels(
            tower, KernelMode::uniform_bound, rc.numeric);
        t.columns = {"j", "index", "h_ratio", "det_prime_root"};
        for (const KernelRow& r : kc.rows)
            t.rows.push_back(
                {double(r.j), r.index, r.h_ratio, r.det_prime_root});
        summary["params"] = {{"h2", kc.h2}, {"det2_limit", kc.det2_limit}};
        summary["verdict"] = kc.hypothesis_holds
                                 ? "uniform trace bound holds"
                                 : "uniform trace bound violated";
    } else if (experiment == "kazhdan") {
        KazhdanReport rep = kazhdan_check(tower);
        t.columns = {"j", "h_ratio"};
        for (const auto& [j, r] : rep.ratios)
            t.rows.push_back({double(j), r});
        summary["params"] = {{"h2", rep.h2},
                             {"limsup_estimate", rep.limsup_estimate}};
        summary["verdict"] = rep.consistent
                                 ? "consistent with the Kazhdan inequality"
                                 : "inconsistent";
    } else if (experiment == "gap") {
        GapProbe probe = spectral_gap_probe(tower, x_val);
        t.columns = {"j", "ratio"};
        for (const auto& [j, r] : probe.ratios)
            t.rows.push_back({double(j), r});
        summary["params"] = {{"x", x_val}};
        summary["verdict"] = probe.verdict;
    } else if (experiment == "growth") {
        std::vector<double> xs;
        for (int i = 0; i <= 40; ++i) xs.push_back(i * 25.0);
        t.columns = {"j", "pass", "worst_ratio"};
        bool all = true;
        for (const GrowthRow& r :
             growth_estimate_check(tower, growth_a, growth_b, growth_C, xs)) {
            t.rows.push_back({double(r.j), r.pass ? 1.0 : 0.0,
                              r.worst_ratio});
            all = all && r.pass;
        }
        summary["params"] = {{"a", growth_a}, {"b", growth_b},
                             {"C", growth_C}};
        summary["verdict"] = all ? "growth estimate holds" : "violated";
    } else if (experiment == "bound") {
        t.columns = {"t", "sup_trace_ratio"};
        for (double tt : {1.0, 2.0, 5.0, 10.0, 25.0, 50.0, 100.0})
            t.rows.push_back(
                {tt, uniform_trace_bound(tower, tt, rc.numeric)});
        summary["params"] = nlohmann::json::object();
        summary["verdict"] = "see table";
    } else {
        throw input_error("unknown tower experiment: " + experiment);
    }
    emit(t, rc.format, rc.out_path);
    std::cout << "summary: " << summary.dump() << "\n";
    return 0;
}

int cmd_surface(const RunConfig& rc) {
    if (rc.spectrum_path.empty())
        throw input_error("surface needs --spectrum (length-spectrum JSON)");
    LengthSpectrum ls = load_length_spectrum_file(rc.spectrum_path);
    if (rc.genus > 0) ls.genus = rc.genus;
    Table t;
    t.columns = {"lambda", "identity_term", "geodesic_product", "det",
                 "tail_bound"};
    for (cplx lamc : lambda_list(rc)) {
        SurfaceDet sd = surface_det(ls, lamc.real(), rc.numeric);
        t.rows.push_back(
            {lamc.real(), sd.identity, sd.product, sd.det, sd.tail_bound});
    }
    emit(t, rc.format, rc.out_path);
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"zeta-regularized, L2, and equivariant determinants"};
    app.require_subcommand(1);

    RunConfig rc;
    std::string experiment = "det";
    double t_val = 1.0, x_val = 0.5;
    double growth_a = 0.5, growth_b = 0.5, growth_C = 3.0;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--model", rc.model);
        cmd->add_option("--spectrum", rc.spectrum_path);
        cmd->add_option("--expansion", rc.expansion_path);
        cmd->add_option("--lambda", rc.lambda_str);
        cmd->add_option("--lambda-grid", rc.lambda_grid);
        cmd->add_option("--s", rc.s_str);
        cmd->add_option("--levels", rc.levels);
        cmd->add_option("--L", rc.L);
        cmd->add_option("--lengths", rc.lengths);
        cmd->add_option("--genus", rc.genus);
        cmd->add_option("--tol-rel", rc.numeric.tol_rel);
        cmd->add_option("--tol-abs", rc.numeric.tol_abs);
        cmd->add_option("--out", rc.out_path);
        cmd->add_option("--format", rc.format)
            ->check(CLI::IsMember({"csv", "json"}));
    };

    CLI::App* regdet = app.add_subcommand("regdet", "regularized determinant");
    CLI::App* charfn = app.add_subcommand("charfn", "det(A + lambda)");
    CLI::App* fredholm = app.add_subcommand("fredholm", "Fredholm dets");
    CLI::App* residues = app.add_subcommand("residues", "zeta residues");
    CLI::App* asym = app.add_subcommand("asymptotics", "large-lambda form");
    CLI::App* l2 = app.add_subcommand("l2det", "L2 determinants");
    CLI::App* tower = app.add_subcommand("tower", "covering-tower runs");
    CLI::App* surface = app.add_subcommand("surface", "hyperbolic assembly");
    for (CLI::App* cmd :
         {regdet, charfn, fredholm, residues, asym, l2, tower, surface})
        add_common(cmd);
    tower->add_option("--experiment", experiment)
        ->check(CLI::IsMember(
            {"heat", "det", "kernels", "kazhdan", "gap", "growth", "bound"}));
    tower->add_option("--t", t_val);
    tower->add_option("--x", x_val);
    tower->add_option("--a", growth_a);
    tower->add_option("--b", growth_b);
    tower->add_option("--C", growth_C);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (!(rc.numeric.tol_rel > 0.0 && rc.numeric.tol_abs > 0.0))
            throw input_error("tolerances must be positive");
        if (regdet->parsed()) return cmd_regdet(rc);
        if (charfn->parsed()) return cmd_charfn(rc);
        if (fredholm->parsed()) return cmd_fredholm(rc);
        if (residues->parsed()) return cmd_residues(rc);
        if (asym->parsed()) return cmd_asymptotics(rc);
        if (l2->parsed()) return cmd_l2det(rc);
        if (tower->parsed())
            return cmd_tower(rc, experiment, t_val, x_val, growth_a, growth_b,
                             growth_C);
        if (surface->parsed()) return cmd_surface(rc);
        throw input_error("no subcommand");
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace specdet
