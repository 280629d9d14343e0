#pragma once

// Theta series Theta_a(t) = sum mult * e^{-t a_n} with controlled truncation,
// and small-t asymptotic expansions Theta(t) ~ sum c_nu t^{alpha_nu} together
// with certified remainder bounds.  The expansion algebra (scaling, folding
// in an exponential factor, adding/subtracting) is what lets the Mellin
// machinery run on transformed spectra without re-deriving asymptotics.

#include <vector>

#include "specdet/spectrum.hpp"
#include "specdet/types.hpp"

namespace specdet {

struct ExpansionTerm {
    double alpha;
    cplx c;
};

// One bound atom: |contribution| <= C * t^p * exp(-c / t^q) on (0, valid].
// c == 0 is a plain power bound (the shape user files declare); c > 0 covers
// the exponentially small tails of the bundled lattice models.
struct RemainderAtom {
    double C = 0.0;
    double p = 0.0;
    double c = 0.0;
    double q = 1.0;
};

struct RemainderBound {
    std::vector<RemainderAtom> atoms;
    double valid_up_to = 1.0;

    double eval(double t) const;
    // Smallest power exponent among pure-power atoms; +infinity when every
    // atom decays exponentially at 0.
    double alpha_next() const;
};

struct ThetaExpansion {
    std::vector<ExpansionTerm> terms;  // alpha strictly increasing
    RemainderBound remainder;
    std::size_t valid_to = 0;  // index N up to which the bound is certified

    cplx eval_terms(double t, std::size_t n_terms) const;
    cplx eval_terms(double t) const { return eval_terms(t, terms.size()); }

    // Pointwise bound for |Theta(t) - sum_{nu<=N} c_nu t^{alpha_nu}|:
    // the declared atoms plus the dropped terms treated as power atoms.
    double truncation_bound(double t, std::size_t N_used) const;
    // First neglected exponent when only N_used terms are kept.
    double alpha_after(std::size_t N_used) const;
};

// Evaluation ------------------------------------------------------------------

// Truncated sum mult * e^{-t value}; requires t > 0 and entries ordered by
// nondecreasing real part.  Throws nonconvergence_error if the truncation
// budget is exhausted (the tolerance is unreachable at this t).
cplx theta_eval(const SpectralSequence& seq, double t,
                const NumericConfig& cfg);

// Bundled model expansions ----------------------------------------------------

// Circle of given circumference: full spectrum has the single power term
// (-1/2, L/sqrt(4 pi)); the reduced spectrum additionally (0, -1).  All
// corrections are exponentially small (Poisson summation).
ThetaExpansion circle_theta_expansion(double circumference, bool reduced);

// Theta(t) = 1/(e^t - 1): Bernoulli-series terms at alpha = -1, 0, 1, 3, ...
ThetaExpansion integer_theta_expansion();

// Flat torus: single term (-n/2, vol/(4 pi)^{n/2}) plus exponentially small
// corrections.
ThetaExpansion torus_theta_expansion(const std::vector<double>& lengths);

// Exact finite-spectrum expansion: powers t^0..t^W from the exponential
// series of each entry.
ThetaExpansion finite_spectrum_expansion(const SpectralSequence& seq,
                                         int max_power = 6);

// Expansion algebra -----------------------------------------------------------

// Expansion of t -> Theta(c t).
ThetaExpansion expansion_scale_time(const ThetaExpansion& e, double c);

// Expansion of t -> e^{-mu t} Theta(t), powers kept up to alpha <= window.
ThetaExpansion expansion_fold_exp(const ThetaExpansion& e, cplx mu,
                                  double window);

ThetaExpansion expansion_add(const ThetaExpansion& a, const ThetaExpansion& b);
ThetaExpansion expansion_subtract(const ThetaExpansion& a,
                                  const ThetaExpansion& b);

// Certification ---------------------------------------------------------------

struct RemainderRow {
    double t;
    double remainder;  // |Theta(t) - partial expansion|
    double bound;      // certified bound at this t
    bool violated;
};

// Compares the truncated expansion against the directly summed theta series
// on a t-grid and flags bound violations.
std::vector<RemainderRow> expansion_remainder_report(
    const SpectralSequence& seq, const ThetaExpansion& expansion,
    std::size_t n_terms, const std::vector<double>& t_grid,
    const NumericConfig& cfg);

// JSON interchange ------------------------------------------------------------
// {"terms":[{"alpha":a,"c_re":x,"c_im":y},...],
//  "remainder":{"C":c,"alpha_next":p}}

ThetaExpansion load_expansion_json(const std::string& text);
ThetaExpansion load_expansion_file(const std::string& path);
std::string expansion_to_json(const ThetaExpansion& e);

}  // namespace specdet
