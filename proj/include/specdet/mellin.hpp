#pragma once

// Meromorphic continuation of spectral zeta functions via the Mellin split:
//   zeta(s) = sum_{nu<=N} c_nu / (Gamma(s)(s+alpha_nu))
//           + 1/Gamma(s) * int_0^1 t^{s-1} (Theta(t) - sum c_nu t^{alpha_nu}) dt
//           + 1/Gamma(s) * int_1^inf t^{s-1} Theta(t) dt
// with N chosen so the first neglected exponent exceeds -Re s + 2.  Entries
// with small real part are split off and summed directly so the upper
// integral always sees exponential decay.

#include <functional>
#include <vector>

#include "specdet/spectrum.hpp"
#include "specdet/theta.hpp"
#include "specdet/types.hpp"

namespace specdet {

struct ZetaEvaluator {
    SpectralSequence seq;
    ThetaExpansion expansion;
    NumericConfig config;
};

// Validates that seq is kernel-free and the expansion is usable.
ZetaEvaluator make_zeta_evaluator(SpectralSequence seq,
                                  ThetaExpansion expansion,
                                  NumericConfig config = {});

cplx zeta_eval(const ZetaEvaluator& ev, cplx s);

// Analytic pole-term derivatives at s = 0 plus the two integrals; this is
// -log of the regularized product.
cplx zeta_deriv_at_zero(const ZetaEvaluator& ev);

// sum of c_nu over alpha_nu = 0 (the integrals vanish through 1/Gamma).
cplx zeta_value_at_zero(const ZetaEvaluator& ev);

// Residue c_nu / Gamma(-alpha_nu) at s = -alpha_nu; throws input_error when
// alpha_nu is an integer >= 0 (no pole there).
cplx residue_at(const ZetaEvaluator& ev, double alpha_nu);

// Trapezoidal contour estimate of the residue at s0, for cross-checks.
cplx contour_residue(const ZetaEvaluator& ev, cplx s0, double radius = 0.15,
                     int points = 24);

// Direct Dirichlet sum; converges for Re s > k.
cplx direct_dirichlet(const SpectralSequence& seq, cplx s,
                      const NumericConfig& cfg);

namespace detail {

// A heat trace with certified small-t data and exponential large-t decay:
// |theta(t)| <= decay_coef * e^{-decay_rate t} for t >= 1.
struct HeatSource {
    std::function<cplx(double)> theta;
    ThetaExpansion expansion;
    double decay_rate = 1.0;
    double decay_coef = 1.0;
};

cplx hs_zeta(const HeatSource& hs, cplx s, const NumericConfig& cfg);
cplx hs_zeta_deriv0(const HeatSource& hs, const NumericConfig& cfg);
cplx hs_zeta_value0(const ThetaExpansion& e);

// Number of leading expansion terms needed at Re s = sigma (first neglected
// exponent > -sigma + 2); throws nonconvergence_error if unreachable.
std::size_t pick_term_count(const ThetaExpansion& e, double sigma);

// Truncation points with tails below `budget`.
double lower_t_min(const ThetaExpansion& e, std::size_t n_used, double sigma,
                   double budget);
double upper_cutoff(double sigma, double rate, double coef, double budget,
                    double cap);

// Splits entries with Re(value) <= real_cut off the front of seq (at most
// `max_head`); returns the head entries and the remaining sequence.
std::pair<std::vector<SpectrumEntry>, SpectralSequence> split_head(
    const SpectralSequence& seq, double real_cut,
    std::size_t max_head = 1 << 20);

HeatSource source_for(const SpectralSequence& seq, const ThetaExpansion& e,
                      const NumericConfig& cfg);

}  // namespace detail

}  // namespace specdet
