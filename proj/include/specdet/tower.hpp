#pragma once

// Finite-covering tower experiments on circle/torus bases: heat-trace and
// determinant convergence toward the Gamma-trace limits, kernel ratios,
// uniform trace bounds, the Kazhdan inequality, the spectral-gap probe, and
// eigenvalue-counting growth checks.  Levels are exact flat spectra, so both
// sides of every limit are sharp.

#include <string>
#include <vector>

#include "specdet/l2.hpp"
#include "specdet/spectrum.hpp"
#include "specdet/theta.hpp"
#include "specdet/types.hpp"

namespace specdet {

struct TowerSpec {
    enum class Base { circle, torus };
    Base base = Base::circle;
    double L = 2.0 * 3.14159265358979323846;  // circle circumference
    std::vector<double> lengths;              // torus base lengths
    std::vector<int> levels;                  // strictly increasing j
    double counting_cutoff = 1000.0;          // torus enumeration bound
};

TowerSpec circle_tower(double L, std::vector<int> levels = {1, 2, 4, 8, 16,
                                                            32, 64});
TowerSpec torus_tower(std::vector<double> lengths,
                      std::vector<int> levels = {1, 2, 4, 8});

// [Gamma : Gamma_j]: j for the circle, j^dim for the torus.
double level_index(const TowerSpec& tower, int j);

// Level-j spectrum: circle of circumference jL (zero mode included), or the
// torus with lengths j*L_i up to counting_cutoff.
SpectralSequence level_spectrum(const TowerSpec& tower, int j);
ThetaExpansion level_expansion(const TowerSpec& tower, int j, bool reduced);

// The j -> infinity Gamma-trace model (line or flat).
GammaTraceModel tower_limit_model(const TowerSpec& tower);

// Eigenvalue counting function N(x), materialized up to max_x.
class CountingFunction {
  public:
    CountingFunction(const SpectralSequence& seq, double max_x);
    double operator()(double x) const;  // N(x) = sum_{lambda <= x} mult
    double kernel() const { return (*this)(0.0); }

  private:
    std::vector<std::pair<double, double>> steps_;
    double max_x_;
};

struct TraceRow {
    int j;
    double index;
    double value;        // tr e^{-tD_j} / index  (or det root)
    double limit;        // tr_Gamma e^{-tD}      (or det^(2))
    double gap;          // |value - limit|
    double noise_floor;  // double-precision resolution of the gap
};

std::vector<TraceRow> heat_trace_convergence(const TowerSpec& tower, double t,
                                             const NumericConfig& cfg = {});

struct EnvelopeFit {
    double C = 0.0;
    double R = 0.0;  // |gap(j,t)| <= C e^{-R^2/t}
    int signal_points = 0;
    int violations = 0;  // points above envelope + floor allowance
    bool dominates = false;
};

// Fits the Lemma-style envelope to the level-1..j gaps on t_grid (subset of
// (0,1)) and checks it dominates every computed gap up to noise.
EnvelopeFit heat_diff_decay(const TowerSpec& tower,
                            const std::vector<double>& t_grid,
                            const NumericConfig& cfg = {});

// det(D_j + lambda)^{1/index} against det^(2)(D + lambda).
std::vector<TraceRow> det_convergence(const TowerSpec& tower, cplx lambda,
                                      const NumericConfig& cfg = {});

enum class KernelMode { spectral_gap, uniform_bound };

struct KernelRow {
    int j;
    double index;
    double h_ratio;         // dim ker / index
    double det_prime_root;  // det'(D_j)^{1/index}
};

struct KernelConvergence {
    std::vector<KernelRow> rows;
    double h2 = 0.0;          // Gamma-kernel dimension of the limit
    double det2_limit = 0.0;  // det^(2) via the lambda -> 0+ path
    bool hypothesis_holds = false;
    double hypothesis_constant = 0.0;  // epsilon (gap) or C (bound)
};

KernelConvergence det_convergence_with_kernels(const TowerSpec& tower,
                                               KernelMode mode,
                                               const NumericConfig& cfg = {});

// sup over levels of tr e^{-t D'_j} / index (kernel removed).
double uniform_trace_bound(const TowerSpec& tower, double t,
                           const NumericConfig& cfg = {});
// sup over levels of tr (1 + D_j)^{-n} / index.
double uniform_resolvent_bound(const TowerSpec& tower, int n,
                               const NumericConfig& cfg = {});

struct KazhdanReport {
    std::vector<std::pair<int, double>> ratios;  // (j, h_j / index)
    double limsup_estimate = 0.0;  // Richardson-extrapolated in 1/index
    double h2 = 0.0;
    bool consistent = false;  // limsup_estimate <= h2 (+ tolerance)
};

KazhdanReport kazhdan_check(const TowerSpec& tower);

struct GapProbe {
    std::vector<std::pair<int, double>> ratios;  // (N_j(x)-N_j(0))/index
    std::string verdict;  // "consistent with gap" is never "proven"
};

GapProbe spectral_gap_probe(const TowerSpec& tower, double x);

struct GrowthRow {
    int j;
    bool pass;
    double worst_ratio;  // max over x of lhs / (C (x^a + x^b))
};

std::vector<GrowthRow> growth_estimate_check(const TowerSpec& tower, double a,
                                             double b, double C,
                                             const std::vector<double>& xs);

}  // namespace specdet
