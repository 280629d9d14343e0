#pragma once

// Gamma-trace heat models tr_Gamma e^{-tD} (closed forms for flat
// geometries), GNS decay estimation, L2-zeta functions via the zeta^1 +
// zeta^2 Mellin split, L2-determinants on C \ (-inf, 0], and the equivariant
// versions (isometry-weighted spectra and the conjugacy-class traces of the
// line model).

#include <functional>
#include <string>
#include <vector>

#include "specdet/mellin.hpp"
#include "specdet/theta.hpp"
#include "specdet/types.hpp"

namespace specdet {

struct GammaTraceModel {
    std::string name;
    int dimension = 1;
    double volume = 1.0;
    // tr_Gamma e^{-tD}; analytic on the sector |arg t| < pi/2 (the lambda
    // continuation rotates the Mellin ray through it).
    std::function<cplx(cplx)> trace;
    ThetaExpansion small_t_expansion;  // of trace(t) as t -> 0
    double kernel_gamma_dim = 0.0;     // h^(2)
    double gns_exact = 1.0;            // trace - h = O(t^{-gns/2}), t -> inf
    double poly_coef = 1.0;            // |trace(t) - h| <= poly_coef t^{-gns/2}
};

// Gamma = Z translations on the real line, D the Laplacian:
// trace(t) = L (4 pi t)^{-1/2}.
GammaTraceModel line_model(double L);

// n-dimensional flat model: trace(t) = vol (4 pi t)^{-n/2}, vol = prod L_i.
GammaTraceModel flat_model(const std::vector<double>& lengths);

// Conjugacy class n != 0 of the line model:
// trace(t) = L (4 pi t)^{-1/2} e^{-(nL)^2/(4t)}, rapidly decreasing at 0.
GammaTraceModel equivariant_line_model(double L, int n);

// -2 x least-squares slope of log(trace - h) against log t on [t0, t1].
double gns_estimate(const GammaTraceModel& model, double t0, double t1,
                    int samples = 33);

// zeta^(2)(s, lambda) built from (trace(t) - h) e^{-lambda t}.  lambda = 0
// requires Re s < gns/2 (the convergent half of the zeta^2 strip); lambda
// off (-inf, 0] is reached by rotating the integration ray.
cplx l2_zeta_eval(const GammaTraceModel& model, cplx lambda, cplx s,
                  const NumericConfig& cfg = {});

// exp(-d/ds zeta^(2) at 0).
cplx l2_det(const GammaTraceModel& model, cplx lambda,
            const NumericConfig& cfg = {});

// tr_{Gamma_gamma}(gamma e^{-tD}) for the line model, translation class n.
double equivariant_l2_trace(double L, int n, double t);

// Equivariant L2-determinant of the class n != 0 at spectral shift lambda:
// the Mellin integral of the class trace (closed form exp(-(1/|n|)
// e^{-|n| L sqrt(lambda)}) serves as the test oracle).
cplx equivariant_l2_det(double L, int n, cplx lambda,
                        const NumericConfig& cfg = {});

// Equivariant spectra (isometry traces per eigenspace) ------------------------

struct EquivariantEntry {
    double eigenvalue = 0.0;  // > 0
    cplx weight = 0.0;        // tr(g | Eig(D, eigenvalue))
};

struct EquivariantSpectrum {
    // Finite list, or a pure generator for model spectra.
    std::vector<EquivariantEntry> entries;
    std::function<EquivariantEntry(std::size_t)> generator;  // optional
    ThetaExpansion expansion;  // of Theta_g(t) = sum w e^{-t lambda}
    double weight_bound = 1.0;  // sup |weight|
    EquivariantEntry entry(std::size_t i) const;
    bool is_finite() const { return !generator; }
};

// Rotation by 2 pi / m on the circle of given circumference: eigenvalue
// (2 pi k / L)^2 carries weight 2 cos(2 pi k / m), k >= 1.
EquivariantSpectrum circle_rotation_spectrum(double circumference, int m);

EquivariantSpectrum finite_equivariant_spectrum(
    std::vector<EquivariantEntry> entries, int max_power = 8);

// zeta_{D,g}(s) = sum_{lambda>0} tr(g|Eig) lambda^{-s}, continued through the
// same Mellin split (signed weights).
cplx equivariant_zeta(const EquivariantSpectrum& eq, cplx s,
                      const NumericConfig& cfg = {});

// det_g = exp(-zeta'_{D,g}(0)); `lambda` shifts every eigenvalue (and adds
// the kernel eigenvalue lambda itself when kernel_weight != 0).
cplx equivariant_det(const EquivariantSpectrum& eq,
                     const NumericConfig& cfg = {});
cplx equivariant_det_shifted(const EquivariantSpectrum& eq, cplx lambda,
                             cplx kernel_weight, const NumericConfig& cfg = {});

}  // namespace specdet
