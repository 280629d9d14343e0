#pragma once

// Euler-product determinant for compact hyperbolic surfaces from a supplied
// primitive geodesic length spectrum: det(D + lambda) = identity factor
// (built from the half-integer sphere-operator spectrum) times the double
// product over primitive classes and N >= 0 of (1 - e^{-(s+N) l}), with
// s = sqrt(lambda + 1/4).

#include <cstdint>
#include <string>
#include <vector>

#include "specdet/spectrum.hpp"
#include "specdet/theta.hpp"
#include "specdet/types.hpp"

namespace specdet {

struct PrimitiveClass {
    double length = 0.0;
    std::int64_t count = 1;
};

struct LengthSpectrum {
    int genus = 2;
    std::vector<PrimitiveClass> primitives;  // sorted by increasing length
};

LengthSpectrum load_length_spectrum_json(const std::string& text);
LengthSpectrum load_length_spectrum_file(const std::string& path);
std::string length_spectrum_to_json(const LengthSpectrum& ls);

// Conjugacy class: the m-th power of a primitive of length l0 has length
// m*l0 and multiplicity m.
struct ConjClassTerm {
    double primitive_length = 0.0;
    int power = 1;
    double length() const { return power * primitive_length; }
    int multiplicity() const { return power; }
};

// Spectrum {k + 1/2, multiplicity 2k+1} of P = sqrt(Delta_sphere + 1/4),
// with its Laurent-series theta expansion and the exact closed form
// Theta_P(t) = cosh(t/2) / (2 sinh^2(t/2)).
SpectralSequence sphere_operator_spectrum();
ThetaExpansion sphere_operator_expansion();
cplx sphere_operator_theta(double t);

// (prefactor * e^{-lambda-1/4} det(P + sqrt(lambda+1/4)))^{2-2g}; lambda
// must lie off (-inf, -1/4].  The prefactor absorbs any normalization
// constant of the identity contribution (default 1).
double identity_term(int genus, double lambda, const NumericConfig& cfg = {},
                     double prefactor = 1.0);

// exp(-sum_{N <= N_max} e^{-(s+N) l} / mu) with the geometric tail below
// tol_abs; N_max = -1 picks it automatically.
double conj_class_factor(const ConjClassTerm& term, double lambda,
                         double tol_abs = 1e-16, int n_max = -1);

struct ProductResult {
    double value = 1.0;
    double log_value = 0.0;
    double tail_bound = 0.0;  // certified truncation tail (on the log)
};

// prod over primitives and N >= 0 of (1 - e^{-(s+N) l})^count, by
// compensated parallel reduction of the factor logs.
ProductResult geodesic_product(const LengthSpectrum& spectrum, double lambda,
                               double tol_abs = 1e-16);

// Same value assembled from conj_class_factor over powers m <= m_max with a
// certified tail (the -log(1-x) = sum x^m / m identity, term by term).
ProductResult geodesic_product_via_classes(const LengthSpectrum& spectrum,
                                           double lambda,
                                           double tol_abs = 1e-16);

struct SurfaceDet {
    double identity = 1.0;
    double product = 1.0;
    double det = 1.0;
    double tail_bound = 0.0;
};

SurfaceDet surface_det(const LengthSpectrum& spectrum, double lambda,
                       const NumericConfig& cfg = {},
                       double identity_prefactor = 1.0);

}  // namespace specdet
