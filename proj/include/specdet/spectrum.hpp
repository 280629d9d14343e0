#pragma once

// Admissible eigenvalue sequences: explicit entries with multiplicities,
// lazily extended model spectra, and the sector/ordering invariants every
// consumer relies on.  Values are stored sorted by nondecreasing real part;
// multiplicities are explicit.  A sequence is immutable after construction;
// lazy extension only appends and is guarded by a mutex, so any number of
// readers may evaluate concurrently.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "specdet/types.hpp"

namespace specdet {

struct SpectrumEntry {
    cplx value;
    std::int64_t mult = 1;
};

class SpectralSequence {
  public:
    // Produces the entry at index i; must be a pure function of i and must
    // emit entries with nondecreasing real part, Re -> +infinity.
    using Generator = std::function<SpectrumEntry(std::size_t)>;

    SpectralSequence() = default;

    // Finite spectrum; entries are sorted and validated (nonzero values must
    // lie inside the declared sector W_epsilon).
    static SpectralSequence finite(std::vector<SpectrumEntry> entries,
                                   double epsilon, int k);

    // Infinite spectrum, extended on demand.
    static SpectralSequence lazy(Generator gen, double epsilon, int k,
                                 std::size_t prefix_check = 64);

    SpectrumEntry entry(std::size_t i) const;

    bool is_finite() const;
    // Count for finite sequences; nullopt when backed by a generator.
    std::optional<std::size_t> count() const;

    double epsilon() const;
    int k() const;

    // Walks entries in storage order while visit(entry, index) returns true.
    void scan(const std::function<bool(const SpectrumEntry&, std::size_t)>&
                  visit) const;

  private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

struct KernelSplit {
    std::int64_t kernel_dimension = 0;
    SpectralSequence reduced;
};

// Bundled model spectra -----------------------------------------------------

// a_n = n, multiplicity 1.
SpectralSequence integer_spectrum();

// Circle Laplacian eigenvalues (2 pi k / circumference)^2, multiplicity 2,
// plus the zero mode (multiplicity 1) when include_zero is set.
SpectralSequence circle_spectrum(double circumference,
                                 bool include_zero = false);

// a_n = a0 + n z, n >= 0.
SpectralSequence semilattice_spectrum(cplx a0, cplx z);

// Flat-torus Laplacian eigenvalues sum_i (2 pi m_i / L_i)^2 up to `cutoff`
// (inclusive), multiplicities aggregated over the integer lattice, zero mode
// included.  Finite by construction.
SpectralSequence torus_spectrum(const std::vector<double>& lengths,
                                double cutoff);

// Algebra -------------------------------------------------------------------

SpectralSequence scale(const SpectralSequence& s, double c);
SpectralSequence shift(const SpectralSequence& s, cplx lambda);
// Entrywise principal power a^sigma, Re sigma > 0; k becomes
// ceil(k / Re sigma).
SpectralSequence power(const SpectralSequence& s, cplx sigma);
// Disjoint union, merged by real part.
SpectralSequence union_spectra(const SpectralSequence& a,
                               const SpectralSequence& b);

// Removes entries with |value| <= zero_threshold and reports the removed
// total multiplicity.
KernelSplit kernel_split(const SpectralSequence& s,
                         double zero_threshold = 1e-12);

// Throws input_error if any entry within the first `probe` has
// |value| <= zero_threshold.
void require_kernel_free(const SpectralSequence& s, double zero_threshold,
                         std::size_t probe = 4);

// JSON interchange ----------------------------------------------------------
// Document shape: {"epsilon": e, "k": k, "entries": [{"re":..., "im":...,
// "mult":...}, ...]}.  Entries need not be sorted; the loader sorts and
// validates.

SpectralSequence load_spectrum_json(const std::string& text);
SpectralSequence load_spectrum_file(const std::string& path);
std::string spectrum_to_json(const SpectralSequence& s);

}  // namespace specdet
