#include "specdet/spectrum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace specdet {

namespace {

constexpr double kPi = std::numbers::pi;

void check_sector(const cplx& v, double epsilon, std::size_t index) {
    if (std::abs(v) == 0.0) return;  // zero modes are kept; zeta ops reject
    const double a = std::arg(v);
    if (!(a > -kPi + epsilon && a < kPi - epsilon))
        throw sector_error("entry " + std::to_string(index) +
                           " leaves the sector W_epsilon: arg = " +
                           std::to_string(a) +
                           ", epsilon = " + std::to_string(epsilon));
}

}  // namespace

struct SpectralSequence::Impl {
    // Deque: appends never move existing elements, so readers may touch
    // cache[i] without the lock once i < ready.
    mutable std::deque<SpectrumEntry> cache;
    mutable std::atomic<std::size_t> ready{0};
    Generator gen;  // null for finite sequences
    double epsilon = kPi / 2;
    int k = 1;
    mutable std::mutex mu;

    SpectrumEntry get(std::size_t i) const {
        if (i < ready.load(std::memory_order_acquire)) return cache[i];
        if (!gen) throw input_error("index past the end of a finite spectrum");
        std::lock_guard<std::mutex> lock(mu);
        while (cache.size() <= i) {
            const std::size_t n = cache.size();
            SpectrumEntry e = gen(n);
            if (e.mult <= 0)
                throw input_error("generator produced nonpositive multiplicity");
            check_sector(e.value, epsilon, n);
            if (n > 0 && e.value.real() < cache.back().value.real() - 1e-12)
                throw input_error(
                    "generator violated the nondecreasing-real-part order at "
                    "index " +
                    std::to_string(n));
            cache.push_back(e);
        }
        ready.store(cache.size(), std::memory_order_release);
        return cache[i];
    }
};

SpectralSequence SpectralSequence::finite(std::vector<SpectrumEntry> entries,
                                          double epsilon, int k) {
    if (!(epsilon > 0.0 && epsilon < kPi))
        throw input_error("epsilon must lie in (0, pi)");
    if (k <= 0) throw input_error("convergence exponent k must be positive");
    std::stable_sort(entries.begin(), entries.end(),
                     [](const SpectrumEntry& a, const SpectrumEntry& b) {
                         return a.value.real() < b.value.real();
                     });
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].mult <= 0)
            throw input_error("multiplicities must be positive");
        check_sector(entries[i].value, epsilon, i);
    }
    auto impl = std::make_shared<Impl>();
    impl->cache.assign(entries.begin(), entries.end());
    impl->ready.store(impl->cache.size());
    impl->epsilon = epsilon;
    impl->k = k;
    SpectralSequence s;
    s.impl_ = std::move(impl);
    return s;
}

SpectralSequence SpectralSequence::lazy(Generator gen, double epsilon, int k,
                                        std::size_t prefix_check) {
    if (!(epsilon > 0.0 && epsilon < kPi))
        throw input_error("epsilon must lie in (0, pi)");
    if (k <= 0) throw input_error("convergence exponent k must be positive");
    auto impl = std::make_shared<Impl>();
    impl->gen = std::move(gen);
    impl->epsilon = epsilon;
    impl->k = k;
    SpectralSequence s;
    s.impl_ = std::move(impl);
    if (prefix_check > 0) s.entry(prefix_check - 1);  // admissibility probe
    return s;
}

SpectrumEntry SpectralSequence::entry(std::size_t i) const {
    if (!impl_) throw input_error("empty spectral sequence");
    return impl_->get(i);
}

bool SpectralSequence::is_finite() const { return impl_ && !impl_->gen; }

std::optional<std::size_t> SpectralSequence::count() const {
    if (!impl_ || impl_->gen) return std::nullopt;
    return impl_->cache.size();
}

double SpectralSequence::epsilon() const {
    if (!impl_) throw input_error("empty spectral sequence");
    return impl_->epsilon;
}

int SpectralSequence::k() const {
    if (!impl_) throw input_error("empty spectral sequence");
    return impl_->k;
}

void SpectralSequence::scan(
    const std::function<bool(const SpectrumEntry&, std::size_t)>& visit)
    const {
    if (!impl_) return;
    for (std::size_t i = 0;; ++i) {
        if (is_finite() && i >= impl_->cache.size()) return;
        if (!visit(entry(i), i)) return;
    }
}

// Models ----------------------------------------------------------------------

SpectralSequence integer_spectrum() {
    return SpectralSequence::lazy(
        [](std::size_t i) { return SpectrumEntry{cplx(double(i + 1)), 1}; },
        kPi / 2, 2);
}

SpectralSequence circle_spectrum(double circumference, bool include_zero) {
    if (!(circumference > 0.0))
        throw input_error("circle circumference must be positive");
    const double base = 2.0 * kPi / circumference;
    if (include_zero) {
        return SpectralSequence::lazy(
            [base](std::size_t i) {
                if (i == 0) return SpectrumEntry{cplx(0.0), 1};
                const double v = base * double(i);
                return SpectrumEntry{cplx(v * v), 2};
            },
            kPi / 2, 1);
    }
    return SpectralSequence::lazy(
        [base](std::size_t i) {
            const double v = base * double(i + 1);
            return SpectrumEntry{cplx(v * v), 2};
        },
        kPi / 2, 1);
}

SpectralSequence semilattice_spectrum(cplx a0, cplx z) {
    // Sector margin from the prefix and the asymptotic direction arg(z).
    double max_arg = std::abs(std::arg(z));
    for (int n = 0; n < 10000; ++n) {
        const cplx v = a0 + double(n) * z;
        if (std::abs(v) == 0.0)
            throw input_error("semilattice hits zero at n = " +
                              std::to_string(n));
        max_arg = std::max(max_arg, std::abs(std::arg(v)));
    }
    const double eps = kPi - max_arg - 1e-9;
    if (!(eps > 0.0))
        throw sector_error("semilattice leaves every admissible sector");
    if (z.real() < 0.0)
        throw input_error("semilattice needs nondecreasing real parts");
    return SpectralSequence::lazy(
        [a0, z](std::size_t i) {
            return SpectrumEntry{a0 + double(i) * z, 1};
        },
        eps, 2);
}

SpectralSequence torus_spectrum(const std::vector<double>& lengths,
                                double cutoff) {
    if (lengths.empty()) throw input_error("torus needs at least one length");
    if (!(cutoff > 0.0)) throw input_error("torus cutoff must be positive");
    for (double L : lengths)
        if (!(L > 0.0)) throw input_error("torus lengths must be positive");

    const std::size_t dim = lengths.size();
    std::vector<double> step(dim);
    std::vector<long> bound(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        step[i] = 2.0 * kPi / lengths[i];
        bound[i] = long(std::floor(std::sqrt(cutoff) / step[i]));
    }

    // Aggregate multiplicities; lattice values from different m can collide
    // only up to rounding, so bucket keys are rounded at 1e-12 relative.
    std::map<double, std::int64_t> mults;
    std::vector<long> m(dim, 0);
    const std::function<void(std::size_t, double)> walk =
        [&](std::size_t i, double partial) {
            if (i == dim) {
                if (partial <= cutoff * (1.0 + 1e-15)) mults[partial] += 1;
                return;
            }
            for (long mi = -bound[i]; mi <= bound[i]; ++mi) {
                const double term = step[i] * double(mi);
                const double next = partial + term * term;
                if (next <= cutoff * (1.0 + 1e-15)) walk(i + 1, next);
            }
        };
    walk(0, 0.0);

    std::vector<SpectrumEntry> entries;
    entries.reserve(mults.size());
    double last = -1.0;
    for (const auto& [v, mult] : mults) {
        if (!entries.empty() && v - last <= 1e-12 * std::max(1.0, v)) {
            entries.back().mult += mult;
            continue;
        }
        entries.push_back({cplx(v), mult});
        last = v;
    }
    return SpectralSequence::finite(std::move(entries), kPi / 2, 1);
}

// Algebra ---------------------------------------------------------------------

namespace {

// Sector margin for a transformed sequence: probe a prefix plus a far index
// for the asymptotic direction.
double derived_epsilon(const SpectralSequence& s,
                       const std::function<cplx(cplx)>& f) {
    double max_arg = 0.0;
    const std::size_t probe = s.is_finite()
                                  ? *s.count()
                                  : std::size_t(512);
    for (std::size_t i = 0; i < probe; ++i) {
        if (s.is_finite() && i >= *s.count()) break;
        const cplx v = f(s.entry(i).value);
        if (std::abs(v) == 0.0) continue;
        max_arg = std::max(max_arg, std::abs(std::arg(v)));
    }
    if (!s.is_finite()) {
        const cplx far = f(s.entry(4096).value);
        if (std::abs(far) != 0.0)
            max_arg = std::max(max_arg, std::abs(std::arg(far)));
    }
    const double eps = kPi - max_arg - 1e-9;
    if (!(eps > 0.0))
        throw sector_error("transformed sequence leaves every sector");
    return eps;
}

SpectralSequence map_sequence(const SpectralSequence& s,
                              const std::function<cplx(cplx)>& f, int k) {
    const double eps = derived_epsilon(s, f);
    if (s.is_finite()) {
        std::vector<SpectrumEntry> out;
        out.reserve(*s.count());
        s.scan([&](const SpectrumEntry& e, std::size_t) {
            out.push_back({f(e.value), e.mult});
            return true;
        });
        return SpectralSequence::finite(std::move(out), eps, k);
    }
    return SpectralSequence::lazy(
        [s, f](std::size_t i) {
            const SpectrumEntry e = s.entry(i);
            return SpectrumEntry{f(e.value), e.mult};
        },
        eps, k);
}

}  // namespace

SpectralSequence scale(const SpectralSequence& s, double c) {
    if (!(c > 0.0)) throw input_error("scale factor must be positive");
    return map_sequence(s, [c](cplx v) { return c * v; }, s.k());
}

SpectralSequence shift(const SpectralSequence& s, cplx lambda) {
    return map_sequence(s, [lambda](cplx v) { return v + lambda; }, s.k());
}

SpectralSequence power(const SpectralSequence& s, cplx sigma) {
    if (!(sigma.real() > 0.0))
        throw input_error("power exponent needs Re sigma > 0");
    const int k = int(std::ceil(double(s.k()) / sigma.real()));
    return map_sequence(
        s, [sigma](cplx v) { return std::pow(v, sigma); }, std::max(k, 1));
}

SpectralSequence union_spectra(const SpectralSequence& a,
                               const SpectralSequence& b) {
    const double eps = std::min(a.epsilon(), b.epsilon());
    const int k = std::max(a.k(), b.k());
    if (a.is_finite() && b.is_finite()) {
        std::vector<SpectrumEntry> out;
        a.scan([&](const SpectrumEntry& e, std::size_t) {
            out.push_back(e);
            return true;
        });
        b.scan([&](const SpectrumEntry& e, std::size_t) {
            out.push_back(e);
            return true;
        });
        return SpectralSequence::finite(std::move(out), eps, k);
    }
    // Merge by real part; cursor state is only advanced inside the lazy
    // cache extension, which runs under the sequence lock.
    auto ia = std::make_shared<std::size_t>(0);
    auto ib = std::make_shared<std::size_t>(0);
    auto take = [a, b, ia, ib](std::size_t) -> SpectrumEntry {
        const bool a_done = a.is_finite() && *ia >= *a.count();
        const bool b_done = b.is_finite() && *ib >= *b.count();
        if (a_done) return b.entry((*ib)++);
        if (b_done) return a.entry((*ia)++);
        const SpectrumEntry ea = a.entry(*ia);
        const SpectrumEntry eb = b.entry(*ib);
        if (ea.value.real() <= eb.value.real()) {
            ++*ia;
            return ea;
        }
        ++*ib;
        return eb;
    };
    return SpectralSequence::lazy(take, eps, k);
}

KernelSplit kernel_split(const SpectralSequence& s, double zero_threshold) {
    // Zeros lie in the prefix with Re <= threshold of the Re-sorted order.
    std::vector<std::size_t> zero_indices;
    std::int64_t removed = 0;
    s.scan([&](const SpectrumEntry& e, std::size_t i) {
        if (std::abs(e.value) <= zero_threshold) {
            zero_indices.push_back(i);
            removed += e.mult;
        }
        return e.value.real() <= zero_threshold;
    });

    KernelSplit out;
    out.kernel_dimension = removed;
    if (zero_indices.empty()) {
        out.reduced = s;
        return out;
    }
    if (s.is_finite()) {
        std::vector<SpectrumEntry> kept;
        s.scan([&](const SpectrumEntry& e, std::size_t) {
            if (std::abs(e.value) > zero_threshold) kept.push_back(e);
            return true;
        });
        out.reduced = SpectralSequence::finite(std::move(kept), s.epsilon(),
                                               s.k());
        return out;
    }
    auto skipped = std::make_shared<std::vector<std::size_t>>(zero_indices);
    out.reduced = SpectralSequence::lazy(
        [s, skipped](std::size_t i) {
            std::size_t j = i;
            for (std::size_t z : *skipped) {
                if (z <= j) ++j;
            }
            return s.entry(j);
        },
        s.epsilon(), s.k());
    return out;
}

void require_kernel_free(const SpectralSequence& s, double zero_threshold,
                         std::size_t probe) {
    const std::size_t cap = std::max<std::size_t>(probe, 100000);
    for (std::size_t i = 0; i < cap; ++i) {
        if (s.is_finite() && i >= *s.count()) return;
        const SpectrumEntry e = s.entry(i);
        if (std::abs(e.value) <= zero_threshold)
            throw input_error(
                "sequence has a (generalized) kernel; use kernel_split "
                "before determinant work");
        // Sorted by Re: once past the threshold no zero can follow.
        if (e.value.real() > zero_threshold) return;
    }
}

// JSON ------------------------------------------------------------------------

SpectralSequence load_spectrum_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("bad spectrum JSON: ") + e.what());
    }
    if (!j.contains("epsilon") || !j.contains("k") || !j.contains("entries"))
        throw input_error(
            "spectrum JSON needs fields epsilon, k, entries");
    std::vector<SpectrumEntry> entries;
    for (const auto& e : j["entries"]) {
        SpectrumEntry se;
        se.value = cplx(e.value("re", 0.0), e.value("im", 0.0));
        se.mult = e.value("mult", std::int64_t(1));
        entries.push_back(se);
    }
    return SpectralSequence::finite(std::move(entries), j["epsilon"],
                                    j["k"]);
}

SpectralSequence load_spectrum_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot read spectrum file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_spectrum_json(ss.str());
}

std::string spectrum_to_json(const SpectralSequence& s) {
    if (!s.is_finite())
        throw input_error("only finite spectra serialize to JSON");
    nlohmann::json j;
    j["epsilon"] = s.epsilon();
    j["k"] = s.k();
    j["entries"] = nlohmann::json::array();
    s.scan([&](const SpectrumEntry& e, std::size_t) {
        j["entries"].push_back({{"re", e.value.real()},
                                {"im", e.value.imag()},
                                {"mult", e.mult}});
        return true;
    });
    return j.dump(2);
}

}  // namespace specdet
