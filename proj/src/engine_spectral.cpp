#include "fse/engine_spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "fse/basis.hpp"

namespace fse {
namespace spectral {

namespace {

struct Pick {
    int k1 = 0, k2 = 0;
    double mag = 0.0;
};

// Largest |rw| among canonical pair representatives, ties to the lowest
// row-major index.
Pick find_peak(const Spectrum& s) {
    Pick best;
    const int t = s.t;
    for (int k1 = 0; k1 < t; ++k1)
        for (int k2 = 0; k2 < t; ++k2) {
            const int p1 = (t - k1) % t;
            const int p2 = (t - k2) % t;
            if (static_cast<long long>(k1) * t + k2 > static_cast<long long>(p1) * t + p2)
                continue;
            const double m = std::abs(s.rw[static_cast<size_t>(k1) * t + k2]);
            if (m > best.mag) best = {k1, k2, m};
        }
    return best;
}

void verify_symmetry(const Spectrum& s) {
    const int t = s.t;
    double scale = 1.0;
    for (const auto& v : s.rw) scale = std::max(scale, std::abs(v));
    for (int k1 = 0; k1 < t; ++k1)
        for (int k2 = 0; k2 < t; ++k2) {
            const std::complex<double> a = s.rw[static_cast<size_t>(k1) * t + k2];
            const std::complex<double> b =
                s.rw[static_cast<size_t>((t - k1) % t) * t + (t - k2) % t];
            if (std::abs(a - std::conj(b)) > 1e-9 * scale)
                throw std::logic_error("spectral engine: conjugate symmetry lost");
        }
}

enum class Comp { constant, full_od };

void iterate(Spectrum& s, Comp comp, double gamma, int iterations) {
    if (iterations < 0) throw std::invalid_argument("fast_iterate: iterations must be >= 0");
    const int t = s.t;
    const size_t t2 = static_cast<size_t>(t) * t;
    if (s.rw.size() != t2 || s.w.size() != t2 || s.g.size() != t2)
        throw std::invalid_argument("fast_iterate: spectrum buffers not initialized");

    for (int it = 0; it < iterations && !s.converged; ++it) {
        const Pick peak = find_peak(s);
        if (s.initial_energy <= 0.0 || s.weighted_energy < 1e-12 * s.initial_energy ||
            peak.mag <= 0.0 || peak.mag < 1e-12 * s.initial_max) {
            s.converged = true;
            s.trace.converged = true;
            break;
        }

        const int u1 = peak.k1, u2 = peak.k2;
        const int v1 = (t - u1) % t, v2 = (t - u2) % t;
        const bool self = (u1 == v1 && u2 == v2);
        const std::complex<double> pre = s.rw[static_cast<size_t>(u1) * t + u2];
        const std::complex<double> p = pre / s.w0;

        std::complex<double> c;
        double gamma_eff = 1.0;
        bool degenerate = false;
        if (comp == Comp::constant) {
            c = gamma * p;
            gamma_eff = gamma;
        } else {
            std::complex<double> d{0.0, 0.0};
            for (int l1 = 0; l1 < t; ++l1) {
                const size_t wrow = static_cast<size_t>((u1 - l1 + t) % t) * t;
                int a2 = u2;
                for (int l2 = 0; l2 < t; ++l2) {
                    d += s.rw[static_cast<size_t>(l1) * t + l2] * s.w[wrow + a2];
                    a2 = (a2 == 0) ? t - 1 : a2 - 1;
                }
            }
            const double pw2 = std::abs(p) * s.w0 * s.w0;
            if (std::abs(d) < 1e-12 * pw2) {
                c = p;
                degenerate = true;
            } else {
                gamma_eff = std::min(std::abs(p * s.w0 * s.w0 / d), 1.0);
                c = gamma_eff * p;
            }
        }
        if (self) c = {c.real(), 0.0};

        // Energy bookkeeping from pre-update spectra.
        double delta;
        if (self) {
            delta = -2.0 * c.real() * pre.real() + c.real() * c.real() * s.w0;
        } else {
            const std::complex<double> w2u =
                s.w[static_cast<size_t>((2 * u1) % t) * t + (2 * u2) % t];
            delta = -4.0 * (std::conj(c) * pre).real() + 2.0 * std::norm(c) * s.w0 +
                    2.0 * (c * c * std::conj(w2u)).real();
        }
        s.weighted_energy = std::max(0.0, s.weighted_energy + delta);

        const std::complex<double> cc = std::conj(c);
        for (int k1 = 0; k1 < t; ++k1) {
            std::complex<double>* row = s.rw.data() + static_cast<size_t>(k1) * t;
            const std::complex<double>* wa = s.w.data() + static_cast<size_t>((k1 - u1 + t) % t) * t;
            const std::complex<double>* wb = s.w.data() + static_cast<size_t>((k1 - v1 + t) % t) * t;
            int a2 = (t - u2) % t;
            int b2 = (t - v2) % t;
            for (int k2 = 0; k2 < t; ++k2) {
                row[k2] -= c * wa[a2];
                if (!self) row[k2] -= cc * wb[b2];
                a2 = (a2 + 1 == t) ? 0 : a2 + 1;
                b2 = (b2 + 1 == t) ? 0 : b2 + 1;
            }
        }

        const double scale = static_cast<double>(t) * t;
        s.g[static_cast<size_t>(u1) * t + u2] += scale * c;
        if (!self) s.g[static_cast<size_t>(v1) * t + v2] += scale * cc;

        s.nu += 1;
        IterationRecord rec;
        rec.nu = s.nu;
        rec.u = {u1, u2};
        rec.p = p;
        rec.c = c;
        rec.gamma_effective = gamma_eff;
        rec.weighted_energy = s.weighted_energy;
        rec.compensation_degenerate = degenerate;
        s.trace.records.push_back(rec);

        if (s.debug_checks) verify_symmetry(s);
    }
}

}  // namespace

Spectrum init_spectra(const SampleGrid& f, const RegionMask& mask, const WeightField& weight,
                      int t) {
    if (f.height != mask.height || f.width != mask.width || f.height != weight.height ||
        f.width != weight.width)
        throw std::invalid_argument("init_spectra: signal, mask and weight shapes differ");
    if (f.height > t || f.width > t)
        throw std::invalid_argument("init_spectra: window exceeds the transform grid");

    Spectrum s;
    s.t = t;
    s.window_width = f.width;
    s.window_height = f.height;

    SampleGrid fw(f.width, f.height, 0.0);
    SampleGrid wg(f.width, f.height, 0.0);
    double energy = 0.0;
    for (int r = 0; r < f.height; ++r)
        for (int c = 0; c < f.width; ++c) {
            const double wv = weight.at(r, c);
            if (wv == 0.0) continue;
            const double v = mask.at(r, c) == Region::support ? f.at(r, c) : 0.0;
            fw.at(r, c) = wv * v;
            wg.at(r, c) = wv;
            energy += wv * v * v;
        }

    const BasisSet basis(BasisKind::dft2d, t);
    s.rw = decompose(fw, basis).c;
    s.w = decompose(wg, basis).c;
    s.g.assign(static_cast<size_t>(t) * t, {0.0, 0.0});
    s.w0 = s.w[0].real();
    s.weighted_energy = energy;
    s.initial_energy = energy;
    for (const auto& v : s.rw) s.initial_max = std::max(s.initial_max, std::abs(v));
    return s;
}

void fast_iterate(Spectrum& spec, double gamma, int iterations) {
    if (!(gamma > 0.0) || gamma > 1.0)
        throw std::invalid_argument("fast_iterate: gamma must lie in (0, 1]");
    iterate(spec, Comp::constant, gamma, iterations);
}

void fast_iterate_full_od(Spectrum& spec, int iterations) {
    iterate(spec, Comp::full_od, 0.0, iterations);
}

SampleGrid synthesize_model(const Spectrum& spec) {
    const BasisSet basis(BasisKind::dft2d, spec.t);
    CoeffGrid cg(spec.t);
    cg.c = spec.g;
    double max_imag = 0.0;
    SampleGrid full = synthesize(cg, basis, &max_imag);
    if (max_imag > 1e-9)
        throw std::runtime_error("synthesize_model: conjugate symmetry violated");

    SampleGrid out(spec.window_width, spec.window_height, 0.0);
    for (int r = 0; r < spec.window_height; ++r)
        for (int c = 0; c < spec.window_width; ++c) out.at(r, c) = full.at(r, c);
    return out;
}

}  // namespace spectral
}  // namespace fse
