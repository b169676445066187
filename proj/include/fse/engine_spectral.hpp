#pragma once

#include <complex>
#include <vector>

#include "fse/grid.hpp"
#include "fse/trace.hpp"

namespace fse {

// Frequency-domain engine. After two forward transforms at initialization the
// whole iteration runs on T x T spectra; the model comes back through one
// inverse transform at the end.
namespace spectral {

struct Spectrum {
    int t = 0;
    int window_width = 0;
    int window_height = 0;
    std::vector<std::complex<double>> rw;  // weighted residual spectrum
    std::vector<std::complex<double>> w;   // weight spectrum
    std::vector<std::complex<double>> g;   // model spectrum, DFT scaling (T^2 * c)
    double w0 = 0.0;                       // w[0,0], the total weight
    double weighted_energy = 0.0;          // sum w * r^2, maintained incrementally
    double initial_energy = 0.0;
    double initial_max = 0.0;  // largest |rw| at initialization
    int nu = 0;
    bool converged = false;
    bool debug_checks = false;  // verify conjugate symmetry after every update
    Trace trace;

    std::complex<double>& at(std::vector<std::complex<double>>& v, int k1, int k2) const {
        return v[static_cast<size_t>(k1) * t + k2];
    }
};

// Exactly two forward transforms: the weighted signal and the weight field.
Spectrum init_spectra(const SampleGrid& f, const RegionMask& mask, const WeightField& weight,
                      int t);

// Constant-factor compensation (gamma == 1 reproduces the uncompensated
// update bit for bit). Runs at most `iterations` more selections.
void fast_iterate(Spectrum& spec, double gamma, int iterations);

// Per-selection compensation from the circulant identity
// K[u,l] = w[(u - l) mod T]; damping magnitude capped at 1.
void fast_iterate_full_od(Spectrum& spec, int iterations);

// One inverse transform; throws if the spectrum has lost conjugate symmetry.
// Returns the model cropped to the window.
SampleGrid synthesize_model(const Spectrum& spec);

}  // namespace spectral
}  // namespace fse
