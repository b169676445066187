#pragma once

#include <atomic>
#include <complex>

namespace fse {

// Global tallies of 2D DFT executions, used to verify structurally that the
// spectral engine never transforms after initialization.
struct TransformCounters {
    std::atomic<std::int64_t> forward{0};
    std::atomic<std::int64_t> inverse{0};
};

TransformCounters& transform_counters();

// Unnormalized 2D DFT over a T x T complex grid, row-major.
// forward: negative exponent; inverse: positive exponent, no 1/T^2 scaling.
void dft2d_forward(int t, const std::complex<double>* in, std::complex<double>* out);
void dft2d_inverse(int t, const std::complex<double>* in, std::complex<double>* out);

}  // namespace fse
