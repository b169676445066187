#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fse/basis.hpp"
#include "fse/grid.hpp"

// Reference computations kept deliberately naive and table-free so they share
// no code path with the library under test.
namespace oracle {

inline std::complex<double> dft_phi(int t, int k1, int k2, int m, int n) {
    const double two_pi = 8.0 * std::atan(1.0);
    return std::polar(1.0, two_pi * (static_cast<double>(k1) * m + static_cast<double>(k2) * n) / t);
}

inline double dct_axis(int t, int k, int m) {
    const double pi = 4.0 * std::atan(1.0);
    const double alpha = k == 0 ? std::sqrt(1.0 / t) : std::sqrt(2.0 / t);
    return alpha * std::cos(pi * (2.0 * m + 1.0) * k / (2.0 * t));
}

inline std::complex<double> basis_value(fse::BasisKind kind, int t, fse::Index k, int m, int n) {
    if (kind == fse::BasisKind::dft2d) return dft_phi(t, k.k1, k.k2, m, n);
    return {dct_axis(t, k.k1, m) * dct_axis(t, k.k2, n), 0.0};
}

// Unnormalized forward DFT of a T x T complex grid, quadruple loop.
inline std::vector<std::complex<double>> naive_dft2d(int t,
                                                     const std::vector<std::complex<double>>& in) {
    std::vector<std::complex<double>> out(static_cast<size_t>(t) * t);
    for (int k1 = 0; k1 < t; ++k1)
        for (int k2 = 0; k2 < t; ++k2) {
            std::complex<double> acc = 0.0;
            for (int m = 0; m < t; ++m)
                for (int n = 0; n < t; ++n)
                    acc += in[static_cast<size_t>(m) * t + n] * std::conj(dft_phi(t, k1, k2, m, n));
            out[static_cast<size_t>(k1) * t + k2] = acc;
        }
    return out;
}

// num[k] = sum over the window of w * r * conj(phi_k).
inline std::complex<double> naive_correlation(const fse::SampleGrid& r, const fse::WeightField& w,
                                              fse::BasisKind kind, int t, fse::Index k) {
    std::complex<double> acc = 0.0;
    for (int m = 0; m < r.height; ++m)
        for (int n = 0; n < r.width; ++n)
            acc += w.at(m, n) * r.at(m, n) * std::conj(basis_value(kind, t, k, m, n));
    return acc;
}

inline double naive_norm(const fse::WeightField& w, fse::BasisKind kind, int t, fse::Index k) {
    double acc = 0.0;
    for (int m = 0; m < w.height; ++m)
        for (int n = 0; n < w.width; ++n)
            acc += w.at(m, n) * std::norm(basis_value(kind, t, k, m, n));
    return acc;
}

inline double weighted_energy(const fse::SampleGrid& r, const fse::WeightField& w) {
    double acc = 0.0;
    for (int m = 0; m < r.height; ++m)
        for (int n = 0; n < r.width; ++n) acc += w.at(m, n) * r.at(m, n) * r.at(m, n);
    return acc;
}

}  // namespace oracle

namespace testutil {

inline fse::SampleGrid random_grid(std::mt19937_64& rng, int width, int height, double lo = -1.0,
                                   double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    fse::SampleGrid g(width, height);
    for (double& v : g.samples) v = dist(rng);
    return g;
}

// Per-sample random support/missing labels with a floor on the support share.
inline fse::RegionMask random_mask(std::mt19937_64& rng, int width, int height,
                                   double missing_prob = 0.4, double min_support = 0.25) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (;;) {
        fse::RegionMask mask;
        mask.width = width;
        mask.height = height;
        mask.labels.assign(static_cast<size_t>(width) * height, fse::Region::support);
        for (auto& l : mask.labels)
            if (dist(rng) < missing_prob) l = fse::Region::missing;
        const size_t support = mask.count(fse::Region::support);
        if (support > 0 &&
            static_cast<double>(support) >= min_support * static_cast<double>(width) * height)
            return mask;
    }
}

// Weight field pinned to 1 on the support, bypassing the isotropic decay.
inline fse::WeightField uniform_weight(const fse::RegionMask& mask) {
    fse::WeightField w;
    w.width = mask.width;
    w.height = mask.height;
    w.rho_hat = 1.0;
    w.center_row = (mask.height - 1) / 2.0;
    w.center_col = (mask.width - 1) / 2.0;
    w.w.assign(static_cast<size_t>(mask.width) * mask.height, 0.0);
    for (int r = 0; r < mask.height; ++r)
        for (int c = 0; c < mask.width; ++c)
            if (mask.at(r, c) == fse::Region::support)
                w.w[static_cast<size_t>(r) * mask.width + c] = 1.0;
    return w;
}

inline fse::RegionMask all_support(int width, int height) {
    fse::RegionMask mask;
    mask.width = width;
    mask.height = height;
    mask.labels.assign(static_cast<size_t>(width) * height, fse::Region::support);
    return mask;
}

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<unsigned> counter{0};
        const auto base = std::filesystem::temp_directory_path();
        path = base / ("fse_test_" + std::to_string(::getpid()) + "_" +
                       std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace testutil
