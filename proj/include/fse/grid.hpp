#pragma once

#include <span>
#include <string>
#include <vector>

namespace fse {

// 2D real-valued sample array, row-major.
struct SampleGrid {
    int width = 0;
    int height = 0;
    std::vector<double> samples;

    SampleGrid() = default;
    SampleGrid(int w, int h, double fill = 0.0);

    double& at(int row, int col) { return samples[static_cast<size_t>(row) * width + col]; }
    double at(int row, int col) const { return samples[static_cast<size_t>(row) * width + col]; }
    bool same_shape(const SampleGrid& other) const {
        return width == other.width && height == other.height;
    }
};

enum class Region : unsigned char {
    support,  // known samples the model is fitted to
    missing,  // samples to be estimated
    outside,  // ignored entirely (image borders, neighbouring losses)
};

struct Rect {
    int row = 0;
    int col = 0;
    int height = 0;
    int width = 0;
};

// Per-sample region label over a window.
struct RegionMask {
    int width = 0;
    int height = 0;
    std::vector<Region> labels;

    Region at(int row, int col) const { return labels[static_cast<size_t>(row) * width + col]; }
    size_t count(Region r) const;
};

RegionMask build_region_mask(int window_width, int window_height,
                             std::span<const Rect> missing_rects,
                             std::span<const Rect> outside_rects = {});

// Isotropic confidence weighting: w = rho_hat^distance on support, 0 elsewhere.
struct WeightField {
    int width = 0;
    int height = 0;
    std::vector<double> w;
    double rho_hat = 0.0;
    double center_row = 0.0;
    double center_col = 0.0;

    double at(int row, int col) const { return w[static_cast<size_t>(row) * width + col]; }
    double sum() const;
};

WeightField build_isotropic_weight(const RegionMask& mask, double rho_hat);

// identical == true encodes MSE == 0, an infinite PSNR; db is valid otherwise.
struct PsnrResult {
    bool identical = false;
    double db = 0.0;
};

std::string format_psnr(const PsnrResult& p);

PsnrResult psnr(const SampleGrid& original, const SampleGrid& reconstructed,
                const RegionMask& mask, Region evaluate_on, double peak);

}  // namespace fse
