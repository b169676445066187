#include "fse/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fse {

namespace {

size_t checked_area(int w, int h) {
    if (w < 1 || h < 1) throw std::invalid_argument("grid dimensions must be >= 1");
    return static_cast<size_t>(w) * h;
}

}  // namespace

SampleGrid::SampleGrid(int w, int h, double fill)
    : width(w), height(h), samples(checked_area(w, h), fill) {}

size_t RegionMask::count(Region r) const {
    return static_cast<size_t>(std::count(labels.begin(), labels.end(), r));
}

double WeightField::sum() const {
    return std::accumulate(w.begin(), w.end(), 0.0);
}

namespace {

void check_rect(const Rect& r, int w, int h) {
    if (r.width < 1 || r.height < 1 || r.row < 0 || r.col < 0 ||
        r.row + r.height > h || r.col + r.width > w) {
        std::ostringstream os;
        os << "rect " << r.row << "," << r.col << " " << r.height << "x" << r.width
           << " out of bounds for " << w << "x" << h << " window";
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

RegionMask build_region_mask(int window_width, int window_height,
                             std::span<const Rect> missing_rects,
                             std::span<const Rect> outside_rects) {
    if (window_width < 1 || window_height < 1)
        throw std::invalid_argument("window dimensions must be >= 1");
    RegionMask mask;
    mask.width = window_width;
    mask.height = window_height;
    mask.labels.assign(static_cast<size_t>(window_width) * window_height, Region::support);

    auto paint = [&](std::span<const Rect> rects, Region label) {
        for (const Rect& r : rects) {
            check_rect(r, window_width, window_height);
            for (int row = r.row; row < r.row + r.height; ++row)
                for (int col = r.col; col < r.col + r.width; ++col) {
                    Region& cell = mask.labels[static_cast<size_t>(row) * window_width + col];
                    if (cell != Region::support && cell != label)
                        throw std::invalid_argument("missing and outside rects overlap");
                    cell = label;
                }
        }
    };
    paint(missing_rects, Region::missing);
    paint(outside_rects, Region::outside);

    if (mask.count(Region::support) == 0)
        throw std::invalid_argument("no support samples");
    return mask;
}

WeightField build_isotropic_weight(const RegionMask& mask, double rho_hat) {
    if (!(rho_hat > 0.0 && rho_hat < 1.0))
        throw std::invalid_argument("rho_hat must lie in (0,1)");
    WeightField f;
    f.width = mask.width;
    f.height = mask.height;
    f.rho_hat = rho_hat;
    f.center_row = (mask.height - 1) / 2.0;
    f.center_col = (mask.width - 1) / 2.0;
    f.w.assign(static_cast<size_t>(mask.width) * mask.height, 0.0);
    for (int row = 0; row < mask.height; ++row)
        for (int col = 0; col < mask.width; ++col) {
            if (mask.at(row, col) != Region::support) continue;
            const double d = std::hypot(row - f.center_row, col - f.center_col);
            f.w[static_cast<size_t>(row) * f.width + col] = std::pow(rho_hat, d);
        }
    return f;
}

std::string format_psnr(const PsnrResult& p) {
    if (p.identical) return "identical";
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(4);
    os << p.db;
    return os.str();
}

PsnrResult psnr(const SampleGrid& original, const SampleGrid& reconstructed,
                const RegionMask& mask, Region evaluate_on, double peak) {
    if (!original.same_shape(reconstructed) ||
        original.width != mask.width || original.height != mask.height)
        throw std::invalid_argument("psnr: shape mismatch");
    double sq = 0.0;
    size_t n = 0;
    for (int row = 0; row < mask.height; ++row)
        for (int col = 0; col < mask.width; ++col) {
            if (mask.at(row, col) != evaluate_on) continue;
            const double e = original.at(row, col) - reconstructed.at(row, col);
            sq += e * e;
            ++n;
        }
    if (n == 0) throw std::invalid_argument("psnr: no samples carry the evaluated label");
    if (sq == 0.0) return {true, 0.0};
    const double mse = sq / static_cast<double>(n);
    return {false, 10.0 * std::log10(peak * peak / mse)};
}

}  // namespace fse
