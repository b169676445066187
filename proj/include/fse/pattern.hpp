#pragma once

#include <string>
#include <vector>

#include "fse/grid.hpp"

namespace fse {

// Set of lost blocks over one image. Blocks share a single size.
struct LossPattern {
    int image_width = 0;
    int image_height = 0;
    int block_height = 0;
    int block_width = 0;
    std::vector<Rect> blocks;
};

// Centered regular grid of isolated square losses. The per-axis count is what
// fits at the given spacing, then shrunk (larger axis first) until the total
// is at most count_limit. spacing must leave a full support frame between
// blocks (>= block_size + 16).
LossPattern generate_grid_pattern(int image_width, int image_height, int block_size, int spacing,
                                  int count_limit = 81);

// Bounds, uniform block size, pairwise disjointness. Throws on violation.
void validate_pattern(const LossPattern& pattern);

// Text format: one "row col height width" line per block, '#' comments.
LossPattern load_pattern(const std::string& path, int image_width, int image_height);
void save_pattern(const std::string& path, const LossPattern& pattern);

}  // namespace fse
