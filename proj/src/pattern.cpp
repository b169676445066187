#include "fse/pattern.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fse {

namespace {

int fit_count(int dim, int block, int spacing) {
    return 1 + (dim - block) / spacing;
}

bool overlap(const Rect& a, const Rect& b) {
    return a.row < b.row + b.height && b.row < a.row + a.height && a.col < b.col + b.width &&
           b.col < a.col + a.width;
}

}  // namespace

LossPattern generate_grid_pattern(int image_width, int image_height, int block_size, int spacing,
                                  int count_limit) {
    if (block_size < 1) throw std::invalid_argument("grid pattern: block size must be >= 1");
    if (count_limit < 1) throw std::invalid_argument("grid pattern: count limit must be >= 1");
    if (image_width < block_size || image_height < block_size)
        throw std::invalid_argument("grid pattern: image smaller than one block");
    if (spacing < block_size + 16)
        throw std::invalid_argument(
            "grid pattern: spacing must leave a support frame (>= block size + 16)");

    int rows = fit_count(image_height, block_size, spacing);
    int cols = fit_count(image_width, block_size, spacing);
    while (rows * cols > count_limit) {
        if (rows >= cols)
            --rows;
        else
            --cols;
    }

    LossPattern p;
    p.image_width = image_width;
    p.image_height = image_height;
    p.block_height = block_size;
    p.block_width = block_size;
    const int off_r = (image_height - ((rows - 1) * spacing + block_size)) / 2;
    const int off_c = (image_width - ((cols - 1) * spacing + block_size)) / 2;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            p.blocks.push_back({off_r + r * spacing, off_c + c * spacing, block_size, block_size});
    validate_pattern(p);
    return p;
}

void validate_pattern(const LossPattern& pattern) {
    for (size_t i = 0; i < pattern.blocks.size(); ++i) {
        const Rect& b = pattern.blocks[i];
        if (b.height != pattern.block_height || b.width != pattern.block_width)
            throw std::invalid_argument("pattern: blocks must share one size");
        if (b.row < 0 || b.col < 0 || b.height < 1 || b.width < 1 ||
            b.row + b.height > pattern.image_height || b.col + b.width > pattern.image_width)
            throw std::invalid_argument("pattern: block " + std::to_string(i) +
                                        " exceeds image bounds");
        for (size_t j = 0; j < i; ++j)
            if (overlap(b, pattern.blocks[j]))
                throw std::invalid_argument("pattern: blocks " + std::to_string(j) + " and " +
                                            std::to_string(i) + " overlap");
    }
}

LossPattern load_pattern(const std::string& path, int image_width, int image_height) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");

    LossPattern p;
    p.image_width = image_width;
    p.image_height = image_height;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        Rect b;
        if (!(ls >> b.row)) continue;  // blank or comment-only line
        if (!(ls >> b.col >> b.height >> b.width))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 'row col height width'");
        if (p.blocks.empty()) {
            p.block_height = b.height;
            p.block_width = b.width;
        }
        p.blocks.push_back(b);
    }
    validate_pattern(p);
    return p;
}

void save_pattern(const std::string& path, const LossPattern& pattern) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "# " << pattern.blocks.size() << " lost blocks, row col height width\n";
    for (const Rect& b : pattern.blocks)
        out << b.row << " " << b.col << " " << b.height << " " << b.width << "\n";
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace fse
