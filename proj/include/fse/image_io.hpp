#pragma once

#include <string>

#include "fse/grid.hpp"

namespace fse {

// Binary 8-bit PGM (P5). Values come back as exact integers in [0, 255].
SampleGrid read_pgm(const std::string& path);

// Clamps to [0, 255] and rounds to nearest integer at output.
void write_pgm(const std::string& path, const SampleGrid& img);

// Grayscale or color PNG; color collapses to BT.601 luma, rounded.
SampleGrid read_png(const std::string& path);

// Dispatch on the file's magic bytes (PGM or PNG).
SampleGrid read_image(const std::string& path);

}  // namespace fse
