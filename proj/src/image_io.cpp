#include "fse/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace fse {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

// Reads the next integer token, skipping whitespace and '#' comment lines.
int next_pnm_int(std::istream& in, const std::string& path) {
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (!std::isspace(ch)) break;
    }
    if (ch == EOF) fail(path, "truncated PGM header");
    int value = 0;
    bool any = false;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        any = true;
        ch = in.get();
    }
    if (!any) fail(path, "malformed PGM header");
    if (ch != EOF) in.unget();
    return value;
}

}  // namespace

SampleGrid read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '5') fail(path, "not a binary PGM (P5)");

    const int width = next_pnm_int(in, path);
    const int height = next_pnm_int(in, path);
    const int maxval = next_pnm_int(in, path);
    if (width < 1 || height < 1) fail(path, "bad PGM dimensions");
    if (maxval != 255) fail(path, "only 8-bit PGM (maxval 255) is supported");
    in.get();  // single whitespace byte before the raster

    std::vector<unsigned char> raw(static_cast<size_t>(width) * height);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size()) fail(path, "truncated PGM raster");

    SampleGrid img(width, height, 0.0);
    for (size_t i = 0; i < raw.size(); ++i) img.samples[i] = raw[i];
    return img;
}

void write_pgm(const std::string& path, const SampleGrid& img) {
    if (img.width < 1 || img.height < 1)
        throw std::invalid_argument("write_pgm: empty image");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> raw(img.samples.size());
    for (size_t i = 0; i < raw.size(); ++i) {
        const double v = std::round(img.samples[i]);
        raw[i] = static_cast<unsigned char>(v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) fail(path, "write failed");
}

SampleGrid read_png(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) fail(path, "cannot open");

    unsigned char sig[8];
    if (std::fread(sig, 1, 8, fp) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        std::fclose(fp);
        fail(path, "not a PNG file");
    }

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        fail(path, "libpng initialization failed");
    }

    std::vector<unsigned char> data;
    std::vector<png_bytep> rows;
    int width = 0, height = 0, channels = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        fail(path, "PNG decode error");
    }

    png_init_io(png, fp);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    png_set_expand(png);          // palette -> rgb, low-depth gray -> 8 bit
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        fail(path, "unsupported PNG channel layout");
    }

    const size_t rowbytes = png_get_rowbytes(png, info);
    data.resize(rowbytes * static_cast<size_t>(height));
    rows.resize(height);
    for (int r = 0; r < height; ++r) rows[r] = data.data() + rowbytes * static_cast<size_t>(r);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);

    SampleGrid img(width, height, 0.0);
    for (int r = 0; r < height; ++r) {
        const unsigned char* row = data.data() + rowbytes * static_cast<size_t>(r);
        for (int c = 0; c < width; ++c) {
            if (channels == 1) {
                img.at(r, c) = row[c];
            } else {
                const double y =
                    0.299 * row[3 * c] + 0.587 * row[3 * c + 1] + 0.114 * row[3 * c + 2];
                img.at(r, c) = std::round(y);
            }
        }
    }
    return img;
}

SampleGrid read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    unsigned char sig[2] = {0, 0};
    in.read(reinterpret_cast<char*>(sig), 2);
    in.close();
    if (sig[0] == 'P' && sig[1] == '5') return read_pgm(path);
    if (sig[0] == 0x89 && sig[1] == 'P') return read_png(path);
    fail(path, "unrecognized image format (expected PGM P5 or PNG)");
}

}  // namespace fse
