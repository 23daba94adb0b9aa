#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ddis {

/// 8-bit RGB image, row-major, pixel-interleaved.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // width * height * 3 samples

  Image() = default;
  Image(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
};

/// Reads a binary PPM (P6, maxval 255). Throws std::runtime_error with a
/// distinct message for a missing file, a malformed header, or a truncated
/// payload.
Image load_image(const std::string& path);

/// Writes a binary PPM (P6, maxval 255).
void save_image(const Image& img, const std::string& path);

/// Returns the axis-aligned crop [x, x+w) x [y, y+h); must lie inside img.
Image crop(const Image& img, int x, int y, int w, int h);

/// Writes a 16-bit big-endian PGM (P5, maxval 65535) of `values` (row-major,
/// width*height), min-max scaled; a constant input writes all zeros.
void save_pgm16(const std::vector<double>& values, int width, int height,
                const std::string& path);

}  // namespace ddis
