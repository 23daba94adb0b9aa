#include "ddis/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace ddis {

namespace {

// Skips whitespace and '#' comment lines, then reads one unsigned decimal
// token. PPM headers allow comments anywhere between tokens.
bool read_header_uint(std::istream& in, int& out) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c)) return false;
  long value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    if (value > 1 << 30) return false;
    c = in.get();
  }
  if (c != EOF) in.unget();
  out = static_cast<int>(value);
  return true;
}

}  // namespace

Image load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image file: " + path);

  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '6')
    throw std::runtime_error("malformed PPM header (expected P6): " + path);

  int w = 0, h = 0, maxval = 0;
  if (!read_header_uint(in, w) || !read_header_uint(in, h) ||
      !read_header_uint(in, maxval) || w <= 0 || h <= 0)
    throw std::runtime_error("malformed PPM header (bad dimensions): " + path);
  if (maxval != 255)
    throw std::runtime_error("malformed PPM header (maxval must be 255): " + path);
  in.get();  // the single whitespace byte before the payload

  Image img(w, h);
  in.read(reinterpret_cast<char*>(img.data.data()),
          static_cast<std::streamsize>(img.data.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.data.size())
    throw std::runtime_error("truncated PPM payload: " + path);
  return img;
}

void save_image(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image file: " + path);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
  if (!out) throw std::runtime_error("failed writing image file: " + path);
}

Image crop(const Image& img, int x, int y, int w, int h) {
  if (x < 0 || y < 0 || w < 1 || h < 1 || x + w > img.width || y + h > img.height)
    throw std::invalid_argument("crop rectangle outside image bounds");
  Image out(w, h);
  for (int yy = 0; yy < h; ++yy)
    for (int xx = 0; xx < w; ++xx)
      for (int c = 0; c < 3; ++c) out.at(xx, yy, c) = img.at(x + xx, y + yy, c);
  return out;
}

void save_pgm16(const std::vector<double>& values, int width, int height,
                const std::string& path) {
  if (values.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("save_pgm16: value count does not match dimensions");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write PGM file: " + path);
  out << "P5\n" << width << " " << height << "\n65535\n";
  for (const double v : values) {
    const auto s = static_cast<std::uint16_t>(std::lround((v - lo) * scale));
    const char bytes[2] = {static_cast<char>(s >> 8), static_cast<char>(s & 0xff)};
    out.write(bytes, 2);
  }
  if (!out) throw std::runtime_error("failed writing PGM file: " + path);
}

}  // namespace ddis
