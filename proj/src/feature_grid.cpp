#include "ddis/feature_grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace ddis {

namespace {

// h, s, v all in [0,1]; h is the angle divided by 360.
std::array<double, 3> rgb_to_hsv(double r, double g, double b) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  double h = 0.0;
  if (delta > 0.0) {
    if (mx == r)
      h = std::fmod((g - b) / delta, 6.0);
    else if (mx == g)
      h = (b - r) / delta + 2.0;
    else
      h = (r - g) / delta + 4.0;
    h /= 6.0;
    if (h < 0.0) h += 1.0;
  }
  const double s = mx > 0.0 ? delta / mx : 0.0;
  return {h, s, mx};
}

}  // namespace

FeatureGrid extract_patch_features(const Image& img, const PatchSpec& spec) {
  const int p = spec.patch_size;
  if (p < 1 || p % 2 == 0)
    throw std::invalid_argument("patch_size must be odd and positive");
  if (img.width < p || img.height < p)
    throw std::invalid_argument("image smaller than patch size");

  FeatureGrid grid;
  grid.width = img.width - p + 1;
  grid.height = img.height - p + 1;
  grid.origin_offset = (p - 1) / 2;
  grid.data.resize(static_cast<Eigen::Index>(p) * p * 3,
                   static_cast<Eigen::Index>(grid.width) * grid.height);

  for (int gy = 0; gy < grid.height; ++gy) {
    for (int gx = 0; gx < grid.width; ++gx) {
      auto col = grid.data.col(grid.cell_index(gx, gy));
      Eigen::Index k = 0;
      for (int dy = 0; dy < p; ++dy) {
        for (int dx = 0; dx < p; ++dx) {
          const double r = img.at(gx + dx, gy + dy, 0) / 255.0;
          const double g = img.at(gx + dx, gy + dy, 1) / 255.0;
          const double b = img.at(gx + dx, gy + dy, 2) / 255.0;
          if (spec.color_space == ColorSpace::HSV) {
            const auto hsv = rgb_to_hsv(r, g, b);
            col[k++] = hsv[0];
            col[k++] = hsv[1];
            col[k++] = hsv[2];
          } else {
            col[k++] = r;
            col[k++] = g;
            col[k++] = b;
          }
        }
      }
    }
  }
  return grid;
}

FeatureGrid standardize(const FeatureGrid& grid) {
  if (grid.cells() < 2)
    throw std::invalid_argument("standardize requires at least two cells");
  FeatureGrid out = grid;
  const auto n = static_cast<double>(grid.cells());
  for (Eigen::Index c = 0; c < grid.dim(); ++c) {
    auto row = out.data.row(c);
    const double mean = row.mean();
    row.array() -= mean;
    const double sd = std::sqrt(row.squaredNorm() / n);
    // Pure rounding residue on a constant dimension must not explode into
    // unit-scale noise; treat it as zero variance.
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
      row.setZero();
    } else {
      row /= sd;
    }
  }
  return out;
}

FeatureGrid load_feature_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open feature map: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "FMAP", 4) != 0)
    throw std::runtime_error("bad feature map magic (expected FMAP): " + path);

  std::uint32_t dims[3];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in) throw std::runtime_error("truncated feature map header: " + path);
  const std::uint32_t w = dims[0], h = dims[1], d = dims[2];
  if (w == 0 || h == 0 || d == 0 || w > (1u << 24) || h > (1u << 24) || d > (1u << 24))
    throw std::runtime_error("feature map dimensions out of range: " + path);

  const std::size_t count = static_cast<std::size_t>(w) * h * d;
  std::vector<float> payload(count);
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float))
    throw std::runtime_error("feature map payload size mismatch: " + path);

  FeatureGrid grid;
  grid.width = static_cast<int>(w);
  grid.height = static_cast<int>(h);
  grid.origin_offset = 0;
  grid.data.resize(d, static_cast<Eigen::Index>(w) * h);
  for (Eigen::Index cell = 0; cell < grid.cells(); ++cell)
    for (Eigen::Index k = 0; k < grid.dim(); ++k)
      grid.data(k, cell) = payload[static_cast<std::size_t>(cell) * d + k];
  return grid;
}

void save_feature_map(const FeatureGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write feature map: " + path);
  out.write("FMAP", 4);
  const std::uint32_t dims[3] = {static_cast<std::uint32_t>(grid.width),
                                 static_cast<std::uint32_t>(grid.height),
                                 static_cast<std::uint32_t>(grid.dim())};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  std::vector<float> payload(static_cast<std::size_t>(grid.cells()) * grid.dim());
  for (Eigen::Index cell = 0; cell < grid.cells(); ++cell)
    for (Eigen::Index k = 0; k < grid.dim(); ++k)
      payload[static_cast<std::size_t>(cell) * grid.dim() + k] =
          static_cast<float>(grid.data(k, cell));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(float)));
  if (!out) throw std::runtime_error("failed writing feature map: " + path);
}

}  // namespace ddis
