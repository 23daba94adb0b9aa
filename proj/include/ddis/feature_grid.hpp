#pragma once

#include <Eigen/Dense>

#include <string>

#include "ddis/image.hpp"

namespace ddis {

/// Grid of per-cell appearance descriptors. Column y*width + x of `data`
/// is the d-vector of cell (x, y). `origin_offset` is the pixel distance
/// from the image origin to the center of cell (0, 0): (patch_size-1)/2 for
/// patch grids, 0 for grids loaded from feature-map files.
struct FeatureGrid {
  int width = 0;
  int height = 0;
  int origin_offset = 0;
  Eigen::MatrixXd data;  // d x (width*height)

  Eigen::Index dim() const { return data.rows(); }
  Eigen::Index cells() const { return data.cols(); }
  Eigen::Index cell_index(int x, int y) const {
    return static_cast<Eigen::Index>(y) * width + x;
  }
  auto cell(int x, int y) const { return data.col(cell_index(x, y)); }
};

enum class ColorSpace { RGB, HSV };

/// Descriptor recipe: odd patch_size, samples scaled to [0,1], descriptor
/// length patch_size^2 * 3.
struct PatchSpec {
  int patch_size = 3;
  ColorSpace color_space = ColorSpace::RGB;
};

/// One descriptor per fully-interior patch center: the row-major,
/// channel-interleaved samples of the patch, scaled to [0,1] (converted to
/// HSV per pixel when requested). Output is (W-p+1) x (H-p+1) cells.
FeatureGrid extract_patch_features(const Image& img, const PatchSpec& spec);

/// Shifts/scales each descriptor dimension independently to empirical mean 0
/// and unit standard deviation (population form). A dimension with zero
/// variance maps to all-zeros. Requires at least two cells.
FeatureGrid standardize(const FeatureGrid& grid);

/// FMAP is the binary interchange format for externally produced feature
/// maps: magic "FMAP", then width, height, d as unsigned 32-bit
/// little-endian, then width*height*d IEEE-754 32-bit little-endian floats,
/// row-major with the d values of a cell contiguous.
FeatureGrid load_feature_map(const std::string& path);
void save_feature_map(const FeatureGrid& grid, const std::string& path);

}  // namespace ddis
