#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <utility>

namespace ddis {

/// An ordered set of points. Column j of `appearance` is the d-dimensional
/// appearance vector of point j; column ordering is stable and index
/// identity matters (nearest-neighbor ties break toward the smaller index).
/// `locations`, when present, carries one 2D coordinate per point.
struct PointSet {
  Eigen::MatrixXd appearance;                  // d x n
  std::optional<Eigen::Matrix2Xd> locations;   // 2 x n, all points or none

  PointSet() = default;

  explicit PointSet(Eigen::MatrixXd appearance_in)
      : appearance(std::move(appearance_in)) {
    if (appearance.cols() == 0) throw std::invalid_argument("PointSet: empty set");
  }

  PointSet(Eigen::MatrixXd appearance_in, Eigen::Matrix2Xd locations_in)
      : appearance(std::move(appearance_in)), locations(std::move(locations_in)) {
    if (appearance.cols() == 0) throw std::invalid_argument("PointSet: empty set");
    if (locations->cols() != appearance.cols())
      throw std::invalid_argument("PointSet: locations count differs from point count");
  }

  Eigen::Index size() const { return appearance.cols(); }
  Eigen::Index dim() const { return appearance.rows(); }
  bool has_locations() const { return locations.has_value(); }
};

/// Result of one nearest-neighbor lookup.
struct NnEntry {
  Eigen::Index index = 0;  // index into the searched set
  double distance = 0.0;   // Euclidean appearance distance
};

}  // namespace ddis
