#pragma once

#include <Eigen/Dense>

#include <optional>

#include "ddis/kdtree.hpp"
#include "ddis/pca.hpp"

namespace ddis {

/// Approximate-NN search knobs. epsilon is the standard multiplicative
/// kd-tree slack: returned distance <= (1+epsilon) * exact distance, in the
/// reduced space. reduced_dim is clamped to the data dimension at build
/// time. propagation lets the matcher seed each query with the previous
/// cell's match (one-step spatial coherence). identity_projection skips the
/// PCA entirely so reduced space == original space, bit for bit.
struct AnnParams {
  double epsilon = 2.0;
  int reduced_dim = 9;
  bool propagation = true;
  bool identity_projection = false;
};

struct AnnQueryResult {
  Eigen::Index index = 0;
  double reduced_distance = 0.0;
};

/// PCA projection plus a kd-tree over the reduced template points.
/// Immutable after construction; concurrent queries are safe. Entry i of
/// the tree maps back to template point i, and location(i) returns that
/// point's original 2D coordinates.
class AnnIndex {
 public:
  AnnIndex(const Eigen::Ref<const Eigen::MatrixXd>& features,   // d x n
           const Eigen::Ref<const Eigen::Matrix2Xd>& locations,  // 2 x n
           const AnnParams& params);

  AnnQueryResult query(const Eigen::Ref<const Eigen::VectorXd>& feature,
                       std::optional<Eigen::Index> seed = std::nullopt) const;

  Eigen::Index size() const { return tree_.size(); }
  const PcaProjection& projection() const { return projection_; }
  const Eigen::MatrixXd& reduced_points() const { return tree_.points(); }
  Eigen::Vector2d location(Eigen::Index i) const { return locations_.col(i); }
  const AnnParams& params() const { return params_; }

 private:
  AnnParams params_;
  PcaProjection projection_;
  KdTree<double> tree_;
  Eigen::Matrix2Xd locations_;
};

}  // namespace ddis
