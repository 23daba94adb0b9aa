#pragma once

#include <Eigen/Dense>

namespace ddis {

/// Affine projection x -> basis * (x - mean). Rows of `basis` are the
/// principal directions, mutually orthonormal, ordered by descending
/// eigenvalue of the sample covariance. Sign convention: each row's
/// largest-magnitude entry is nonnegative, which makes the fit
/// deterministic.
struct PcaProjection {
  Eigen::VectorXd mean;   // d
  Eigen::MatrixXd basis;  // d' x d

  Eigen::Index in_dim() const { return basis.cols(); }
  Eigen::Index out_dim() const { return basis.rows(); }

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return basis * (x - mean);
  }
  Eigen::MatrixXd apply_all(const Eigen::Ref<const Eigen::MatrixXd>& xs) const {
    return basis * (xs.colwise() - mean);
  }

  /// The identity projection (mean 0, basis I). Queries then see the
  /// original coordinates bit-for-bit.
  static PcaProjection identity(Eigen::Index d) {
    return {Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d)};
  }
};

/// Fits a PCA projection to the columns of `samples` (d x n, n >= 2),
/// keeping the top `out_dim` principal directions.
PcaProjection fit_pca(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                      Eigen::Index out_dim);

}  // namespace ddis
