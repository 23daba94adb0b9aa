#pragma once

#include <Eigen/Dense>

#include "ddis/point_set.hpp"

namespace ddis {

/// Exact nearest neighbor of `query` among the columns of `points`,
/// by Euclidean distance. Equal distances resolve to the smallest index.
NnEntry exact_nn(const Eigen::Ref<const Eigen::VectorXd>& query,
                 const Eigen::Ref<const Eigen::MatrixXd>& points);

/// Best-Buddies Similarity: the number of mutual-NN pairs between P and Q,
/// normalized by 1/min{|P|,|Q|}. Appearance only; locations are ignored.
/// Symmetric in its arguments.
double bbs(const PointSet& p, const PointSet& q);

/// Diversity Similarity, directed Q -> P: the number of distinct points of P
/// chosen as the appearance-NN of at least one point of Q, normalized by
/// 1/min{|P|,|Q|}.
double dis(const PointSet& q, const PointSet& p);

/// kappa[i] = number of points of Q whose appearance-NN in P is point i.
/// The counts always sum to |Q|.
Eigen::VectorXi kappa(const PointSet& q, const PointSet& p);

/// Deformable Diversity Similarity, directed Q -> P:
///   (1/min{|P|,|Q|}) * sum_j  exp(1 - kappa(nn_j)) / (r_j + 1)
/// where nn_j is the appearance-NN of q_j in P and r_j the Euclidean
/// distance between the two points' locations. If either set carries no
/// locations, all r_j are taken as 0 (pure diversity form).
double ddis(const PointSet& q, const PointSet& p);

}  // namespace ddis
