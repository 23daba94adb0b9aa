#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ddis {

/// Median-split kd-tree over the columns of a dim x n matrix, answering
/// epsilon-approximate nearest-neighbor queries: the returned point's
/// distance is at most (1+eps) times the true minimum. With eps = 0 the
/// search is exact and ties resolve to the smallest column index. Queries
/// are const and safe to issue from many threads.
template <typename Scalar>
class KdTree {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Result {
    Eigen::Index index = -1;
    Scalar dist_sq = std::numeric_limits<Scalar>::infinity();
  };

  KdTree() = default;

  explicit KdTree(Matrix points, Eigen::Index leaf_size = 16)
      : points_(std::move(points)), leaf_size_(std::max<Eigen::Index>(leaf_size, 1)) {
    if (points_.cols() == 0) throw std::invalid_argument("KdTree: no points");
    order_.resize(static_cast<std::size_t>(points_.cols()));
    std::iota(order_.begin(), order_.end(), Eigen::Index{0});
    nodes_.reserve(static_cast<std::size_t>(2 * points_.cols() / leaf_size_ + 2));
    root_ = build(0, points_.cols());
  }

  const Matrix& points() const { return points_; }
  Eigen::Index size() const { return points_.cols(); }

  /// seed, when given, pre-loads the search with that point as the
  /// incumbent, so the result is never worse than the seed.
  Result nn(const Eigen::Ref<const Vector>& query, Scalar eps,
            std::optional<Eigen::Index> seed = std::nullopt) const {
    if (query.size() != points_.rows())
      throw std::invalid_argument("KdTree: query dimension mismatch");
    Result best;
    if (seed) {
      best.index = *seed;
      best.dist_sq = (points_.col(*seed) - query).squaredNorm();
    }
    const Scalar one_plus_eps = Scalar(1) + eps;
    const Scalar shrink = Scalar(1) / (one_plus_eps * one_plus_eps);
    std::vector<Scalar> axis_gap(static_cast<std::size_t>(points_.rows()), Scalar(0));
    search(root_, query, Scalar(0), axis_gap, shrink, best);
    return best;
  }

 private:
  struct Node {
    int axis = -1;  // -1 marks a leaf
    Scalar split = 0;
    Eigen::Index left = -1, right = -1;  // children when internal
    Eigen::Index begin = 0, end = 0;     // order_ range when leaf
  };

  Eigen::Index build(Eigen::Index lo, Eigen::Index hi) {
    Node node;
    if (hi - lo <= leaf_size_) {
      node.begin = lo;
      node.end = hi;
    } else {
      // Split the widest axis at the median; ties in coordinate order by
      // index so the layout is deterministic.
      Eigen::Index axis = 0;
      Scalar best_spread = -1;
      for (Eigen::Index a = 0; a < points_.rows(); ++a) {
        Scalar mn = points_(a, order_[static_cast<std::size_t>(lo)]);
        Scalar mx = mn;
        for (Eigen::Index i = lo + 1; i < hi; ++i) {
          const Scalar v = points_(a, order_[static_cast<std::size_t>(i)]);
          mn = std::min(mn, v);
          mx = std::max(mx, v);
        }
        if (mx - mn > best_spread) {
          best_spread = mx - mn;
          axis = a;
        }
      }
      const Eigen::Index mid = lo + (hi - lo) / 2;
      std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                       [&](Eigen::Index a, Eigen::Index b) {
                         const Scalar va = points_(axis, a), vb = points_(axis, b);
                         return va < vb || (va == vb && a < b);
                       });
      node.axis = static_cast<int>(axis);
      node.split = points_(axis, order_[static_cast<std::size_t>(mid)]);
      const auto id = static_cast<Eigen::Index>(nodes_.size());
      nodes_.push_back(node);
      const Eigen::Index left = build(lo, mid);
      const Eigen::Index right = build(mid, hi);
      nodes_[static_cast<std::size_t>(id)].left = left;
      nodes_[static_cast<std::size_t>(id)].right = right;
      return id;
    }
    nodes_.push_back(node);
    return static_cast<Eigen::Index>(nodes_.size()) - 1;
  }

  // box_sq is the squared distance from the query to the node's region as
  // accumulated via axis_gap (one squared offset per axis). A subtree is
  // visited iff box_sq <= best.dist_sq * shrink, which both enforces the
  // (1+eps) contract and, at eps = 0, keeps equal-distance candidates
  // reachable so ties resolve to the smallest index.
  void search(Eigen::Index node_id, const Eigen::Ref<const Vector>& query,
              Scalar box_sq, std::vector<Scalar>& axis_gap, Scalar shrink,
              Result& best) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.axis < 0) {
      for (Eigen::Index i = node.begin; i < node.end; ++i) {
        const Eigen::Index p = order_[static_cast<std::size_t>(i)];
        const Scalar sq = (points_.col(p) - query).squaredNorm();
        if (sq < best.dist_sq || (sq == best.dist_sq && p < best.index)) {
          best.dist_sq = sq;
          best.index = p;
        }
      }
      return;
    }
    const Scalar diff = query[node.axis] - node.split;
    const Eigen::Index near = diff < 0 ? node.left : node.right;
    const Eigen::Index far = diff < 0 ? node.right : node.left;
    search(near, query, box_sq, axis_gap, shrink, best);

    const Scalar saved = axis_gap[static_cast<std::size_t>(node.axis)];
    const Scalar far_box_sq = box_sq - saved + diff * diff;
    if (far_box_sq <= best.dist_sq * shrink) {
      axis_gap[static_cast<std::size_t>(node.axis)] = diff * diff;
      search(far, query, far_box_sq, axis_gap, shrink, best);
      axis_gap[static_cast<std::size_t>(node.axis)] = saved;
    }
  }

  Matrix points_;
  Eigen::Index leaf_size_ = 16;
  std::vector<Eigen::Index> order_;
  std::vector<Node> nodes_;
  Eigen::Index root_ = 0;
};

}  // namespace ddis
