#include "ddis/measures.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ddis {

namespace {

void check_dims(const PointSet& a, const PointSet& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("point sets have mismatched appearance dimensions");
}

// NN index of every column of `queries` among the columns of `points`.
std::vector<Eigen::Index> nn_field(const Eigen::MatrixXd& queries,
                                   const Eigen::MatrixXd& points) {
  std::vector<Eigen::Index> nn(static_cast<std::size_t>(queries.cols()));
  for (Eigen::Index j = 0; j < queries.cols(); ++j) {
    Eigen::Index best = 0;
    double best_sq = (points.col(0) - queries.col(j)).squaredNorm();
    for (Eigen::Index i = 1; i < points.cols(); ++i) {
      const double sq = (points.col(i) - queries.col(j)).squaredNorm();
      if (sq < best_sq) {
        best_sq = sq;
        best = i;
      }
    }
    nn[static_cast<std::size_t>(j)] = best;
  }
  return nn;
}

}  // namespace

NnEntry exact_nn(const Eigen::Ref<const Eigen::VectorXd>& query,
                 const Eigen::Ref<const Eigen::MatrixXd>& points) {
  if (points.cols() == 0) throw std::invalid_argument("exact_nn: empty point set");
  if (query.size() != points.rows())
    throw std::invalid_argument("exact_nn: query dimension mismatch");
  Eigen::Index best = 0;
  double best_sq = (points.col(0) - query).squaredNorm();
  for (Eigen::Index i = 1; i < points.cols(); ++i) {
    const double sq = (points.col(i) - query).squaredNorm();
    if (sq < best_sq) {
      best_sq = sq;
      best = i;
    }
  }
  return {best, std::sqrt(best_sq)};
}

double bbs(const PointSet& p, const PointSet& q) {
  check_dims(p, q);
  const auto nn_pq = nn_field(p.appearance, q.appearance);  // NN(p_i, Q)
  const auto nn_qp = nn_field(q.appearance, p.appearance);  // NN(q_j, P)
  Eigen::Index pairs = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const Eigen::Index j = nn_pq[static_cast<std::size_t>(i)];
    if (nn_qp[static_cast<std::size_t>(j)] == i) ++pairs;
  }
  return static_cast<double>(pairs) /
         static_cast<double>(std::min(p.size(), q.size()));
}

double dis(const PointSet& q, const PointSet& p) {
  check_dims(q, p);
  const auto nn = nn_field(q.appearance, p.appearance);
  std::vector<char> hit(static_cast<std::size_t>(p.size()), 0);
  Eigen::Index unique = 0;
  for (const Eigen::Index i : nn) {
    if (!hit[static_cast<std::size_t>(i)]) {
      hit[static_cast<std::size_t>(i)] = 1;
      ++unique;
    }
  }
  return static_cast<double>(unique) /
         static_cast<double>(std::min(p.size(), q.size()));
}

Eigen::VectorXi kappa(const PointSet& q, const PointSet& p) {
  check_dims(q, p);
  const auto nn = nn_field(q.appearance, p.appearance);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(p.size());
  for (const Eigen::Index i : nn) ++counts[i];
  return counts;
}

double ddis(const PointSet& q, const PointSet& p) {
  check_dims(q, p);
  const auto nn = nn_field(q.appearance, p.appearance);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(p.size());
  for (const Eigen::Index i : nn) ++counts[i];

  const bool with_locations = q.has_locations() && p.has_locations();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    const Eigen::Index i = nn[static_cast<std::size_t>(j)];
    double r = 0.0;
    if (with_locations) r = (q.locations->col(j) - p.locations->col(i)).norm();
    sum += std::exp(1.0 - static_cast<double>(counts[i])) / (r + 1.0);
  }
  return sum / static_cast<double>(std::min(p.size(), q.size()));
}

}  // namespace ddis
