#include "ddis/ann.hpp"

#include <cmath>
#include <stdexcept>

namespace ddis {

namespace {

PcaProjection make_projection(const Eigen::Ref<const Eigen::MatrixXd>& features,
                              const AnnParams& params) {
  const Eigen::Index d = features.rows();
  // PCA needs two samples; a single-point template degenerates to identity.
  if (params.identity_projection || features.cols() < 2)
    return PcaProjection::identity(d);
  const auto out_dim = std::min<Eigen::Index>(std::max(params.reduced_dim, 1), d);
  return fit_pca(features, out_dim);
}

}  // namespace

AnnIndex::AnnIndex(const Eigen::Ref<const Eigen::MatrixXd>& features,
                   const Eigen::Ref<const Eigen::Matrix2Xd>& locations,
                   const AnnParams& params)
    : params_(params),
      projection_(make_projection(features, params)),
      tree_(params_.identity_projection || features.cols() < 2
                ? Eigen::MatrixXd(features)
                : projection_.apply_all(features)),
      locations_(locations) {
  if (features.cols() == 0) throw std::invalid_argument("AnnIndex: empty template");
  if (locations.cols() != features.cols())
    throw std::invalid_argument("AnnIndex: locations count differs from feature count");
  if (params.epsilon < 0) throw std::invalid_argument("AnnIndex: epsilon must be >= 0");
}

AnnQueryResult AnnIndex::query(const Eigen::Ref<const Eigen::VectorXd>& feature,
                               std::optional<Eigen::Index> seed) const {
  if (feature.size() != projection_.in_dim())
    throw std::invalid_argument("AnnIndex: query dimension mismatch");
  const auto result =
      params_.identity_projection
          ? tree_.nn(feature, params_.epsilon, seed)
          : tree_.nn(projection_.apply(feature), params_.epsilon, seed);
  return {result.index, std::sqrt(result.dist_sq)};
}

}  // namespace ddis
