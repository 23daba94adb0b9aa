#include "ddis/pca.hpp"

#include <cmath>
#include <stdexcept>

namespace ddis {

PcaProjection fit_pca(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                      Eigen::Index out_dim) {
  const Eigen::Index d = samples.rows();
  const Eigen::Index n = samples.cols();
  if (n < 2) throw std::invalid_argument("fit_pca: need at least two samples");
  if (out_dim < 1 || out_dim > d)
    throw std::invalid_argument("fit_pca: reduced dimension out of range");

  PcaProjection proj;
  proj.mean = samples.rowwise().mean();
  const Eigen::MatrixXd centered = samples.colwise() - proj.mean;
  const Eigen::MatrixXd cov =
      centered * centered.transpose() / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("fit_pca: eigendecomposition failed");

  // Eigenvalues come back ascending; take the top out_dim in descending
  // order and fix each direction's sign.
  proj.basis.resize(out_dim, d);
  for (Eigen::Index r = 0; r < out_dim; ++r) {
    Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - r);
    Eigen::Index lead = 0;
    for (Eigen::Index k = 1; k < d; ++k)
      if (std::abs(v[k]) > std::abs(v[lead])) lead = k;
    if (v[lead] < 0.0) v = -v;
    proj.basis.row(r) = v.transpose();
  }
  return proj;
}

}  // namespace ddis
