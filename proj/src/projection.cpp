#include "cadsvm/projection.hpp"

#include <cmath>

#include "cadsvm/errors.hpp"

namespace cadsvm {

Eigen::MatrixXd project_2d(const Eigen::MatrixXd& x) {
  if (x.cols() < 2) {
    throw DataError("projection needs at least two feature columns, got " +
                    std::to_string(x.cols()));
  }
  if (x.rows() < 2) {
    throw DataError("projection needs at least two rows, got " +
                    std::to_string(x.rows()));
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(x.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("covariance eigendecomposition failed");
  }
  // Eigenvalues come back ascending; the last two columns span the top plane.
  Eigen::MatrixXd axes(x.cols(), 2);
  axes.col(0) = eig.eigenvectors().col(x.cols() - 1);
  axes.col(1) = eig.eigenvectors().col(x.cols() - 2);
  for (int j = 0; j < 2; ++j) {
    int arg = 0;
    for (int i = 1; i < axes.rows(); ++i) {
      if (std::abs(axes(i, j)) > std::abs(axes(arg, j))) arg = i;
    }
    if (axes(arg, j) < 0.0) axes.col(j) = -axes.col(j);
  }
  return centered * axes;
}

}  // namespace cadsvm
