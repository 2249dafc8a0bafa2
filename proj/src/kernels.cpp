#include "cadsvm/kernels.hpp"

#include <stdexcept>
#include <vector>

#include "cadsvm/simd.hpp"

namespace cadsvm {

namespace {

// Shared evaluation core: out(i, j) = exp(-||points_i - centers_j||^2 * scale)
// with scale = 1/(2 sigma^2). Eigen matrices are column-major, so
// centers.data() already stores each feature contiguously over centers, the
// layout sqdist_row expects.
Eigen::MatrixXd gaussian_matrix(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                                double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian kernel: sigma must be positive");
  if (points.cols() != centers.cols()) {
    throw std::invalid_argument("gaussian kernel: feature dimension mismatch");
  }
  const int n = static_cast<int>(points.rows());
  const int m = static_cast<int>(centers.rows());
  const int dim = static_cast<int>(points.cols());
  Eigen::MatrixXd out(n, m);
  const double neg_inv_two_sigma_sq = -1.0 / (2.0 * sigma * sigma);
  std::vector<double> x(dim), d2(m), row(m);
  for (int i = 0; i < n; ++i) {
    for (int f = 0; f < dim; ++f) x[f] = points(i, f);
    simd::sqdist_row(x.data(), centers.data(), dim, m, d2.data());
    simd::exp_scale(d2.data(), neg_inv_two_sigma_sq, row.data(), m);
    for (int j = 0; j < m; ++j) out(i, j) = row[j];
  }
  return out;
}

}  // namespace

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& points, const BasisSet& basis) {
  if (basis.centers.rows() == 0) throw std::invalid_argument("design_matrix: empty basis");
  return gaussian_matrix(points, basis.centers, basis.sigma);
}

Eigen::MatrixXd graph_laplacian(const Eigen::MatrixXd& points, double sigma_prime) {
  const int n = static_cast<int>(points.rows());
  if (n == 0) throw std::invalid_argument("graph_laplacian: empty point set");
  Eigen::MatrixXd w = gaussian_matrix(points, points, sigma_prime);
  w.diagonal().setZero();
  Eigen::MatrixXd l = -w;
  l.diagonal() = w.rowwise().sum();
  return l;
}

}  // namespace cadsvm
