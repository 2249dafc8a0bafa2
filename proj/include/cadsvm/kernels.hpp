#pragma once

#include <Eigen/Dense>

namespace cadsvm {

// Gaussian basis expansion: one basis function per center,
// phi_j(x) = exp(-||x - c_j||^2 / (2 sigma^2)).
struct BasisSet {
  Eigen::MatrixXd centers;  // one center per row
  double sigma = 1.0;
};

// N x M matrix with entry (i, j) = phi_j(points.row(i)). Entries lie in
// (0, 1]; a point equal to a center produces exactly 1.0.
Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& points, const BasisSet& basis);

// Unnormalized graph Laplacian L = D - W of the fully connected similarity
// graph W_ij = exp(-||x_i - x_j||^2 / (2 sigma_prime^2)), W_ii = 0,
// D = diag(row sums of W). L is symmetric PSD with zero row sums.
Eigen::MatrixXd graph_laplacian(const Eigen::MatrixXd& points, double sigma_prime);

}  // namespace cadsvm
