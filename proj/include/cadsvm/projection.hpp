#pragma once

#include <Eigen/Dense>

namespace cadsvm {

// Mean-centered scores of each row on the top two principal axes of the
// feature covariance. Axis signs are canonical: the largest-magnitude
// loading of each axis is positive. Needs at least two rows and columns.
Eigen::MatrixXd project_2d(const Eigen::MatrixXd& x);

}  // namespace cadsvm
