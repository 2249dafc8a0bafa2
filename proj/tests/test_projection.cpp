#include <algorithm>
#include <cmath>
#include <vector>

#include "cadsvm/errors.hpp"
#include "cadsvm/projection.hpp"
#include "cadsvm/rng.hpp"
#include "doctest.h"

using namespace cadsvm;

namespace {

// Cyclic Jacobi eigensolver, used as an oracle independent of the library's
// decomposition. Eigenvalues ascending. Rotations are applied as full matrix
// products; fine for the tiny matrices used here.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off < 1e-24) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-18) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(n, n);
        rot(p, p) = cs;
        rot(q, q) = cs;
        rot(p, q) = sn;
        rot(q, p) = -sn;
        a = rot.transpose() * a * rot;
      }
    }
  }
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) values[i] = a(i, i);
  std::sort(values.begin(), values.end());
  return values;
}

double column_variance(const Eigen::MatrixXd& m, int j) {
  const double mean = m.col(j).mean();
  return (m.col(j).array() - mean).square().sum() /
         static_cast<double>(m.rows() - 1);
}

}  // namespace

TEST_CASE("planar data keeps its geometry under projection") {
  Rng rng(91);
  Eigen::MatrixXd x(40, 2);
  for (int i = 0; i < x.rows(); ++i) {
    x(i, 0) = rng.uniform(-3.0, 3.0);
    x(i, 1) = rng.uniform(-3.0, 3.0);
  }
  const Eigen::MatrixXd scores = project_2d(x);
  REQUIRE(scores.rows() == 40);
  REQUIRE(scores.cols() == 2);
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = i + 1; j < x.rows(); ++j) {
      const double before = (x.row(i) - x.row(j)).norm();
      const double after = (scores.row(i) - scores.row(j)).norm();
      CHECK(after == doctest::Approx(before).epsilon(1e-9));
    }
  }
}

TEST_CASE("score variances match an independent eigensolver") {
  Rng rng(92);
  Eigen::MatrixXd x(60, 5);
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) {
      x(i, j) = rng.normal() * (1.0 + j) + 0.3 * rng.uniform();
    }
  }
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean().eval();
  const Eigen::MatrixXd cov = centered.transpose() * centered / 59.0;
  const std::vector<double> values = jacobi_eigenvalues(cov);

  const Eigen::MatrixXd scores = project_2d(x);
  const double v0 = column_variance(scores, 0);
  const double v1 = column_variance(scores, 1);
  CHECK(v0 >= v1);
  CHECK(v0 == doctest::Approx(values[4]).epsilon(1e-9));
  CHECK(v1 == doctest::Approx(values[3]).epsilon(1e-9));
}

TEST_CASE("axis signs are canonical") {
  // Points run along (-0.8, 0.6); the canonical axis flips to (0.8, -0.6)
  // so the sample at t = -1 projects to a positive score.
  Eigen::MatrixXd x(21, 2);
  for (int i = 0; i <= 20; ++i) {
    const double t = -1.0 + 0.1 * i;
    x(i, 0) = -0.8 * t + 1e-4 * (i % 3);
    x(i, 1) = 0.6 * t;
  }
  const Eigen::MatrixXd scores = project_2d(x);
  CHECK(scores(0, 0) > 0.9);
  CHECK(scores(20, 0) < -0.9);

  const Eigen::MatrixXd again = project_2d(x);
  CHECK(scores == again);
}

TEST_CASE("projection rejects degenerate input") {
  CHECK_THROWS_AS(project_2d(Eigen::MatrixXd::Zero(5, 1)), DataError);
  CHECK_THROWS_AS(project_2d(Eigen::MatrixXd::Zero(1, 5)), DataError);
}
