#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cadsvm {

// A labeled sample set. Labels are +1 (positive), -1 (negative), or 0
// (ambiguous). Row i of x pairs with labels[i].
struct Dataset {
  std::string name;
  Eigen::MatrixXd x;
  std::vector<int> labels;

  int count(int label) const;
  void validate() const;
};

// Two-dimensional benchmark on [0,1]^2: the lower half is separable (left
// quadrant negative, right quadrant positive), the upper half mixes the
// classes with an ambiguous_fraction share of ambiguous samples.
struct ToyConfig {
  double ambiguous_fraction = 0.5;
  int total = 400;
  std::uint64_t seed = 0;
};

Dataset generate_toy(const ToyConfig& config);

// CSV round-trip for labeled datasets: feature columns then one integer
// label column, 17 significant digits, bit-exact on reload.
void save_labeled_csv(const Dataset& data, const std::string& path);
Dataset load_labeled_csv(const std::string& path);

// A numeric regression table: feature columns then one target column. An
// optional header row is auto-detected by a non-numeric first row.
struct RegressionTable {
  Eigen::MatrixXd x;
  Eigen::VectorXd target;
};

// Throws DataError naming the offending row/column on malformed input.
RegressionTable load_regression_csv(const std::string& path);

// Classification tasks derived from a regression table. Features are
// z-scored per column over the full table (the width grid assumes unit-scale
// features); labels always derive from the raw targets.
//
// Banded labels: target > 23 positive, target < 19 negative, else ambiguous.
Dataset build_pd1(const RegressionTable& table);

// As build_pd1, but the middle band is relabeled uniformly at random over
// {+1, 0, -1}.
Dataset build_pd2(const RegressionTable& table, std::uint64_t seed);

// Splits the table by a random hyperplane through the feature mean into a
// mixed part (labels uniform over {+1, 0, -1}) and a separable part (target
// > 21 positive, else negative). Directions are drawn until the two parts'
// mean targets differ by at most 1.0 and the part sizes are within 15 of
// (170, 336); throws DataError when no direction passes within 10^4 draws.
Dataset build_pd3(const RegressionTable& table, std::uint64_t seed);

// Copy of data with every ambiguous sample independently relabeled +1 or -1
// with probability 1/2 from the seeded generator. Labeled samples and
// features are untouched.
Dataset relabel_ambiguous(const Dataset& data, std::uint64_t seed);

// Copy of the named rows, in the order given. Indices must be in range.
Dataset select_rows(const Dataset& data, const std::vector<int>& keep);

// Seeded stratified split. Each class's train share is within one sample of
// train_fraction; classes with fewer than 2 samples go wholly to train.
// Ambiguous samples are retained in both parts (scoring drops them later).
struct Split {
  Dataset train;
  Dataset test;
};

Split stratified_split(const Dataset& data, double train_fraction,
                       std::uint64_t seed);

}  // namespace cadsvm
