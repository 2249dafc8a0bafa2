#include "cadsvm/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cadsvm/errors.hpp"
#include "cadsvm/rng.hpp"

namespace cadsvm {
namespace {

bool parse_cell(const std::string& cell, double* value) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  *value = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t') ++end;
  return *end == '\0';
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t");
    if (first == std::string::npos) {
      cells.push_back("");
      continue;
    }
    const auto last = cell.find_last_not_of(" \t");
    cells.push_back(cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

// Numeric CSV rows with an optional auto-detected header. row/column indices
// in errors are 1-based over the physical file.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    std::vector<double> values(cells.size());
    bool numeric = true;
    std::size_t bad_col = 0;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (!parse_cell(cells[j], &values[j])) {
        numeric = false;
        bad_col = j;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;  // header row
      throw DataError(path + ": row " + std::to_string(line_no) + ", column " +
                      std::to_string(bad_col + 1) + ": '" + cells[bad_col] +
                      "' is not numeric");
    }
    if (rows.empty()) {
      width = values.size();
    } else if (values.size() != width) {
      throw DataError(path + ": row " + std::to_string(line_no) + " has " +
                      std::to_string(values.size()) + " columns, expected " +
                      std::to_string(width));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw DataError(path + ": no data rows");
  if (width < 2) throw DataError(path + ": need at least two columns");
  return rows;
}

// Per-column z-score over the whole table. Constant columns stay at zero.
Eigen::MatrixXd standardized(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd z = x;
  const double n = static_cast<double>(x.rows());
  for (int j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    z.col(j).array() -= mean;
    const double sd = std::sqrt(z.col(j).squaredNorm() / std::max(n - 1.0, 1.0));
    if (sd > 1e-12) z.col(j) /= sd;
  }
  return z;
}

int band_label(double target) {
  if (target > 23.0) return +1;
  if (target < 19.0) return -1;
  return 0;
}

int uniform_ternary(Rng& rng) {
  switch (rng.below(3)) {
    case 0: return +1;
    case 1: return 0;
    default: return -1;
  }
}

}  // namespace

int Dataset::count(int label) const {
  return static_cast<int>(std::count(labels.begin(), labels.end(), label));
}

void Dataset::validate() const {
  if (static_cast<std::size_t>(x.rows()) != labels.size()) {
    throw DataError(name + ": row count does not match label count");
  }
  for (int label : labels) {
    if (label != -1 && label != 0 && label != 1) {
      throw DataError(name + ": labels must be -1, 0, or 1");
    }
  }
}

Dataset generate_toy(const ToyConfig& config) {
  if (config.ambiguous_fraction < 0.0 || config.ambiguous_fraction > 1.0) {
    throw DataError("toy: ambiguous_fraction must lie in [0, 1]");
  }
  if (config.total < 4) throw DataError("toy: need at least 4 samples");

  const int separable = config.total / 2;
  const int mixed = config.total - separable;
  const int sep_neg = separable / 2;
  const int sep_pos = separable - sep_neg;
  const int mix_amb = static_cast<int>(std::lround(mixed * config.ambiguous_fraction));
  const int mix_labeled = mixed - mix_amb;
  const int mix_neg = mix_labeled / 2;
  const int mix_pos = mix_labeled - mix_neg;

  Dataset data;
  data.name = "toy";
  data.x.resize(config.total, 2);
  data.labels.reserve(config.total);
  Rng rng(config.seed);
  int row = 0;
  const auto emit = [&](int count, int label, double x1_lo, double x1_hi,
                        double x2_lo, double x2_hi) {
    for (int k = 0; k < count; ++k, ++row) {
      data.x(row, 0) = rng.uniform(x1_lo, x1_hi);
      data.x(row, 1) = rng.uniform(x2_lo, x2_hi);
      data.labels.push_back(label);
    }
  };
  // Domain [0,10]^2: regions must span several default kernel widths, or the
  // rejector cannot act locally and collapses to rejecting everything.
  emit(sep_neg, -1, 0.0, 5.0, 0.0, 5.0);
  emit(sep_pos, +1, 5.0, 10.0, 0.0, 5.0);
  emit(mix_pos, +1, 0.0, 10.0, 5.0, 10.0);
  emit(mix_neg, -1, 0.0, 10.0, 5.0, 10.0);
  emit(mix_amb, 0, 0.0, 10.0, 5.0, 10.0);
  return data;
}

void save_labeled_csv(const Dataset& data, const std::string& path) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  char buffer[64];
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", data.x(i, j));
      out << buffer << ',';
    }
    out << data.labels[static_cast<std::size_t>(i)] << '\n';
  }
  if (!out.flush()) throw DataError("cannot write " + path);
}

Dataset load_labeled_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  const std::size_t dim = rows[0].size() - 1;
  Dataset data;
  data.name = std::filesystem::path(path).stem().string();
  data.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  data.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      data.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    const double raw = rows[i][dim];
    if (raw != -1.0 && raw != 0.0 && raw != 1.0) {
      throw DataError(path + ": row " + std::to_string(i + 1) +
                      ": label must be -1, 0, or 1");
    }
    data.labels.push_back(static_cast<int>(raw));
  }
  return data;
}

RegressionTable load_regression_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  const std::size_t dim = rows[0].size() - 1;
  RegressionTable table;
  table.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  table.target.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      table.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    table.target(static_cast<Eigen::Index>(i)) = rows[i][dim];
  }
  return table;
}

Dataset build_pd1(const RegressionTable& table) {
  Dataset data;
  data.name = "pd1";
  data.x = standardized(table.x);
  data.labels.reserve(static_cast<std::size_t>(table.target.size()));
  for (Eigen::Index i = 0; i < table.target.size(); ++i) {
    data.labels.push_back(band_label(table.target(i)));
  }
  return data;
}

Dataset build_pd2(const RegressionTable& table, std::uint64_t seed) {
  Dataset data = build_pd1(table);
  data.name = "pd2";
  Rng rng(seed);
  for (int& label : data.labels) {
    if (label == 0) label = uniform_ternary(rng);
  }
  return data;
}

Dataset build_pd3(const RegressionTable& table, std::uint64_t seed) {
  const Eigen::MatrixXd z = standardized(table.x);
  const Eigen::Index n = z.rows();
  Rng rng(seed);

  std::vector<bool> mixed;
  bool found = false;
  for (int attempt = 0; attempt < 10000 && !found; ++attempt) {
    Eigen::VectorXd v(z.cols());
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = rng.normal();
    const double norm = v.norm();
    if (norm < 1e-12) continue;
    v /= norm;

    std::vector<bool> mask(static_cast<std::size_t>(n));
    long n_mixed = 0;
    double sum_mixed = 0.0;
    double sum_sep = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool m = z.row(i).dot(v) >= 0.0;
      mask[static_cast<std::size_t>(i)] = m;
      if (m) {
        ++n_mixed;
        sum_mixed += table.target(i);
      } else {
        sum_sep += table.target(i);
      }
    }
    const long n_sep = n - n_mixed;
    if (std::abs(n_mixed - 336) > 15 || std::abs(n_sep - 170) > 15) continue;
    if (n_mixed == 0 || n_sep == 0) continue;
    if (std::abs(sum_mixed / n_mixed - sum_sep / n_sep) > 1.0) continue;
    mixed = std::move(mask);
    found = true;
  }
  if (!found) {
    throw DataError("pd3: no hyperplane split matched the size and mean-target "
                    "tolerances within 10000 draws");
  }

  Dataset data;
  data.name = "pd3";
  data.x = z;
  data.labels.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (mixed[static_cast<std::size_t>(i)]) {
      data.labels.push_back(uniform_ternary(rng));
    } else {
      data.labels.push_back(table.target(i) > 21.0 ? +1 : -1);
    }
  }
  return data;
}

Dataset relabel_ambiguous(const Dataset& data, std::uint64_t seed) {
  Dataset out = data;
  Rng rng(seed);
  for (int& label : out.labels) {
    if (label == 0) label = rng.uniform() < 0.5 ? +1 : -1;
  }
  return out;
}

Dataset select_rows(const Dataset& data, const std::vector<int>& keep) {
  Dataset out;
  out.name = data.name;
  out.x.resize(static_cast<Eigen::Index>(keep.size()), data.x.cols());
  out.labels.reserve(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.x.row(static_cast<Eigen::Index>(k)) = data.x.row(keep[k]);
    out.labels.push_back(data.labels[static_cast<std::size_t>(keep[k])]);
  }
  return out;
}

Split stratified_split(const Dataset& data, double train_fraction,
                       std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DataError("split: train_fraction must lie in (0, 1)");
  }
  data.validate();

  Rng rng(seed);
  std::vector<Eigen::Index> train_idx;
  std::vector<Eigen::Index> test_idx;
  for (int label : {+1, -1, 0}) {
    std::vector<Eigen::Index> members;
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
      if (data.labels[i] == label) members.push_back(static_cast<Eigen::Index>(i));
    }
    if (members.empty()) continue;
    if (members.size() < 2) {
      train_idx.insert(train_idx.end(), members.begin(), members.end());
      continue;
    }
    rng.shuffle(members);
    const auto n_train = static_cast<std::size_t>(
        std::lround(train_fraction * static_cast<double>(members.size())));
    train_idx.insert(train_idx.end(), members.begin(), members.begin() + n_train);
    test_idx.insert(test_idx.end(), members.begin() + n_train, members.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  const auto take = [&](const std::vector<Eigen::Index>& idx, const char* tag) {
    Dataset part;
    part.name = data.name + "-" + tag;
    part.x.resize(static_cast<Eigen::Index>(idx.size()), data.x.cols());
    part.labels.reserve(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      part.x.row(static_cast<Eigen::Index>(k)) = data.x.row(idx[k]);
      part.labels.push_back(data.labels[static_cast<std::size_t>(idx[k])]);
    }
    return part;
  };
  return {take(train_idx, "train"), take(test_idx, "test")};
}

}  // namespace cadsvm
