#include "cadsvm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "cadsvm/errors.hpp"
#include "cadsvm/rng.hpp"
#include "json.hpp"

namespace cadsvm {

namespace {

struct MethodTraits {
  bool lambda_prime = false;
  bool sigma_prime = false;
  bool tau = false;
  bool c = false;
  bool d = false;
  bool relabels = false;
};

MethodTraits traits_of(const std::string& method) {
  if (method == "svm") return {};
  if (method == "svm-rl") return {false, false, false, false, false, true};
  if (method == "lapsvm") return {false, true, true, false, false, false};
  if (method == "two-step") return {true, false, false, true, true, false};
  if (method == "cro-svm") return {true, false, false, true, false, false};
  if (method == "cro-svm-rl") return {true, false, false, true, false, true};
  if (method == "cad-svm") return {true, false, false, true, true, false};
  std::string valid;
  for (const auto& tag : known_methods()) {
    if (!valid.empty()) valid += ", ";
    valid += tag;
  }
  throw DataError("unknown method '" + method + "' (valid: " + valid + ")");
}

// Stable per-method stream index so a method's results do not depend on its
// position in the requested list. FNV-1a.
std::uint64_t tag_hash(const std::string& tag) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string format17(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

// Seeded round-robin fold assignment, stratified per class. Ambiguous rows
// are assigned last so their presence never shifts the labeled folds.
std::vector<int> fold_assignment(const Dataset& data, int folds,
                                 std::uint64_t seed) {
  std::vector<int> fold(data.labels.size(), -1);
  Rng rng(seed);
  for (int label : {+1, -1, 0}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
      if (data.labels[i] == label) members.push_back(i);
    }
    rng.shuffle(members);
    for (std::size_t k = 0; k < members.size(); ++k) {
      fold[members[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
    }
  }
  return fold;
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double sample_var(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

// Continued fraction for the regularized incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  const int kMaxIter = 400;
  const double kEps = 1e-15;
  const double kFpMin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("incomplete beta continued fraction did not converge");
}

double reg_inc_beta(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace

HyperGrid HyperGrid::defaults() {
  HyperGrid grid;
  grid.lambda = {1e-3, 1e-5, 1e-7};
  grid.lambda_prime = {1e-3, 1e-5, 1e-7};
  grid.sigma = {std::pow(10.0, 0.5), std::pow(10.0, 0.75), 10.0};
  grid.sigma_prime = {std::pow(10.0, 0.5), std::pow(10.0, 0.75), 10.0};
  grid.tau = {1e-1, 1e-2, 1e-3};
  grid.c = {0.03, 0.06, 0.20, 0.45};
  grid.d = {0.03, 0.06, 0.20, 0.50};
  return grid;
}

void HyperGrid::validate() const {
  const bool ok = !lambda.empty() && !lambda_prime.empty() && !sigma.empty() &&
                  !sigma_prime.empty() && !tau.empty() && !c.empty() && !d.empty();
  if (!ok) throw DataError("hyperparameter grid has an empty dimension");
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> tags = {
      "svm", "svm-rl", "lapsvm", "two-step", "cro-svm", "cro-svm-rl", "cad-svm"};
  return tags;
}

std::vector<HyperPoint> enumerate_grid(const std::string& method,
                                       const HyperGrid& grid) {
  const MethodTraits use = traits_of(method);
  grid.validate();
  static const std::vector<double> unused = {0.0};
  const auto& lp = use.lambda_prime ? grid.lambda_prime : unused;
  const auto& sp = use.sigma_prime ? grid.sigma_prime : unused;
  const auto& tau = use.tau ? grid.tau : unused;
  const auto& cs = use.c ? grid.c : unused;
  const auto& ds = use.d ? grid.d : unused;

  std::vector<HyperPoint> points;
  points.reserve(grid.lambda.size() * lp.size() * grid.sigma.size() * sp.size() *
                 tau.size() * cs.size() * ds.size());
  for (double lambda : grid.lambda)
    for (double lambda_prime : lp)
      for (double sigma : grid.sigma)
        for (double sigma_prime : sp)
          for (double t : tau)
            for (double c : cs)
              for (double d : ds)
                points.push_back({lambda, lambda_prime, sigma, sigma_prime, t, c, d});
  return points;
}

TrainedModel train_method(const std::string& method, const Dataset& data,
                          const HyperPoint& point, std::uint64_t rl_seed) {
  traits_of(method);
  if (method == "svm") {
    if (data.count(0) == 0) return train_svm(data, point.lambda, point.sigma);
    std::vector<int> labeled;
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
      if (data.labels[i] != 0) labeled.push_back(static_cast<int>(i));
    }
    return train_svm(select_rows(data, labeled), point.lambda, point.sigma);
  }
  if (method == "svm-rl") return train_svm_rl(data, point.lambda, point.sigma, rl_seed);
  if (method == "lapsvm") {
    return train_lapsvm(data, point.lambda, point.sigma, point.sigma_prime, point.tau);
  }
  if (method == "two-step") {
    return train_two_step(data, point.lambda, point.lambda_prime, point.sigma,
                          point.c, point.d);
  }
  if (method == "cro-svm") {
    return train_cro_svm(data, point.lambda, point.lambda_prime, point.sigma, point.c);
  }
  if (method == "cro-svm-rl") {
    return train_cro_svm_rl(data, point.lambda, point.lambda_prime, point.sigma,
                            point.c, rl_seed);
  }
  return train_cad_svm(data, point.lambda, point.lambda_prime, point.sigma,
                       point.c, point.d);
}

CvResult cross_validate(const std::string& method, const Dataset& train,
                        const HyperGrid& grid, int folds, std::uint64_t seed,
                        std::uint64_t rl_seed) {
  traits_of(method);
  grid.validate();
  if (folds < 2) throw DataError("cross-validation needs at least 2 folds");
  const int labeled = train.count(+1) + train.count(-1);
  if (labeled < folds) {
    throw DataError("cross-validation needs at least one labeled sample per fold");
  }

  const std::vector<int> fold = fold_assignment(train, folds, derive_seed(seed, 0));
  std::vector<Dataset> fold_train(static_cast<std::size_t>(folds));
  std::vector<Dataset> fold_val(static_cast<std::size_t>(folds));
  std::vector<bool> scorable(static_cast<std::size_t>(folds), false);
  for (int k = 0; k < folds; ++k) {
    std::vector<int> in, out;
    for (std::size_t i = 0; i < train.labels.size(); ++i) {
      (fold[i] == k ? out : in).push_back(static_cast<int>(i));
    }
    fold_train[static_cast<std::size_t>(k)] = select_rows(train, in);
    fold_val[static_cast<std::size_t>(k)] = select_rows(train, out);
    const Dataset& val = fold_val[static_cast<std::size_t>(k)];
    scorable[static_cast<std::size_t>(k)] = val.count(+1) + val.count(-1) > 0;
  }
  if (std::none_of(scorable.begin(), scorable.end(), [](bool s) { return s; })) {
    throw DataError("cross-validation: no fold has labeled validation samples");
  }

  const std::vector<HyperPoint> points = enumerate_grid(method, grid);
  int best_index = -1;
  double best_accuracy = -std::numeric_limits<double>::infinity();
  int failed_points = 0;
  std::exception_ptr last_failure;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double sum = 0.0;
    int scored = 0;
    bool trained = true;
    for (int k = 0; k < folds; ++k) {
      if (!scorable[static_cast<std::size_t>(k)]) continue;
      try {
        const TrainedModel model = train_method(
            method, fold_train[static_cast<std::size_t>(k)], points[i], rl_seed);
        sum += labeled_accuracy(model, fold_val[static_cast<std::size_t>(k)]);
        ++scored;
      } catch (const DataError&) {
        trained = false;
        last_failure = std::current_exception();
        break;
      } catch (const NumericalError&) {
        trained = false;
        last_failure = std::current_exception();
        break;
      }
    }
    if (!trained) {
      ++failed_points;
      continue;
    }
    const double accuracy = sum / static_cast<double>(scored);
    if (accuracy > best_accuracy) {
      best_accuracy = accuracy;
      best_index = static_cast<int>(i);
    }
  }
  if (best_index < 0) std::rethrow_exception(last_failure);
  return {points[static_cast<std::size_t>(best_index)], best_accuracy, failed_points};
}

double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) {
    throw std::invalid_argument("student_t_cdf: dof must be positive");
  }
  if (t == 0.0) return 0.5;
  const double x = dof / (dof + t * t);
  const double two_tail = reg_inc_beta(x, 0.5 * dof, 0.5);
  return t > 0.0 ? 1.0 - 0.5 * two_tail : 0.5 * two_tail;
}

WelchResult welch_t_test(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) {
    throw std::invalid_argument("welch_t_test: each side needs at least 2 values");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  const double va = sample_var(a, ma);
  const double vb = sample_var(b, mb);
  const double se2 = va / na + vb / nb;

  WelchResult result;
  if (se2 == 0.0) {
    result.dof = na + nb - 2.0;
    if (ma == mb) return result;  // degenerate tie: not significant
    result.t = ma > mb ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    result.p = 0.0;
    result.significant = true;
    return result;
  }
  result.t = (ma - mb) / std::sqrt(se2);
  result.dof = se2 * se2 /
               (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
  result.p = 2.0 * (1.0 - student_t_cdf(std::abs(result.t), result.dof));
  result.significant = result.p < 0.05;
  return result;
}

bool failure_budget_ok(int failed, int runs) { return failed * 10 <= runs; }

ExperimentReport run_experiment(const Dataset& data,
                                const std::vector<std::string>& methods,
                                int runs, double train_fraction,
                                const HyperGrid& grid, std::uint64_t seed,
                                int jobs) {
  if (runs < 2) throw DataError("experiment needs at least 2 runs");
  if (methods.empty()) throw DataError("experiment needs at least one method");
  for (const auto& tag : methods) traits_of(tag);
  grid.validate();
  data.validate();

  struct Cell {
    double accuracy = 0.0;
    bool failed = false;
  };
  const int kFolds = 5;
  const std::size_t n_methods = methods.size();
  std::vector<std::vector<Cell>> cells(static_cast<std::size_t>(runs),
                                       std::vector<Cell>(n_methods));

  auto run_one = [&](int r) {
    const std::uint64_t run_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    const Split split =
        stratified_split(data, train_fraction, derive_seed(run_seed, 0));
    for (std::size_t m = 0; m < n_methods; ++m) {
      const std::uint64_t method_seed = derive_seed(run_seed, tag_hash(methods[m]));
      const std::uint64_t cv_seed = derive_seed(method_seed, 0);
      const std::uint64_t rl_seed = derive_seed(method_seed, 1);
      Cell& cell = cells[static_cast<std::size_t>(r)][m];
      try {
        const CvResult cv =
            cross_validate(methods[m], split.train, grid, kFolds, cv_seed, rl_seed);
        const TrainedModel model =
            train_method(methods[m], split.train, cv.best, rl_seed);
        cell.accuracy = labeled_accuracy(model, split.test);
      } catch (const DataError&) {
        cell.failed = true;
      } catch (const NumericalError&) {
        cell.failed = true;
      }
    }
  };

  const int workers = std::max(1, std::min(jobs, runs));
  if (workers == 1) {
    for (int r = 0; r < runs; ++r) run_one(r);
  } else {
    std::mutex next_mutex;
    int next = 0;
    std::exception_ptr failure;
    auto pull = [&]() {
      std::lock_guard<std::mutex> lock(next_mutex);
      return failure ? runs : next++;
    };
    auto worker = [&]() {
      for (int r = pull(); r < runs; r = pull()) {
        try {
          run_one(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(next_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  ExperimentReport report;
  report.dataset = data.name;
  report.runs = runs;
  report.folds = kFolds;
  report.train_fraction = train_fraction;
  report.seed = seed;
  for (std::size_t m = 0; m < n_methods; ++m) {
    MethodSummary summary;
    summary.method = methods[m];
    for (int r = 0; r < runs; ++r) {
      const Cell& cell = cells[static_cast<std::size_t>(r)][m];
      if (cell.failed) summary.failed_runs.push_back(r);
      else summary.accuracies.push_back(cell.accuracy);
    }
    summary.mean = mean_of(summary.accuracies);
    summary.sd = sample_sd(summary.accuracies, summary.mean);
    summary.valid = failure_budget_ok(static_cast<int>(summary.failed_runs.size()), runs);
    report.methods.push_back(std::move(summary));
  }

  int top = -1;
  for (std::size_t m = 0; m < n_methods; ++m) {
    if (!report.methods[m].valid) continue;
    if (top < 0 || report.methods[m].mean > report.methods[static_cast<std::size_t>(top)].mean) {
      top = static_cast<int>(m);
    }
  }
  if (top < 0) throw DataError("every method exceeded the failure budget");
  for (auto& summary : report.methods) {
    if (!summary.valid) continue;
    const auto& top_acc = report.methods[static_cast<std::size_t>(top)].accuracies;
    summary.best = !welch_t_test(top_acc, summary.accuracies).significant;
  }
  for (std::size_t i = 0; i < n_methods; ++i) {
    for (std::size_t j = i + 1; j < n_methods; ++j) {
      if (!report.methods[i].valid || !report.methods[j].valid) continue;
      const WelchResult w =
          welch_t_test(report.methods[i].accuracies, report.methods[j].accuracies);
      report.pairs.push_back(
          {methods[i], methods[j], w.t, w.p, w.significant});
    }
  }
  return report;
}

std::string report_csv_text(const ExperimentReport& report) {
  std::string out = "method,mean,sd,n,best_flag\n";
  for (const auto& summary : report.methods) {
    out += summary.method;
    out += ',';
    out += format17(summary.mean);
    out += ',';
    out += format17(summary.sd);
    out += ',';
    out += std::to_string(summary.accuracies.size());
    out += ',';
    out += summary.best ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string report_json_text(const ExperimentReport& report) {
  nlohmann::ordered_json doc;
  doc["dataset"] = report.dataset;
  doc["runs"] = report.runs;
  doc["folds"] = report.folds;
  doc["train_fraction"] = report.train_fraction;
  doc["seed"] = report.seed;
  doc["methods"] = nlohmann::ordered_json::array();
  for (const auto& summary : report.methods) {
    nlohmann::ordered_json m;
    m["method"] = summary.method;
    m["mean"] = summary.mean;
    m["sd"] = summary.sd;
    m["n"] = summary.accuracies.size();
    m["valid"] = summary.valid;
    m["best"] = summary.best;
    m["failed_runs"] = summary.failed_runs;
    m["accuracies"] = summary.accuracies;
    doc["methods"].push_back(std::move(m));
  }
  doc["pairs"] = nlohmann::ordered_json::array();
  for (const auto& pair : report.pairs) {
    nlohmann::ordered_json p;
    p["a"] = pair.method_a;
    p["b"] = pair.method_b;
    p["t"] = pair.t;
    p["p"] = pair.p;
    p["significant"] = pair.significant;
    doc["pairs"].push_back(std::move(p));
  }
  return doc.dump(2) + "\n";
}

namespace {

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out.flush()) throw DataError("cannot write " + path);
}

}  // namespace

void write_report_csv(const ExperimentReport& report, const std::string& path) {
  write_text(report_csv_text(report), path);
}

void write_report_json(const ExperimentReport& report, const std::string& path) {
  write_text(report_json_text(report), path);
}

}  // namespace cadsvm
