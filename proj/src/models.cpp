#include "cadsvm/models.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cadsvm/errors.hpp"
#include "cadsvm/qp.hpp"
#include "cadsvm/rng.hpp"

namespace cadsvm {
namespace {

void require_both_classes(const Dataset& data, const char* method) {
  if (data.count(+1) == 0 || data.count(-1) == 0) {
    throw DataError(std::string(method) +
                    ": need at least one positive and one negative sample");
  }
}

qp::QpSolution checked_solve(const qp::TrainingProblem& training,
                             const char* method) {
  qp::QpSolution sol = qp::solve_training_qp(training);
  if (sol.status != qp::SolveStatus::Converged) {
    std::ostringstream out;
    out << method << ": solver "
        << (sol.status == qp::SolveStatus::MaxIterations
                ? "hit the iteration limit"
                : "failed")
        << " (KKT residual " << sol.kkt_residual << ")";
    throw NumericalError(out.str());
  }
  return sol;
}

void push_nonneg(qp::TrainingProblem& training, int sample, int slack) {
  training.rows.push_back({sample, slack, 0.0, 0.0, 0.0});
}

}  // namespace

TrainedModel train_svm(const Dataset& data, double lambda, double sigma) {
  data.validate();
  if (data.count(0) > 0) {
    throw DataError("svm: ambiguous samples not supported");
  }
  require_both_classes(data, "svm");
  const int n = static_cast<int>(data.x.rows());

  qp::TrainingProblem training;
  training.design = design_matrix(data.x, {data.x, sigma});
  training.n_slack = n;
  training.with_rejector = false;
  training.xi_cost = Eigen::VectorXd::Constant(n, 1.0 / n);
  training.lambda = lambda;
  for (int i = 0; i < n; ++i) {
    const double y = data.labels[static_cast<std::size_t>(i)];
    training.rows.push_back({i, i, 1.0, -y, 0.0});
    push_nonneg(training, i, i);
  }
  const qp::QpSolution sol = checked_solve(training, "svm");

  TrainedModel model;
  model.method = "svm";
  model.basis = {data.x, sigma};
  model.w = sol.z.head(n);
  model.u = Eigen::VectorXd::Zero(n);
  model.lambda = lambda;
  return model;
}

TrainedModel train_svm_rl(const Dataset& data, double lambda, double sigma,
                          std::uint64_t seed) {
  TrainedModel model = train_svm(relabel_ambiguous(data, seed), lambda, sigma);
  model.method = "svm-rl";
  return model;
}

TrainedModel train_lapsvm(const Dataset& data, double lambda, double sigma,
                          double sigma_prime, double tau) {
  data.validate();
  require_both_classes(data, "lapsvm");
  if (tau < 0.0) throw DataError("lapsvm: tau must be nonnegative");
  const int n = static_cast<int>(data.x.rows());

  qp::TrainingProblem training;
  training.design = design_matrix(data.x, {data.x, sigma});
  training.with_rejector = false;
  training.lambda = lambda;

  int n_labeled = 0;
  for (int i = 0; i < n; ++i) {
    const int y = data.labels[static_cast<std::size_t>(i)];
    if (y == 0) continue;
    const int slack = n_labeled++;
    training.rows.push_back({i, slack, 1.0, static_cast<double>(-y), 0.0});
    push_nonneg(training, i, slack);
  }
  training.n_slack = n_labeled;
  training.xi_cost = Eigen::VectorXd::Constant(n_labeled, 1.0 / n_labeled);

  const Eigen::MatrixXd laplacian = graph_laplacian(data.x, sigma_prime);
  const Eigen::MatrixXd smooth =
      training.design.transpose() * laplacian * training.design;
  training.p_extra = tau * (smooth + smooth.transpose());

  const qp::QpSolution sol = checked_solve(training, "lapsvm");

  TrainedModel model;
  model.method = "lapsvm";
  model.basis = {data.x, sigma};
  model.w = sol.z.head(n);
  model.u = Eigen::VectorXd::Zero(n);
  model.lambda = lambda;
  model.sigma_prime = sigma_prime;
  model.tau = tau;
  return model;
}

TrainedModel train_two_step(const Dataset& data, double lambda,
                            double lambda_prime, double sigma, double c,
                            double d) {
  data.validate();
  require_both_classes(data, "two-step");
  if (!(c > 0.0) || !(d > 0.0)) {
    throw DataError("two-step: class weights must be positive");
  }
  const int n = static_cast<int>(data.x.rows());

  // Step 1: weighted SVM pushing non-ambiguous samples to r > 0 and
  // ambiguous ones to r < 0. Solved in the classifier slot, stored as u.
  qp::TrainingProblem rejector;
  rejector.design = design_matrix(data.x, {data.x, sigma});
  rejector.n_slack = n;
  rejector.with_rejector = false;
  rejector.lambda = lambda_prime;
  rejector.xi_cost.resize(n);
  for (int i = 0; i < n; ++i) {
    const bool ambiguous = data.labels[static_cast<std::size_t>(i)] == 0;
    rejector.xi_cost(i) = (ambiguous ? d : c) / n;
    rejector.rows.push_back({i, i, 1.0, ambiguous ? 1.0 : -1.0, 0.0});
    push_nonneg(rejector, i, i);
  }
  const Eigen::VectorXd u = checked_solve(rejector, "two-step").z.head(n);
  const Eigen::VectorXd r = rejector.design * u;

  // Step 2: plain SVM on the labeled samples the rejector accepts.
  std::vector<int> accepted;
  std::vector<int> labeled;
  for (int i = 0; i < n; ++i) {
    const int y = data.labels[static_cast<std::size_t>(i)];
    if (y == 0) continue;
    labeled.push_back(i);
    if (r(i) > 0.0) accepted.push_back(i);
  }
  const Dataset accepted_set = select_rows(data, accepted);
  const bool fallback =
      accepted_set.count(+1) == 0 || accepted_set.count(-1) == 0;
  const std::vector<int>& train_idx = fallback ? labeled : accepted;
  const TrainedModel inner =
      train_svm(select_rows(data, train_idx), lambda, sigma);

  // The inner basis is a subset of the full sample set; re-embedding its
  // coefficients at the original rows leaves h unchanged.
  TrainedModel model;
  model.method = fallback ? "two-step-fallback" : "two-step";
  model.basis = {data.x, sigma};
  model.w = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < train_idx.size(); ++k) {
    model.w(train_idx[k]) = inner.w(static_cast<Eigen::Index>(k));
  }
  model.u = u;
  model.params.c = c;
  model.params.d = d;
  model.lambda = lambda;
  model.lambda_prime = lambda_prime;
  return model;
}

TrainedModel train_cro_svm(const Dataset& data, double lambda,
                           double lambda_prime, double sigma, double c) {
  data.validate();
  if (!(c > 0.0 && c < 0.5)) {
    throw DataError("cro-svm: c must lie in (0, 0.5)");
  }
  std::vector<int> labeled;
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    if (data.labels[i] != 0) labeled.push_back(static_cast<int>(i));
  }
  const Dataset retained = select_rows(data, labeled);
  require_both_classes(retained, "cro-svm");
  const int n = static_cast<int>(retained.x.rows());

  LossParams params;
  params.c = c;
  params.alpha = 2.0 * (1.0 - 2.0 * c);
  params.beta = 1.0 + 2.0 * c;
  params.eta = 1.0;

  qp::TrainingProblem training;
  training.design = design_matrix(retained.x, {retained.x, sigma});
  training.n_slack = n;
  training.with_rejector = true;
  training.xi_cost = Eigen::VectorXd::Constant(n, 1.0 / n);
  training.lambda = lambda;
  training.lambda_prime = lambda_prime;
  const double half_alpha = 0.5 * params.alpha;
  for (int i = 0; i < n; ++i) {
    const double y = retained.labels[static_cast<std::size_t>(i)];
    training.rows.push_back({i, i, 1.0, -y * half_alpha, half_alpha});
    training.rows.push_back({i, i, c, 0.0, -c * params.beta});
    push_nonneg(training, i, i);
  }
  const qp::QpSolution sol = checked_solve(training, "cro-svm");

  TrainedModel model;
  model.method = "cro-svm";
  model.basis = {retained.x, sigma};
  model.w = sol.z.head(n);
  model.u = sol.z.segment(n, n);
  model.params = params;
  model.lambda = lambda;
  model.lambda_prime = lambda_prime;
  return model;
}

TrainedModel train_cro_svm_rl(const Dataset& data, double lambda,
                              double lambda_prime, double sigma, double c,
                              std::uint64_t seed) {
  TrainedModel model = train_cro_svm(relabel_ambiguous(data, seed), lambda,
                                     lambda_prime, sigma, c);
  model.method = "cro-svm-rl";
  return model;
}

TrainedModel train_cad_svm_with_params(const Dataset& data, double lambda,
                                       double lambda_prime, double sigma,
                                       const LossParams& params) {
  params.validate();
  data.validate();
  require_both_classes(data, "cad-svm");
  const int n = static_cast<int>(data.x.rows());

  qp::TrainingProblem training;
  training.design = design_matrix(data.x, {data.x, sigma});
  training.n_slack = n;
  training.with_rejector = true;
  training.xi_cost = Eigen::VectorXd::Constant(n, 1.0 / n);
  training.lambda = lambda;
  training.lambda_prime = lambda_prime;
  const double half_alpha = 0.5 * params.alpha;
  const double ec = params.eta * params.c;
  const double ed = params.eta * params.d;
  for (int i = 0; i < n; ++i) {
    const double y = data.labels[static_cast<std::size_t>(i)];
    if (y != 0.0) {
      training.rows.push_back({i, i, 1.0, -y * half_alpha, half_alpha});
      training.rows.push_back({i, i, ec, 0.0, -ec * params.beta});
    } else {
      training.rows.push_back({i, i, ed, 0.0, ed * params.beta});
    }
    push_nonneg(training, i, i);
  }
  const qp::QpSolution sol = checked_solve(training, "cad-svm");

  TrainedModel model;
  model.method = "cad-svm";
  model.basis = {data.x, sigma};
  model.w = sol.z.head(n);
  model.u = sol.z.segment(n, n);
  model.params = params;
  model.lambda = lambda;
  model.lambda_prime = lambda_prime;
  return model;
}

TrainedModel train_cad_svm(const Dataset& data, double lambda,
                           double lambda_prime, double sigma, double c,
                           double d) {
  return train_cad_svm_with_params(data, lambda, lambda_prime, sigma,
                                   calibrated_params(c, d));
}

std::vector<Prediction> predict_batch(const TrainedModel& model,
                                      const Eigen::MatrixXd& points) {
  if (points.cols() != model.basis.centers.cols()) {
    throw DataError("predict: feature dimension mismatch");
  }
  const Eigen::MatrixXd phi = design_matrix(points, model.basis);
  const Eigen::VectorXd h = phi * model.w;
  const Eigen::VectorXd r = phi * model.u;
  std::vector<Prediction> out(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    Prediction& p = out[static_cast<std::size_t>(i)];
    p.h_value = h(i);
    p.r_value = r(i);
    p.label = h(i) > 0.0 ? +1 : -1;
    p.rejected = r(i) <= 0.0;
  }
  return out;
}

Prediction predict(const TrainedModel& model, const Eigen::VectorXd& x) {
  Eigen::MatrixXd point(1, x.size());
  point.row(0) = x.transpose();
  return predict_batch(model, point)[0];
}

double labeled_accuracy(const TrainedModel& model, const Dataset& data) {
  data.validate();
  const std::vector<Prediction> preds = predict_batch(model, data.x);
  long correct = 0;
  long labeled = 0;
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    const int y = data.labels[i];
    if (y == 0) continue;
    ++labeled;
    correct += preds[i].label == y;
  }
  if (labeled == 0) throw DataError("accuracy: no labeled samples");
  return static_cast<double>(correct) / static_cast<double>(labeled);
}

void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  char buffer[64];
  const auto num = [&buffer](double v) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return std::string(buffer);
  };
  const Eigen::Index m = model.basis.centers.rows();
  const Eigen::Index dim = model.basis.centers.cols();
  out << "cadsvm-model 1\n";
  out << "method " << model.method << '\n';
  out << "lambda " << num(model.lambda) << '\n';
  out << "lambda_prime " << num(model.lambda_prime) << '\n';
  out << "sigma_prime " << num(model.sigma_prime) << '\n';
  out << "tau " << num(model.tau) << '\n';
  out << "c " << num(model.params.c) << '\n';
  out << "d " << num(model.params.d) << '\n';
  out << "alpha " << num(model.params.alpha) << '\n';
  out << "beta " << num(model.params.beta) << '\n';
  out << "eta " << num(model.params.eta) << '\n';
  out << "sigma " << num(model.basis.sigma) << '\n';
  out << "centers " << m << ' ' << dim << '\n';
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      out << num(model.basis.centers(i, j)) << (j + 1 < dim ? ' ' : '\n');
    }
  }
  out << "w\n";
  for (Eigen::Index i = 0; i < m; ++i) {
    out << num(model.w(i)) << (i + 1 < m ? ' ' : '\n');
  }
  out << "u\n";
  for (Eigen::Index i = 0; i < m; ++i) {
    out << num(model.u(i)) << (i + 1 < m ? ' ' : '\n');
  }
  if (!out.flush()) throw DataError("cannot write " + path);
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  const auto fail = [&path](const std::string& what) {
    return DataError(path + ": " + what);
  };
  const auto expect_key = [&](const char* key) {
    std::string token;
    if (!(in >> token) || token != key) {
      throw fail(std::string("expected '") + key + "'");
    }
  };
  const auto read_double = [&](const char* key) {
    expect_key(key);
    double v = 0.0;
    if (!(in >> v)) throw fail(std::string("bad value for '") + key + "'");
    return v;
  };

  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "cadsvm-model" || version != 1) {
    throw fail("not a model file");
  }
  TrainedModel model;
  expect_key("method");
  if (!(in >> model.method)) throw fail("missing method tag");
  model.lambda = read_double("lambda");
  model.lambda_prime = read_double("lambda_prime");
  model.sigma_prime = read_double("sigma_prime");
  model.tau = read_double("tau");
  model.params.c = read_double("c");
  model.params.d = read_double("d");
  model.params.alpha = read_double("alpha");
  model.params.beta = read_double("beta");
  model.params.eta = read_double("eta");
  model.basis.sigma = read_double("sigma");
  expect_key("centers");
  Eigen::Index m = 0;
  Eigen::Index dim = 0;
  if (!(in >> m >> dim) || m < 1 || dim < 1) throw fail("bad basis shape");
  model.basis.centers.resize(m, dim);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (!(in >> model.basis.centers(i, j))) throw fail("truncated centers");
    }
  }
  expect_key("w");
  model.w.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(in >> model.w(i))) throw fail("truncated w");
  }
  expect_key("u");
  model.u.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(in >> model.u(i))) throw fail("truncated u");
  }
  return model;
}

}  // namespace cadsvm
