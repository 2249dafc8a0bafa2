#pragma once

#include <Eigen/Dense>
#include <vector>

namespace cadsvm::qp {

enum class SolveStatus { Converged, MaxIterations, NumericalFailure };

// Convex quadratic program
//   minimize 0.5 z'Pz + q'z  subject to  Gz <= h
// with P symmetric positive semidefinite. G may have zero rows
// (unconstrained problem).
struct QpProblem {
  Eigen::MatrixXd p;
  Eigen::VectorXd q;
  Eigen::MatrixXd g;
  Eigen::VectorXd h;

  // Validating constructor: checks dimensions, symmetrizes p (inputs must be
  // symmetric within 1e-10 beforehand), and rejects p with an eigenvalue
  // below -1e-8. The eigenvalue check is skipped above n = 500 for cost.
  static QpProblem make(Eigen::MatrixXd p, Eigen::VectorXd q, Eigen::MatrixXd g,
                        Eigen::VectorXd h);
};

struct QpSolution {
  Eigen::VectorXd z;
  Eigen::VectorXd duals;      // multipliers of Gz <= h, nonnegative
  double objective = 0.0;
  double kkt_residual = 0.0;  // max of stationarity, feasibility violation,
                              // and complementarity at the returned iterate
  SolveStatus status = SolveStatus::NumericalFailure;
  int iterations = 0;
};

struct SolverOptions {
  double tol = 1e-8;  // KKT max-norm target
  int max_iter = 100;
};

// Primal-dual interior-point solver (Mehrotra predictor-corrector on the
// normal equations). Singular Newton systems are retried with diagonal
// regularization starting at 1e-10 and escalating up to 3 times before the
// solver reports NumericalFailure. MaxIterations still returns the final
// iterate together with its residual.
QpSolution solve_qp(const QpProblem& problem, const SolverOptions& options = {});

// One linear inequality of a training problem, in function-value form:
//   xi_slack >= constant + h_coeff * h(x_sample) + r_coeff * r(x_sample)
// where h = Phi w and r = Phi u are the classifier and rejector evaluated at
// the training points. h_coeff = r_coeff = constant = 0 encodes xi >= 0.
struct ConstraintRow {
  int sample = 0;
  int slack = 0;
  double constant = 0.0;
  double h_coeff = 0.0;
  double r_coeff = 0.0;
};

// Training QP over stacked variables z = (w, u, xi):
//   minimize lambda/2 ||w||^2 + lambda_prime/2 ||u||^2
//            + 0.5 w' p_extra w + xi_cost' xi
//   subject to the constraint rows above.
// The u block is present only when with_rejector is set. Every slack must be
// bounded by at least one row, each slack references exactly one sample, and
// no sample owns two slacks.
struct TrainingProblem {
  Eigen::MatrixXd design;            // N_s x N_b basis expansion Phi
  std::vector<ConstraintRow> rows;
  int n_slack = 0;
  bool with_rejector = false;
  Eigen::VectorXd xi_cost;           // length n_slack
  double lambda = 0.0;
  double lambda_prime = 0.0;
  Eigen::MatrixXd p_extra;           // optional N_b x N_b PSD addition (empty = none)
};

// Materializes the training problem as a dense QpProblem with variable
// layout [w | u | xi].
QpProblem assemble_training_qp(const TrainingProblem& training);

// Same optimum as solve_qp(assemble_training_qp(t)) but runs the Newton
// steps on the slack-eliminated system, whose blocks are Phi' diag(.) Phi
// forms of size N_b instead of the full variable count.
QpSolution solve_training_qp(const TrainingProblem& training, const SolverOptions& options = {});

}  // namespace cadsvm::qp
