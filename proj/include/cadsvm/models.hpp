#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cadsvm/datasets.hpp"
#include "cadsvm/kernels.hpp"
#include "cadsvm/losses.hpp"

namespace cadsvm {

// A trained classifier/rejector pair over a Gaussian basis. u is all-zero
// for methods without a rejector. params holds the surrogate parameters
// where applicable (zeros otherwise); the remaining fields record the
// training hyperparameters for serialization.
struct TrainedModel {
  std::string method;
  BasisSet basis;
  Eigen::VectorXd w;
  Eigen::VectorXd u;
  LossParams params;
  double lambda = 0.0;
  double lambda_prime = 0.0;
  double sigma_prime = 0.0;
  double tau = 0.0;
};

struct Prediction {
  double h_value = 0.0;
  double r_value = 0.0;
  int label = -1;         // +1 iff h_value > 0
  bool rejected = false;  // r_value <= 0; diagnostic only, never scored
};

// Kernel SVM on positive/negative samples. Throws DataError on ambiguous
// samples or single-class data; throws NumericalError on solver failure.
TrainedModel train_svm(const Dataset& data, double lambda, double sigma);

// Relabels every ambiguous sample +1 or -1 with probability 1/2 (seeded),
// then trains an SVM on the result.
TrainedModel train_svm_rl(const Dataset& data, double lambda, double sigma,
                          std::uint64_t seed);

// SVM with a graph-Laplacian smoothness term tau * f'Lf over ALL samples
// (ambiguous ones act as unlabeled); the hinge term averages over labeled
// samples only.
TrainedModel train_lapsvm(const Dataset& data, double lambda, double sigma,
                          double sigma_prime, double tau);

// Sequential baseline: first fits the rejector as a weighted SVM separating
// non-ambiguous (target +1, weight c) from ambiguous (target -1, weight d)
// samples, then fits the classifier on the labeled samples the rejector
// accepts. Falls back to all labeled samples (method tag
// "two-step-fallback") when the accepted set lacks a class.
TrainedModel train_two_step(const Dataset& data, double lambda,
                            double lambda_prime, double sigma, double c,
                            double d);

// Classification with a reject option: joint (w, u) minimization of the
// max-hinge surrogate. Ambiguous samples are discarded entirely (basis
// included); the slack average runs over the retained count.
TrainedModel train_cro_svm(const Dataset& data, double lambda,
                           double lambda_prime, double sigma, double c);

// Relabels ambiguous samples as in train_svm_rl, then trains the
// reject-option machine on all samples.
TrainedModel train_cro_svm_rl(const Dataset& data, double lambda,
                              double lambda_prime, double sigma, double c,
                              std::uint64_t seed);

// Ambiguity-aware reject-option machine: all samples enter the basis and
// the slack average; ambiguous samples contribute only their rejection-side
// constraint. Surrogate parameters are the calibrated ones for (c, d).
TrainedModel train_cad_svm(const Dataset& data, double lambda,
                           double lambda_prime, double sigma, double c,
                           double d);

// As train_cad_svm with explicit surrogate parameters (test hook for
// comparing against the reject-option machine at eta = 1).
TrainedModel train_cad_svm_with_params(const Dataset& data, double lambda,
                                       double lambda_prime, double sigma,
                                       const LossParams& params);

// h, r, and the decision at one point. h_value = 0 maps to label -1 so a
// boundary positive counts as an error. Throws DataError on dimension
// mismatch.
Prediction predict(const TrainedModel& model, const Eigen::VectorXd& x);
std::vector<Prediction> predict_batch(const TrainedModel& model,
                                      const Eigen::MatrixXd& points);

// Fraction of +/-1-labeled rows predicted correctly; ambiguous rows are
// skipped. Throws DataError when the dataset has no labeled rows.
double labeled_accuracy(const TrainedModel& model, const Dataset& data);

// Flat text serialization at 17 significant digits; loading and re-saving
// reproduces the file byte for byte.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace cadsvm
