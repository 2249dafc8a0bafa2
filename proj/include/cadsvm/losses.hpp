#pragma once

namespace cadsvm {

// Parameters of the rejection losses and their convex surrogates.
//   c: cost of rejecting a positively/negatively labeled sample, 0 < c < 0.5
//   d: cost of accepting an ambiguous sample, 0 < d <= 1
//   alpha, beta: slope and rejection-scale of the max-hinge surrogate, > 0
//   eta: weight of the surrogate's rejection branches, >= 1
struct LossParams {
  double c = 0.0;
  double d = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double eta = 1.0;

  // Throws std::invalid_argument when any range constraint fails.
  void validate() const;
};

// Surrogate parameters that make the max-hinge-ambiguity loss calibrated to
// the discrete rejection loss: alpha = 2(1-2c), beta = 1+2c, eta = 2/(1+2c).
LossParams calibrated_params(double c, double d);

// Binary error indicator: 1 when y*h <= 0. y must be +1 or -1.
double loss_01(double h, int y);

// Hinge: max(1 - y*h, 0). y must be +1 or -1.
double loss_hinge(double h, int y);

// Rejection loss for labeled samples: classification error when accepted
// (r > 0), flat cost c when rejected. y must be +1 or -1.
double loss_01c(double h, double r, int y, double c);

// Rejection loss extended to ambiguous samples (y = 0): such a sample costs
// d when accepted and nothing when rejected; labeled samples behave as in
// loss_01c. y must be in {-1, 0, +1}.
double loss_01cd(double h, double r, int y, const LossParams& params);

// Convex max-hinge surrogate of loss_01c:
//   max(1 + alpha/2*(r - y*h), c*(1 - beta*r), 0). y must be +1 or -1.
double loss_mh(double h, double r, int y, const LossParams& params);

// Convex max-hinge surrogate of loss_01cd, with the ambiguous branch gated
// by y^2:
//   y^2 * max(1 + alpha/2*(r - y*h), eta*c*(1 - beta*r), 0)
//   + (1 - y^2) * max(eta*d*(1 + beta*r), 0). y must be in {-1, 0, +1}.
double loss_mha(double h, double r, int y, const LossParams& params);

}  // namespace cadsvm
