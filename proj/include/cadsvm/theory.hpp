#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cadsvm/losses.hpp"

namespace cadsvm {

// Pointwise class-membership probabilities. Sum must be 1 within 1e-12.
struct ClassPosterior {
  double pi_plus = 0.0;
  double pi_zero = 0.0;
  double pi_minus = 0.0;

  void validate() const;
};

// Sign pattern of an (h, r) decision at a point: accept with a positive or
// negative prediction, or reject. Reject fixes only sign(r); h is free.
enum class Regime { AcceptPositive, AcceptNegative, Reject };

const char* regime_name(Regime regime);

// Expected 0-1-c-d risk of each regime at a point with the given posterior.
double expected_01cd_risk(const ClassPosterior& posterior, Regime regime,
                          double c, double d);

// Closed-form risk-optimal regime. Threshold inequalities are >=, so exact
// ties resolve toward acceptance; a tie between the two acceptance regimes
// resolves toward AcceptPositive.
Regime optimal_regime(const ClassPosterior& posterior, double c, double d);

// Expected ambiguity-aware surrogate risk at (h, r).
double expected_mha(const ClassPosterior& posterior, double h, double r,
                    const LossParams& params);

// Closed-form minimizer of the expected surrogate risk under calibrated
// parameters. The regime matches optimal_regime; the rejection point fixes
// h = 0 as a canonical representative.
struct SurrogateMinimizer {
  double h = 0.0;
  double r = 0.0;
  Regime regime = Regime::Reject;
};

SurrogateMinimizer surrogate_minimizer(const ClassPosterior& posterior,
                                       double c, double d);

// Difference between the expected 0-1-c risk under random +/-1 relabeling of
// the ambiguous mass and the expected 0-1-c-d risk at d = 1/2 - c. Equals
// pi_zero * c for any h != 0.
double relabel_risk_gap(const ClassPosterior& posterior, double h, double r,
                        double c);

// Checks that the even mixture of the labeled surrogate over both labels
// dominates the 0-1-c-d loss of an ambiguous sample at d = 1/2 - c.
bool pair_bound_holds(double h, double r, double c, const LossParams& params);

// Checks that minimizing the expected labeled surrogate under the relabeled
// distribution picks the same regime as optimal_regime at d = 1/2 - c.
bool relabel_regime_check(const ClassPosterior& posterior, double c);

// Outcome of a verification sweep. checked counts decided comparisons,
// skipped counts exact-tie points excluded from brute-force agreement.
struct SweepResult {
  bool pass = true;
  long checked = 0;
  long skipped = 0;
  std::string detail;
};

// Closed-form regime vs brute-force risk argmin over the probability simplex
// at the given step, for every (c, d) pair.
SweepResult regime_sweep(double step, const std::vector<double>& c_values,
                         const std::vector<double>& d_values);

// Grid minimization of the expected surrogate risk checked against the
// closed-form minimizer for random posteriors.
struct MinimizerSweepOptions {
  int posteriors_per_c = 20;
  double grid_lo = -6.0;
  double grid_hi = 6.0;
  double grid_step = 0.01;
  double refine_halfwidth = 0.02;
  double refine_step = 0.00025;
  double value_tol = 1e-3;
  // Regimes whose best and second-best closed-form values are closer than
  // this are resampled; grid argmins are unstable across near-ties.
  double min_regime_gap = 0.005;
  // When positive, replaces the calibrated surrogate scale. Used as a
  // negative control: a miscalibrated scale must make the sweep fail.
  double eta_override = 0.0;
};

SweepResult minimizer_grid_sweep(const std::vector<double>& c_values,
                                 std::uint64_t seed,
                                 const MinimizerSweepOptions& options = {});

// Pointwise domination of the rejection loss by its calibrated surrogate:
// loss_mha >= loss_01cd on random (h, r, y, c, d) tuples, with no tolerance.
SweepResult surrogate_bound_sweep(long tuples, std::uint64_t seed);

// relabel_risk_gap == pi_zero * c to 1e-12 on random tuples.
SweepResult relabel_gap_sweep(int tuples, std::uint64_t seed);

// pair_bound_holds on random (h, r, c) samples.
SweepResult pair_bound_sweep(long samples, std::uint64_t seed);

// relabel_regime_check over the probability simplex at the given step,
// skipping exact ties, plus a closed-form value cross-check at each point.
SweepResult relabel_regime_sweep(double step,
                                 const std::vector<double>& c_values);

}  // namespace cadsvm
