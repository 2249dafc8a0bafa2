#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cadsvm/datasets.hpp"
#include "cadsvm/models.hpp"

namespace cadsvm {

// Candidate values for every tunable hyperparameter. A method draws only the
// dimensions it uses; the others stay zero in the enumerated points.
struct HyperGrid {
  std::vector<double> lambda;
  std::vector<double> lambda_prime;
  std::vector<double> sigma;
  std::vector<double> sigma_prime;
  std::vector<double> tau;
  std::vector<double> c;
  std::vector<double> d;

  static HyperGrid defaults();
  void validate() const;  // every list nonempty
};

struct HyperPoint {
  double lambda = 0.0;
  double lambda_prime = 0.0;
  double sigma = 0.0;
  double sigma_prime = 0.0;
  double tau = 0.0;
  double c = 0.0;
  double d = 0.0;
};

// Canonical method tags, in report order.
const std::vector<std::string>& known_methods();

// All grid points over the method's active dimensions, nested in the fixed
// order lambda, lambda', sigma, sigma', tau, c, d with d varying fastest.
// Inactive dimensions stay zero. Throws DataError on an unknown method.
std::vector<HyperPoint> enumerate_grid(const std::string& method,
                                       const HyperGrid& grid);

// Trains one model at a grid point. Plain svm sees only the labeled rows;
// the -rl variants relabel their input with rl_seed; every other method
// receives the data unchanged.
TrainedModel train_method(const std::string& method, const Dataset& data,
                          const HyperPoint& point, std::uint64_t rl_seed);

struct CvResult {
  HyperPoint best;
  double accuracy = 0.0;  // mean validation accuracy of the winner
  int failed_points = 0;  // grid points whose training failed
};

// Stratified k-fold grid search maximizing mean validation accuracy, scored
// on labeled validation rows only. Ties keep the first point in enumeration
// order; grid points that fail to train are never chosen; when every point
// fails the last training error is rethrown.
CvResult cross_validate(const std::string& method, const Dataset& train,
                        const HyperGrid& grid, int folds, std::uint64_t seed,
                        std::uint64_t rl_seed);

// CDF of Student's t distribution via the continued-fraction regularized
// incomplete beta, absolute error below 1e-10. dof must be positive.
double student_t_cdf(double t, double dof);

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p = 1.0;
  bool significant = false;  // two-sided 5% level
};

// Unequal-variance two-sample t test with Welch-Satterthwaite degrees of
// freedom. Needs at least two values per side. When both sides have zero
// variance the result is significant exactly when the means differ.
WelchResult welch_t_test(const std::vector<double>& a,
                         const std::vector<double>& b);

// A method stays valid while its failures do not exceed 10% of the runs.
bool failure_budget_ok(int failed, int runs);

struct MethodSummary {
  std::string method;
  std::vector<double> accuracies;  // successful runs, in run order
  std::vector<int> failed_runs;    // run indices of recorded failures
  double mean = 0.0;
  double sd = 0.0;
  bool valid = false;
  bool best = false;
};

struct PairwiseTest {
  std::string method_a;
  std::string method_b;
  double t = 0.0;
  double p = 1.0;
  bool significant = false;
};

struct ExperimentReport {
  std::string dataset;
  int runs = 0;
  int folds = 0;
  double train_fraction = 0.0;
  std::uint64_t seed = 0;
  std::vector<MethodSummary> methods;
  std::vector<PairwiseTest> pairs;  // every pair of valid methods
};

// Repeated-split protocol: each run re-splits the dataset with a derived
// seed, cross-validates every method on the train part, retrains at the
// chosen point, and scores labeled accuracy on the test part. Run r of
// method m depends only on (seed, r, m), so any jobs > 1 schedule yields an
// identical report. The best set holds the top valid mean plus every valid
// method not significantly different from it; trainer failures are recorded
// per run and methods over the failure budget are flagged invalid.
ExperimentReport run_experiment(const Dataset& data,
                                const std::vector<std::string>& methods,
                                int runs, double train_fraction,
                                const HyperGrid& grid, std::uint64_t seed,
                                int jobs = 1);

// Fixed-format emission: CSV columns method,mean,sd,n,best_flag in method
// order, and a JSON document with the full per-run detail. Both are
// byte-deterministic for a given report.
std::string report_csv_text(const ExperimentReport& report);
std::string report_json_text(const ExperimentReport& report);
void write_report_csv(const ExperimentReport& report, const std::string& path);
void write_report_json(const ExperimentReport& report, const std::string& path);

}  // namespace cadsvm
