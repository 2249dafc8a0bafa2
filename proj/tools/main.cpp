#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cadsvm/datasets.hpp"
#include "cadsvm/errors.hpp"
#include "cadsvm/evaluation.hpp"
#include "cadsvm/losses.hpp"
#include "cadsvm/models.hpp"
#include "cadsvm/projection.hpp"
#include "cadsvm/rng.hpp"
#include "cadsvm/theory.hpp"
#include "json.hpp"

namespace {

using namespace cadsvm;

std::string format17(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string format3(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out.flush()) throw DataError("cannot write " + path);
}

void print_counts(const Dataset& data) {
  std::printf("%d rows: %d positive / %d negative / %d ambiguous\n",
              static_cast<int>(data.labels.size()), data.count(1),
              data.count(-1), data.count(0));
}

// Plain text table; row 0 is the header. Column 0 is left-aligned, the rest
// right-aligned.
std::string table_text(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t j = 0; j < row.size(); ++j) {
      width[j] = std::max(width[j], row[j].size());
    }
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      const std::size_t pad = width[j] - row[j].size();
      if (j > 0) out += "  ";
      if (j == 0) {
        out += row[j];
        if (j + 1 < row.size()) out.append(pad, ' ');
      } else {
        out.append(pad, ' ');
        out += row[j];
      }
    }
    out += '\n';
  }
  return out;
}

double training_surrogate_risk(const TrainedModel& model, const Dataset& data) {
  const std::vector<Prediction> preds = predict_batch(model, data.x);
  const bool cad = model.method == "cad-svm";
  const bool cro = model.method == "cro-svm" || model.method == "cro-svm-rl";
  double sum = 0.0;
  long counted = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int y = data.labels[i];
    if (cad) {
      sum += loss_mha(preds[i].h_value, preds[i].r_value, y, model.params);
    } else if (y == 0) {
      continue;
    } else if (cro) {
      sum += loss_mh(preds[i].h_value, preds[i].r_value, y, model.params);
    } else {
      sum += loss_hinge(preds[i].h_value, y);
    }
    ++counted;
  }
  if (counted == 0) throw DataError("no samples to score");
  return sum / static_cast<double>(counted);
}

int effective_jobs(int jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string joined_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

struct SweepColumn {
  std::string label;   // column value: "0.1" ... or "pd1" ...
  std::string header;  // column heading in the text table
  ExperimentReport report;
};

// Shared emission for the reproduce sweeps: one long CSV, one JSON document
// with the full per-run detail, and an aligned text table.
void emit_sweep(const std::string& stem, const std::string& key,
                const std::vector<SweepColumn>& columns,
                const std::string& out_dir, int runs, std::uint64_t seed) {
  std::string csv = key + ",method,mean,sd,n,best_flag\n";
  for (const auto& col : columns) {
    for (const auto& m : col.report.methods) {
      csv += col.label + "," + m.method + "," + format17(m.mean) + "," +
             format17(m.sd) + "," + std::to_string(m.accuracies.size()) + "," +
             (m.best ? "1" : "0") + "\n";
    }
  }

  nlohmann::ordered_json doc;
  doc["protocol"] = stem;
  doc["runs"] = runs;
  doc["seed"] = seed;
  doc["sweeps"] = nlohmann::ordered_json::array();
  for (const auto& col : columns) {
    nlohmann::ordered_json entry;
    entry[key] = col.label;
    entry["report"] = nlohmann::ordered_json::parse(report_json_text(col.report));
    doc["sweeps"].push_back(entry);
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"method"};
  for (const auto& col : columns) header.push_back(col.header);
  rows.push_back(header);
  for (std::size_t m = 0; m < columns.front().report.methods.size(); ++m) {
    std::vector<std::string> row{columns.front().report.methods[m].method};
    for (const auto& col : columns) {
      const MethodSummary& s = col.report.methods[m];
      std::string cell = format3(s.mean) + " +/- " + format3(s.sd);
      if (!s.valid) cell += " !";
      if (s.best) cell += " *";
      row.push_back(cell);
    }
    rows.push_back(row);
  }
  const std::string table =
      "test accuracy, mean +/- sd over " + std::to_string(runs) +
      " runs; * marks the best set, ! a method over the failure budget\n\n" +
      table_text(rows);

  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create directory " + out_dir);
  }
  const std::string csv_path = joined_path(out_dir, stem + "_accuracy.csv");
  const std::string json_path = joined_path(out_dir, stem + "_accuracy.json");
  const std::string table_path = joined_path(out_dir, stem + "_table.txt");
  write_text(csv_path, csv);
  write_text(json_path, doc.dump(2) + "\n");
  write_text(table_path, table);

  std::fputs(table.c_str(), stdout);
  std::printf("wrote %s\n", csv_path.c_str());
  std::printf("wrote %s\n", json_path.c_str());
  std::printf("wrote %s\n", table_path.c_str());
}

void print_run_caveat(int runs) {
  if (runs != 500) {
    std::printf(
        "note: averaging over %d runs; the reference protocol used 500 "
        "(pass --runs 500 to match)\n",
        runs);
  }
}

struct TheoryCheck {
  std::string name;
  SweepResult result;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel classifiers with a reject option for data containing "
               "ambiguous samples"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "",
                 "key=value file; [section] names a subcommand, command-line "
                 "flags override the file");
  app.get_formatter()->column_width(26);

  int exit_code = 0;

  // generate
  auto* generate = app.add_subcommand("generate", "write a dataset CSV");
  generate->require_subcommand(1);

  struct {
    double r = 0.5;
    int total = 400;
    std::uint64_t seed = 1;
    std::string out;
  } gt;
  auto* gen_toy = generate->add_subcommand(
      "toy", "two-dimensional benchmark with a mixed upper half");
  gen_toy->add_option("--r", gt.r, "ambiguous fraction of the mixed half")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  gen_toy->add_option("--total", gt.total, "sample count")
      ->check(CLI::Range(4, 10000000))
      ->capture_default_str();
  gen_toy->add_option("--seed", gt.seed, "generator seed")
      ->capture_default_str();
  gen_toy->add_option("-o,--out", gt.out, "output CSV path")->required();
  gen_toy->callback([&] {
    const Dataset data = generate_toy({gt.r, gt.total, gt.seed});
    save_labeled_csv(data, gt.out);
    std::printf("wrote %s\n", gt.out.c_str());
    print_counts(data);
  });

  struct {
    std::string housing;
    std::uint64_t seed = 1;
    std::string out;
  } gp;
  const char* pd_help[3] = {
      "housing benchmark, banded labels (>23 positive, <19 negative)",
      "housing benchmark, middle band relabeled at random",
      "housing benchmark, split by a random hyperplane into mixed and "
      "separable parts"};
  for (int k = 0; k < 3; ++k) {
    const std::string name = "pd" + std::to_string(k + 1);
    auto* sub = generate->add_subcommand(name, pd_help[k]);
    sub->add_option("--housing", gp.housing, "housing regression CSV")
        ->required()
        ->check(CLI::ExistingFile);
    if (k > 0) {
      sub->add_option("--seed", gp.seed, "relabeling seed")
          ->capture_default_str();
    }
    sub->add_option("-o,--out", gp.out, "output CSV path")->required();
    sub->callback([&, k] {
      const RegressionTable table = load_regression_csv(gp.housing);
      Dataset data;
      if (k == 0) data = build_pd1(table);
      if (k == 1) data = build_pd2(table, gp.seed);
      if (k == 2) data = build_pd3(table, gp.seed);
      save_labeled_csv(data, gp.out);
      std::printf("wrote %s\n", gp.out.c_str());
      print_counts(data);
    });
  }

  // train
  struct {
    std::string method;
    std::string data;
    std::string out;
    double lambda = 1e-5;
    double lambda_prime = 1e-5;
    double sigma = std::pow(10.0, 0.5);
    double sigma_prime = std::pow(10.0, 0.5);
    double tau = 1e-2;
    double c = 0.2;
    double d = 0.2;
    bool cv = false;
    int folds = 5;
    std::uint64_t seed = 1;
  } tr;
  auto* train = app.add_subcommand("train", "train one model and save it");
  train->add_option("method", tr.method, "method tag")
      ->required()
      ->check(CLI::IsMember(known_methods()));
  train->add_option("data", tr.data, "dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--lambda", tr.lambda, "classifier regularization")
      ->capture_default_str();
  train
      ->add_option("--lambda-prime", tr.lambda_prime,
                   "rejector regularization")
      ->capture_default_str();
  train->add_option("--sigma", tr.sigma, "kernel width")
      ->capture_default_str();
  train
      ->add_option("--sigma-prime", tr.sigma_prime,
                   "graph-smoothing kernel width")
      ->capture_default_str();
  train->add_option("--tau", tr.tau, "graph-smoothing weight")
      ->capture_default_str();
  train->add_option("--c", tr.c, "rejection cost of a labeled sample")
      ->capture_default_str();
  train->add_option("--d", tr.d, "acceptance cost of an ambiguous sample")
      ->capture_default_str();
  train->add_flag("--cv", tr.cv,
                  "pick hyperparameters by k-fold cross-validation over the "
                  "default grids instead of the flags above");
  train->add_option("--folds", tr.folds, "cross-validation folds")
      ->check(CLI::Range(2, 20))
      ->capture_default_str();
  train->add_option("--seed", tr.seed, "seed for relabeling and fold shuffles")
      ->capture_default_str();
  train->add_option("-o,--out", tr.out, "model output path")->required();
  train->callback([&] {
    const Dataset data = load_labeled_csv(tr.data);
    HyperPoint point{tr.lambda, tr.lambda_prime, tr.sigma, tr.sigma_prime,
                     tr.tau, tr.c, tr.d};
    if (tr.cv) {
      const CvResult cv = cross_validate(tr.method, data, HyperGrid::defaults(),
                                         tr.folds, derive_seed(tr.seed, 0),
                                         derive_seed(tr.seed, 1));
      point = cv.best;
      std::printf("cross-validation accuracy %s (%d grid point failures)\n",
                  format17(cv.accuracy).c_str(), cv.failed_points);
    }
    const TrainedModel model =
        train_method(tr.method, data, point, derive_seed(tr.seed, 1));
    save_model(model, tr.out);
    std::printf("method %s\n", model.method.c_str());
    std::printf("lambda %s\n", format17(point.lambda).c_str());
    std::printf("lambda-prime %s\n", format17(point.lambda_prime).c_str());
    std::printf("sigma %s\n", format17(point.sigma).c_str());
    std::printf("sigma-prime %s\n", format17(point.sigma_prime).c_str());
    std::printf("tau %s\n", format17(point.tau).c_str());
    std::printf("c %s\n", format17(point.c).c_str());
    std::printf("d %s\n", format17(point.d).c_str());
    if (model.params.c > 0.0) {
      std::printf("alpha %s\n", format17(model.params.alpha).c_str());
      std::printf("beta %s\n", format17(model.params.beta).c_str());
      std::printf("eta %s\n", format17(model.params.eta).c_str());
    }
    std::printf("training surrogate risk %s\n",
                format17(training_surrogate_risk(model, data)).c_str());
    std::printf("wrote %s\n", tr.out.c_str());
  });

  // predict
  struct {
    std::string model;
    std::string data;
    std::string out = "-";
  } pr;
  auto* predict_cmd =
      app.add_subcommand("predict", "apply a saved model to a dataset");
  predict_cmd->add_option("model", pr.model, "model file")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("data", pr.data, "dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd
      ->add_option("-o,--out", pr.out, "output CSV path, '-' for stdout")
      ->capture_default_str();
  predict_cmd->callback([&] {
    const TrainedModel model = load_model(pr.model);
    const Dataset data = load_labeled_csv(pr.data);
    const std::vector<Prediction> preds = predict_batch(model, data.x);
    std::string text = "h,r,label,rejected\n";
    for (const Prediction& p : preds) {
      text += format17(p.h_value) + "," + format17(p.r_value) + "," +
              std::to_string(p.label) + "," + (p.rejected ? "1" : "0") + "\n";
    }
    if (pr.out == "-") {
      std::fputs(text.c_str(), stdout);
    } else {
      write_text(pr.out, text);
      std::printf("wrote %s (%zu rows)\n", pr.out.c_str(), preds.size());
    }
    if (data.count(1) + data.count(-1) > 0) {
      std::printf("labeled accuracy %s\n",
                  format17(labeled_accuracy(model, data)).c_str());
    }
  });

  // evaluate
  struct {
    std::string data;
    std::vector<std::string> methods = known_methods();
    int runs = 50;
    double split = 1.0 / 3.0;
    std::uint64_t seed = 1;
    int jobs = 0;
    std::string out = "report";
    std::vector<double> lambda, lambda_prime, sigma, sigma_prime, tau, c, d;
  } ev;
  auto* evaluate = app.add_subcommand(
      "evaluate", "repeated-split benchmark of several methods on one dataset");
  evaluate->add_option("data", ev.data, "dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate
      ->add_option("--methods", ev.methods,
                   "comma-separated method tags (default: all seven)")
      ->delimiter(',')
      ->check(CLI::IsMember(known_methods()));
  evaluate->add_option("--runs", ev.runs, "independent train/test splits")
      ->check(CLI::Range(2, 500))
      ->capture_default_str();
  evaluate->add_option("--split", ev.split, "train fraction of each split")
      ->check(CLI::Range(0.05, 0.95))
      ->capture_default_str();
  evaluate->add_option("--seed", ev.seed, "master seed")
      ->capture_default_str();
  evaluate
      ->add_option("--jobs", ev.jobs,
                   "worker threads, 0 = machine parallelism")
      ->check(CLI::Range(0, 256))
      ->capture_default_str();
  evaluate
      ->add_option("-o,--out", ev.out,
                   "output stem; writes <stem>.csv and <stem>.json")
      ->capture_default_str();
  evaluate->add_option("--lambda-grid", ev.lambda, "override the lambda grid")
      ->delimiter(',');
  evaluate
      ->add_option("--lambda-prime-grid", ev.lambda_prime,
                   "override the lambda' grid")
      ->delimiter(',');
  evaluate->add_option("--sigma-grid", ev.sigma, "override the sigma grid")
      ->delimiter(',');
  evaluate
      ->add_option("--sigma-prime-grid", ev.sigma_prime,
                   "override the sigma' grid")
      ->delimiter(',');
  evaluate->add_option("--tau-grid", ev.tau, "override the tau grid")
      ->delimiter(',');
  evaluate->add_option("--c-grid", ev.c, "override the c grid")->delimiter(',');
  evaluate->add_option("--d-grid", ev.d, "override the d grid")->delimiter(',');
  evaluate->callback([&] {
    const Dataset data = load_labeled_csv(ev.data);
    HyperGrid grid = HyperGrid::defaults();
    if (!ev.lambda.empty()) grid.lambda = ev.lambda;
    if (!ev.lambda_prime.empty()) grid.lambda_prime = ev.lambda_prime;
    if (!ev.sigma.empty()) grid.sigma = ev.sigma;
    if (!ev.sigma_prime.empty()) grid.sigma_prime = ev.sigma_prime;
    if (!ev.tau.empty()) grid.tau = ev.tau;
    if (!ev.c.empty()) grid.c = ev.c;
    if (!ev.d.empty()) grid.d = ev.d;
    const ExperimentReport report =
        run_experiment(data, ev.methods, ev.runs, ev.split, grid, ev.seed,
                       effective_jobs(ev.jobs));
    write_report_csv(report, ev.out + ".csv");
    write_report_json(report, ev.out + ".json");
    std::vector<std::vector<std::string>> rows{
        {"method", "mean", "sd", "n", "best"}};
    for (const MethodSummary& m : report.methods) {
      rows.push_back({m.method, format3(m.mean), format3(m.sd),
                      std::to_string(m.accuracies.size()),
                      m.best ? "*" : (m.valid ? "" : "!")});
    }
    std::fputs(table_text(rows).c_str(), stdout);
    std::printf("wrote %s.csv\n", ev.out.c_str());
    std::printf("wrote %s.json\n", ev.out.c_str());
  });

  // reproduce
  auto* reproduce = app.add_subcommand(
      "reproduce", "published-protocol sweeps with report tables");
  reproduce->require_subcommand(1);

  struct {
    int runs = 50;
    int total = 400;
    std::uint64_t seed = 1;
    int jobs = 0;
    std::string out_dir = ".";
  } rt;
  auto* rep_toy = reproduce->add_subcommand(
      "toy", "accuracy sweep over the ambiguity ratio r");
  rep_toy->add_option("--runs", rt.runs, "independent splits per ratio")
      ->check(CLI::Range(2, 500))
      ->capture_default_str();
  rep_toy->add_option("--total", rt.total, "samples per generated dataset")
      ->check(CLI::Range(12, 100000))
      ->capture_default_str();
  rep_toy->add_option("--seed", rt.seed, "master seed")->capture_default_str();
  rep_toy->add_option("--jobs", rt.jobs, "worker threads, 0 = machine parallelism")
      ->check(CLI::Range(0, 256))
      ->capture_default_str();
  rep_toy->add_option("--out-dir", rt.out_dir, "directory for report files")
      ->capture_default_str();
  rep_toy->callback([&] {
    print_run_caveat(rt.runs);
    const double ratios[] = {0.1, 0.3, 0.5, 0.7, 0.9};
    std::vector<SweepColumn> columns;
    for (int i = 0; i < 5; ++i) {
      char label[8];
      std::snprintf(label, sizeof(label), "%.1f", ratios[i]);
      std::printf("sweep r=%s: %d runs\n", label, rt.runs);
      std::fflush(stdout);
      const Dataset data =
          generate_toy({ratios[i], rt.total, derive_seed(rt.seed, i)});
      ExperimentReport report = run_experiment(
          data, known_methods(), rt.runs, 1.0 / 3.0, HyperGrid::defaults(),
          derive_seed(rt.seed, 100 + i), effective_jobs(rt.jobs));
      columns.push_back(
          {label, std::string("r=") + label, std::move(report)});
    }
    emit_sweep("toy", "r", columns, rt.out_dir, rt.runs, rt.seed);
  });

  struct {
    std::string housing;
    int runs = 50;
    std::uint64_t seed = 1;
    int jobs = 0;
    std::string out_dir = ".";
  } rp;
  auto* rep_pd = reproduce->add_subcommand(
      "pd", "accuracy on the three housing-derived benchmarks");
  rep_pd->add_option("--housing", rp.housing, "housing regression CSV")
      ->required()
      ->check(CLI::ExistingFile);
  rep_pd->add_option("--runs", rp.runs, "independent splits per dataset")
      ->check(CLI::Range(2, 500))
      ->capture_default_str();
  rep_pd->add_option("--seed", rp.seed, "master seed")->capture_default_str();
  rep_pd->add_option("--jobs", rp.jobs, "worker threads, 0 = machine parallelism")
      ->check(CLI::Range(0, 256))
      ->capture_default_str();
  rep_pd->add_option("--out-dir", rp.out_dir, "directory for report files")
      ->capture_default_str();
  rep_pd->callback([&] {
    print_run_caveat(rp.runs);
    const RegressionTable table = load_regression_csv(rp.housing);
    std::vector<SweepColumn> columns;
    for (int i = 0; i < 3; ++i) {
      Dataset data;
      if (i == 0) data = build_pd1(table);
      if (i == 1) data = build_pd2(table, derive_seed(rp.seed, 201));
      if (i == 2) data = build_pd3(table, derive_seed(rp.seed, 202));
      std::printf("sweep %s: %d runs\n", data.name.c_str(), rp.runs);
      std::fflush(stdout);
      ExperimentReport report = run_experiment(
          data, known_methods(), rp.runs, 1.0 / 3.0, HyperGrid::defaults(),
          derive_seed(rp.seed, 210 + i), effective_jobs(rp.jobs));
      columns.push_back({data.name, data.name, std::move(report)});
    }
    emit_sweep("pd", "dataset", columns, rp.out_dir, rp.runs, rp.seed);
  });

  // verify-theory
  struct {
    double step = 0.005;
    int posteriors = 20;
    long bound_tuples = 100000;
    int gap_tuples = 1000;
    long pair_samples = 100000;
    std::uint64_t seed = 1;
    double debug_eta = 0.0;
  } vt;
  auto* verify = app.add_subcommand(
      "verify-theory", "numeric sweeps over every closed-form claim");
  verify->add_option("--step", vt.step, "posterior simplex step")
      ->check(CLI::Range(1e-4, 0.5))
      ->capture_default_str();
  verify
      ->add_option("--posteriors", vt.posteriors,
                   "random posteriors per cost value in the minimizer sweep")
      ->check(CLI::Range(1, 2000))
      ->capture_default_str();
  verify
      ->add_option("--bound-tuples", vt.bound_tuples,
                   "tuples for the surrogate domination sweep")
      ->check(CLI::Range(static_cast<long>(1), static_cast<long>(10000000)))
      ->capture_default_str();
  verify
      ->add_option("--gap-tuples", vt.gap_tuples,
                   "tuples for the relabeling gap sweep")
      ->check(CLI::Range(1, 10000000))
      ->capture_default_str();
  verify
      ->add_option("--pair-samples", vt.pair_samples,
                   "samples for the paired bound sweep")
      ->check(CLI::Range(static_cast<long>(1), static_cast<long>(10000000)))
      ->capture_default_str();
  verify->add_option("--seed", vt.seed, "sweep seed")->capture_default_str();
  verify
      ->add_option("--debug-eta", vt.debug_eta,
                   "replace the calibrated surrogate scale in the minimizer "
                   "sweep (negative control; nonzero values must fail)")
      ->check(CLI::Range(0.0, 100.0))
      ->capture_default_str();
  verify->callback([&] {
    const std::vector<double> cs = {0.03, 0.06, 0.20, 0.45};
    const std::vector<double> ds = {0.03, 0.06, 0.20, 0.50};
    const std::vector<double> c_small = {0.03, 0.2, 0.45};
    MinimizerSweepOptions options;
    options.posteriors_per_c = vt.posteriors;
    options.eta_override = vt.debug_eta;
    std::vector<TheoryCheck> checks;
    checks.push_back({"surrogate-bound",
                      surrogate_bound_sweep(vt.bound_tuples,
                                            derive_seed(vt.seed, 0))});
    checks.push_back({"optimal-regime", regime_sweep(vt.step, cs, ds)});
    checks.push_back({"minimizer-calibration",
                      minimizer_grid_sweep(c_small, derive_seed(vt.seed, 1),
                                           options)});
    checks.push_back({"relabel-gap",
                      relabel_gap_sweep(vt.gap_tuples, derive_seed(vt.seed, 2))});
    checks.push_back({"pair-bound",
                      pair_bound_sweep(vt.pair_samples, derive_seed(vt.seed, 3))});
    checks.push_back({"relabel-regime", relabel_regime_sweep(vt.step, c_small)});
    bool all_pass = true;
    for (const TheoryCheck& check : checks) {
      const SweepResult& res = check.result;
      if (res.pass) {
        std::printf("%s: PASS (n=%ld, skipped %ld)\n", check.name.c_str(),
                    res.checked, res.skipped);
      } else {
        all_pass = false;
        std::printf("%s: FAIL after %ld checks\n  counterexample: %s\n",
                    check.name.c_str(), res.checked, res.detail.c_str());
      }
    }
    if (all_pass) {
      std::printf("all theory checks passed\n");
    } else {
      std::printf("theory check failure\n");
      exit_code = 4;
    }
  });

  // project-2d
  struct {
    std::string data;
    std::string out;
    std::string method = "pca";
  } pj;
  auto* project = app.add_subcommand(
      "project-2d", "flatten a dataset onto its top two principal axes");
  project->add_option("data", pj.data, "dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  project->add_option("--method", pj.method, "projection method")
      ->check(CLI::IsMember({"pca"}))
      ->capture_default_str();
  project->add_option("-o,--out", pj.out, "output CSV path")->required();
  project->callback([&] {
    const Dataset data = load_labeled_csv(pj.data);
    const Eigen::MatrixXd scores = project_2d(data.x);
    std::string text = "x,y,label\n";
    for (int i = 0; i < scores.rows(); ++i) {
      text += format17(scores(i, 0)) + "," + format17(scores(i, 1)) + "," +
              std::to_string(data.labels[i]) + "\n";
    }
    write_text(pj.out, text);
    std::printf("wrote %s (%d rows)\n", pj.out.c_str(),
                static_cast<int>(scores.rows()));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
  return exit_code;
}
