#include "cadsvm/models.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "active_set_oracle.hpp"
#include "cadsvm/datasets.hpp"
#include "cadsvm/errors.hpp"
#include "cadsvm/kernels.hpp"
#include "cadsvm/losses.hpp"
#include "cadsvm/qp.hpp"
#include "cadsvm/rng.hpp"
#include "doctest.h"

using namespace cadsvm;

namespace {

const double kSigmaNarrow = std::pow(10.0, -0.5);

// Two separated one-dimensional clusters, 20 points per class.
Dataset separable_pair() {
  Dataset data;
  data.name = "pair";
  data.x.resize(40, 1);
  data.labels.assign(40, 0);
  for (int i = 0; i < 20; ++i) {
    data.x(i, 0) = -2.0 - 0.05 * i;
    data.labels[static_cast<std::size_t>(i)] = -1;
    data.x(20 + i, 0) = +2.0 + 0.05 * i;
    data.labels[static_cast<std::size_t>(20 + i)] = +1;
  }
  return data;
}

// Clean clusters plus a block of 20 hopelessly interleaved labels near zero.
Dataset overlapping_middle() {
  Dataset data;
  data.name = "overlap";
  data.x.resize(60, 1);
  data.labels.assign(60, 0);
  for (int i = 0; i < 20; ++i) {
    data.x(i, 0) = -2.0 + 0.02 * i;
    data.labels[static_cast<std::size_t>(i)] = -1;
    data.x(20 + i, 0) = +2.0 - 0.02 * i;
    data.labels[static_cast<std::size_t>(20 + i)] = +1;
    data.x(40 + i, 0) = -0.19 + 0.02 * i;
    data.labels[static_cast<std::size_t>(40 + i)] = (i % 2 == 0) ? -1 : +1;
  }
  return data;
}

std::vector<double> h_values(const TrainedModel& model, const Eigen::MatrixXd& points) {
  std::vector<double> h;
  for (const auto& p : predict_batch(model, points)) h.push_back(p.h_value);
  return h;
}

int rejected_in(const std::vector<Prediction>& preds, int begin, int end) {
  int count = 0;
  for (int i = begin; i < end; ++i) count += preds[static_cast<std::size_t>(i)].rejected;
  return count;
}

// Direct objective of the plain hinge machine in coefficient space.
double svm_objective(const Eigen::VectorXd& w, const Eigen::MatrixXd& design,
                     const std::vector<int>& labels, double lambda) {
  const Eigen::VectorXd h = design * w;
  double loss = 0.0;
  for (int i = 0; i < h.size(); ++i) {
    loss += loss_hinge(h[i], labels[static_cast<std::size_t>(i)]);
  }
  return 0.5 * lambda * w.squaredNorm() + loss / static_cast<double>(h.size());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("svm separates clean clusters") {
  const Dataset data = separable_pair();
  const TrainedModel model = train_svm(data, 1e-3, 1.0);
  CHECK(model.method == "svm");
  CHECK(model.basis.centers.rows() == 40);
  CHECK(model.u.isZero(0.0));
  const auto preds = predict_batch(model, data.x);
  for (int i = 0; i < 40; ++i) {
    const auto& p = preds[static_cast<std::size_t>(i)];
    CHECK(p.h_value * data.labels[static_cast<std::size_t>(i)] > 0.0);
    CHECK(p.label == data.labels[static_cast<std::size_t>(i)]);
  }
  CHECK(labeled_accuracy(model, data) == 1.0);

  // The zero function scores exactly 1, so the optimum must do at least as well.
  const Eigen::MatrixXd design = design_matrix(data.x, model.basis);
  CHECK(svm_objective(model.w, design, data.labels, 1e-3) <= 1.0 + 1e-9);

  SUBCASE("ambiguous rows are refused") {
    Dataset bad = data;
    bad.labels[0] = 0;
    CHECK_THROWS_WITH_AS(train_svm(bad, 1e-3, 1.0), doctest::Contains("ambiguous"),
                         DataError);
  }
  SUBCASE("single-class data is refused") {
    Dataset bad = data;
    for (auto& y : bad.labels) y = +1;
    CHECK_THROWS_AS(train_svm(bad, 1e-3, 1.0), DataError);
  }
}

TEST_CASE("svm optimum matches exhaustive active-set search") {
  Dataset data;
  data.name = "six";
  data.x.resize(6, 1);
  data.x << -2.0, -1.2, -0.4, 0.6, 1.4, 2.0;
  data.labels = {-1, -1, -1, +1, +1, +1};
  const double lambda = 1e-2;
  const TrainedModel model = train_svm(data, lambda, 1.0);

  // Mirror of the trainer's constraint layout, solved by enumeration.
  qp::TrainingProblem training;
  training.design = design_matrix(data.x, model.basis);
  training.n_slack = 6;
  training.xi_cost = Eigen::VectorXd::Constant(6, 1.0 / 6.0);
  training.lambda = lambda;
  for (int i = 0; i < 6; ++i) {
    const double y = data.labels[static_cast<std::size_t>(i)];
    training.rows.push_back({i, i, 1.0, -y, 0.0});
    training.rows.push_back({i, i, 0.0, 0.0, 0.0});
  }
  const oracle::Result best = oracle::active_set_minimum(qp::assemble_training_qp(training));
  REQUIRE(best.found);

  const double f_star = svm_objective(model.w, training.design, data.labels, lambda);
  CHECK(std::abs(f_star - best.objective) <= 1e-6);

  // No nearby coefficient vector does better: the trainer found a local
  // minimum of the direct objective, and convexity makes it global.
  Rng rng(321);
  for (int trial = 0; trial < 40; ++trial) {
    Eigen::VectorXd dir(6);
    for (int i = 0; i < 6; ++i) dir[i] = rng.normal();
    dir.normalize();
    for (double radius : {1e-3, 1e-2}) {
      const Eigen::VectorXd shifted = model.w + radius * dir;
      CHECK(svm_objective(shifted, training.design, data.labels, lambda) >=
            f_star - 1e-9);
    }
  }
}

TEST_CASE("random relabeling is fair, seeded, and touches only ambiguous rows") {
  Dataset amb;
  amb.name = "amb";
  amb.x = Eigen::MatrixXd::Zero(10000, 1);
  amb.labels.assign(10000, 0);
  const Dataset out = relabel_ambiguous(amb, 77);
  int positive = 0;
  for (int y : out.labels) {
    CHECK((y == +1 || y == -1));
    positive += (y == +1);
  }
  CHECK(positive > 4800);
  CHECK(positive < 5200);

  SUBCASE("same seed reproduces, different seed differs") {
    const Dataset again = relabel_ambiguous(amb, 77);
    CHECK(again.labels == out.labels);
    const Dataset other = relabel_ambiguous(amb, 78);
    CHECK(other.labels != out.labels);
  }
  SUBCASE("labeled rows and features pass through") {
    Dataset mixed = separable_pair();
    mixed.labels[5] = 0;
    mixed.labels[25] = 0;
    const Dataset relabeled = relabel_ambiguous(mixed, 3);
    CHECK(relabeled.x == mixed.x);
    for (std::size_t i = 0; i < mixed.labels.size(); ++i) {
      if (mixed.labels[i] != 0) CHECK(relabeled.labels[i] == mixed.labels[i]);
      else CHECK(relabeled.labels[i] != 0);
    }
  }
}

TEST_CASE("svm-rl reduces to svm on clean data and is seed-deterministic") {
  const Dataset data = separable_pair();
  const TrainedModel rl = train_svm_rl(data, 1e-3, 1.0, 99);
  const TrainedModel sv = train_svm(data, 1e-3, 1.0);
  CHECK(rl.method == "svm-rl");
  CHECK((rl.w - sv.w).norm() == 0.0);

  Dataset mixed = generate_toy({0.5, 80, 21});
  const TrainedModel a = train_svm_rl(mixed, 1e-3, kSigmaNarrow, 5);
  const TrainedModel b = train_svm_rl(mixed, 1e-3, kSigmaNarrow, 5);
  CHECK((a.w - b.w).norm() == 0.0);
}

TEST_CASE("laplacian smoothing propagates labels along a chain") {
  // Two chains of nearby points with a gap between them; only the endpoints
  // carry labels. The smoothness term must pull each chain to its endpoint's
  // side and shrink f'Lf as tau grows.
  Dataset data;
  data.name = "chain";
  data.x.resize(8, 1);
  data.x << 0.0, 0.2, 0.4, 0.9, 1.0, 1.2, 1.4, 1.6;
  data.labels = {-1, 0, 0, 0, 0, 0, 0, +1};

  const Eigen::MatrixXd lap = graph_laplacian(data.x, 0.25);
  auto smoothness = [&](const TrainedModel& m) {
    const auto h = h_values(m, data.x);
    const Eigen::VectorXd f =
        Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<int>(h.size()));
    return f.dot(lap * f);
  };

  const TrainedModel flat = train_lapsvm(data, 1e-3, 0.25, 0.25, 0.0);
  const TrainedModel mid = train_lapsvm(data, 1e-3, 0.25, 0.25, 0.5);
  const TrainedModel heavy = train_lapsvm(data, 1e-3, 0.25, 0.25, 2.0);
  CHECK(mid.method == "lapsvm");

  const auto h_flat = h_values(flat, data.x);
  const auto h_mid = h_values(mid, data.x);
  for (int i : {1, 2}) CHECK(h_mid[static_cast<std::size_t>(i)] < -0.3);
  for (int i : {3, 4, 5, 6}) CHECK(h_mid[static_cast<std::size_t>(i)] > 0.3);
  // Smoothing strengthens the weakly positive point next to the gap.
  CHECK(h_mid[3] > h_flat[3] + 0.1);

  CHECK(smoothness(mid) < smoothness(flat) - 0.1);
  CHECK(smoothness(heavy) < smoothness(mid) - 0.1);

  SUBCASE("tau zero on labeled-only data reduces to svm") {
    const Dataset pair = separable_pair();
    const TrainedModel lap0 = train_lapsvm(pair, 1e-3, 1.0, 1.0, 0.0);
    const TrainedModel sv = train_svm(pair, 1e-3, 1.0);
    CHECK((lap0.w - sv.w).norm() == 0.0);
  }
  SUBCASE("negative tau is refused") {
    CHECK_THROWS_AS(train_lapsvm(data, 1e-3, 0.25, 0.25, -0.1), DataError);
  }
}

TEST_CASE("two-step fits the rejector first, then the classifier") {
  SUBCASE("clean data: classifier equals plain svm") {
    const Dataset clean = generate_toy({0.0, 120, 7});
    const TrainedModel ts = train_two_step(clean, 1e-5, 1e-5, kSigmaNarrow, 0.2, 0.2);
    const TrainedModel sv = train_svm(clean, 1e-5, kSigmaNarrow);
    CHECK(ts.method == "two-step");
    CHECK((ts.w - sv.w).norm() == 0.0);
  }

  SUBCASE("rejector is an svm on ambiguous-versus-rest at unit weights") {
    Dataset data = generate_toy({0.5, 120, 11});
    Dataset flipped = data;
    for (auto& y : flipped.labels) y = (y == 0) ? -1 : +1;
    const TrainedModel ts = train_two_step(data, 1e-4, 1e-3, 0.5, 1.0, 1.0);
    const TrainedModel sv = train_svm(flipped, 1e-3, 0.5);
    CHECK((ts.u - sv.w).norm() == 0.0);
  }

  SUBCASE("heavily ambiguous region is rejected") {
    const Dataset toy = generate_toy({0.9, 400, 5});
    const TrainedModel ts = train_two_step(toy, 1e-5, 1e-5, kSigmaNarrow, 0.2, 0.2);
    const auto preds = predict_batch(ts, toy.x);
    int upper_rejected = 0, ambiguous_rejected = 0, ambiguous_total = 0;
    for (int i = 0; i < toy.x.rows(); ++i) {
      const bool rej = preds[static_cast<std::size_t>(i)].rejected;
      if (toy.x(i, 1) >= 0.5) upper_rejected += rej;
      if (toy.labels[static_cast<std::size_t>(i)] == 0) {
        ++ambiguous_total;
        ambiguous_rejected += rej;
      }
    }
    CHECK(ambiguous_total == 180);
    CHECK(ambiguous_rejected >= 162);
    CHECK(upper_rejected >= 180);
  }

  SUBCASE("rejecting every labeled point falls back to all of them") {
    // Ambiguous mass sits on top of the labeled points, so with a heavy
    // ambiguity weight the rejector keeps nothing.
    Dataset swamp;
    swamp.name = "swamp";
    swamp.x.resize(54, 1);
    swamp.labels.assign(54, 0);
    swamp.x(0, 0) = -1.0; swamp.labels[0] = -1;
    swamp.x(1, 0) = -1.0; swamp.labels[1] = -1;
    swamp.x(2, 0) = +1.0; swamp.labels[2] = +1;
    swamp.x(3, 0) = +1.0; swamp.labels[3] = +1;
    for (int i = 4; i < 54; ++i) swamp.x(i, 0) = (i % 2 == 0) ? -1.0 : +1.0;
    const TrainedModel m = train_two_step(swamp, 1e-3, 1e-3, 1.0, 0.01, 1.0);
    CHECK(m.method == "two-step-fallback");
    const auto preds = predict_batch(m, swamp.x);
    CHECK(rejected_in(preds, 0, 54) == 54);
    CHECK(preds[2].h_value > 0.0);
    CHECK(preds[0].h_value < 0.0);
  }

  SUBCASE("nonpositive weights are refused") {
    const Dataset clean = generate_toy({0.0, 40, 7});
    CHECK_THROWS_AS(train_two_step(clean, 1e-5, 1e-5, 1.0, 0.0, 0.2), DataError);
    CHECK_THROWS_AS(train_two_step(clean, 1e-5, 1e-5, 1.0, 0.2, -0.1), DataError);
  }
}

TEST_CASE("reject-option machine keeps clean data and drops the overlap") {
  const Dataset clean = separable_pair();
  const TrainedModel confident = train_cro_svm(clean, 1e-5, 1e-5, 1.0, 0.45);
  CHECK(confident.method == "cro-svm");
  CHECK(rejected_in(predict_batch(confident, clean.x), 0, 40) == 0);
  CHECK(labeled_accuracy(confident, clean) == 1.0);

  const Dataset mixed = overlapping_middle();
  const TrainedModel cautious = train_cro_svm(mixed, 1e-5, 1e-5, 1.0, 0.03);
  const auto preds = predict_batch(cautious, mixed.x);
  CHECK(rejected_in(preds, 0, 40) == 0);
  CHECK(rejected_in(preds, 40, 60) == 20);

  SUBCASE("ambiguous rows are discarded entirely") {
    Dataset with_amb = clean;
    with_amb.x.conservativeResize(42, 1);
    with_amb.x(40, 0) = 0.3;
    with_amb.x(41, 0) = -0.1;
    with_amb.labels.push_back(0);
    with_amb.labels.push_back(0);
    const TrainedModel dropped = train_cro_svm(with_amb, 1e-5, 1e-5, 1.0, 0.45);
    CHECK(dropped.basis.centers.rows() == 40);
    CHECK((dropped.w - confident.w).norm() == 0.0);
    CHECK((dropped.u - confident.u).norm() == 0.0);
  }
  SUBCASE("rejection price outside (0, 0.5) is refused") {
    CHECK_THROWS_AS(train_cro_svm(clean, 1e-5, 1e-5, 1.0, 0.0), DataError);
    CHECK_THROWS_AS(train_cro_svm(clean, 1e-5, 1e-5, 1.0, 0.5), DataError);
  }
  SUBCASE("relabeling variant is seeded and reduces on clean data") {
    const TrainedModel rl = train_cro_svm_rl(clean, 1e-5, 1e-5, 1.0, 0.45, 17);
    CHECK(rl.method == "cro-svm-rl");
    CHECK((rl.w - confident.w).norm() == 0.0);
    Dataset amb = generate_toy({0.5, 80, 21});
    const TrainedModel a = train_cro_svm_rl(amb, 1e-4, 1e-4, kSigmaNarrow, 0.2, 5);
    const TrainedModel b = train_cro_svm_rl(amb, 1e-4, 1e-4, kSigmaNarrow, 0.2, 5);
    CHECK((a.w - b.w).norm() == 0.0);
    CHECK((a.u - b.u).norm() == 0.0);
  }
}

TEST_CASE("ambiguity-aware machine matches the reject-option machine on labeled data") {
  // With eta forced to 1 and no ambiguous rows, the two constraint systems
  // coincide row for row.
  const Dataset clean = generate_toy({0.0, 80, 13});
  const double c = 0.2;
  LossParams params;
  params.c = c;
  params.d = 0.3;
  params.alpha = 2.0 * (1.0 - 2.0 * c);
  params.beta = 1.0 + 2.0 * c;
  params.eta = 1.0;
  const TrainedModel cad = train_cad_svm_with_params(clean, 1e-4, 1e-4, 0.5, params);
  const TrainedModel cro = train_cro_svm(clean, 1e-4, 1e-4, 0.5, c);
  CHECK((cad.w - cro.w).norm() == 0.0);
  CHECK((cad.u - cro.u).norm() == 0.0);
  CHECK(cad.method == "cad-svm");
}

TEST_CASE("ambiguity-aware machine rejects the mixed region") {
  const Dataset toy = generate_toy({0.5, 400, 5});
  const TrainedModel model = train_cad_svm(toy, 1e-5, 1e-5, kSigmaNarrow, 0.2, 0.2);
  const auto preds = predict_batch(model, toy.x);
  int upper_rejected = 0, lower_rejected = 0;
  for (int i = 0; i < 400; ++i) {
    const bool rej = preds[static_cast<std::size_t>(i)].rejected;
    if (toy.x(i, 1) >= 0.5) upper_rejected += rej;
    else lower_rejected += rej;
  }
  CHECK(upper_rejected >= 160);
  CHECK(lower_rejected <= 100);

  SUBCASE("trained objective beats the zero model and dominates the target risk") {
    const int n = static_cast<int>(toy.labels.size());
    double surrogate = 0.0, target = 0.0;
    int ambiguous = 0;
    for (int i = 0; i < n; ++i) {
      const auto& p = preds[static_cast<std::size_t>(i)];
      const int y = toy.labels[static_cast<std::size_t>(i)];
      surrogate += loss_mha(p.h_value, p.r_value, y, model.params);
      target += loss_01cd(p.h_value, p.r_value, y, model.params);
      ambiguous += (y == 0);
    }
    surrogate /= n;
    target /= n;
    const double objective = surrogate + 0.5 * model.lambda * model.w.squaredNorm() +
                             0.5 * model.lambda_prime * model.u.squaredNorm();
    const double zero_model = (n - ambiguous + ambiguous * model.params.eta * model.params.d) /
                              static_cast<double>(n);
    CHECK(objective <= zero_model + 1e-9);
    CHECK(objective >= target);
  }

  SUBCASE("a distant ambiguous point is rejected and barely moves the classifier") {
    Dataset far = toy;
    far.x.conservativeResize(401, 2);
    far.x.row(400) << 50.0, 50.0;
    far.labels.push_back(0);
    const TrainedModel extended = train_cad_svm(far, 1e-5, 1e-5, kSigmaNarrow, 0.2, 0.2);
    Eigen::VectorXd far_point(2);
    far_point << 50.0, 50.0;
    const Prediction at_far = predict(extended, far_point);
    CHECK(at_far.rejected);
    CHECK(std::abs(at_far.h_value) < 1e-4);
    const auto h_base = h_values(model, toy.x);
    const auto h_ext = h_values(extended, toy.x);
    double max_shift = 0.0;
    for (std::size_t i = 0; i < h_base.size(); ++i) {
      max_shift = std::max(max_shift, std::abs(h_base[i] - h_ext[i]));
    }
    CHECK(max_shift < 0.1);
  }
}

TEST_CASE("prediction applies the stored expansion") {
  TrainedModel model;
  model.method = "svm";
  model.basis.centers = Eigen::MatrixXd::Zero(1, 2);
  model.basis.sigma = 1.0;
  model.w = Eigen::VectorXd::Zero(1);
  model.u = Eigen::VectorXd::Zero(1);

  SUBCASE("the zero model predicts negative and rejected everywhere") {
    Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
    const Prediction p = predict(model, origin);
    CHECK(p.h_value == 0.0);
    CHECK(p.label == -1);
    CHECK(p.rejected);
  }
  SUBCASE("a positive center weight flips the label at the center") {
    model.w[0] = 1.0;
    Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
    const Prediction p = predict(model, origin);
    CHECK(p.h_value == 1.0);
    CHECK(p.label == +1);
  }
  SUBCASE("equal coefficient vectors give h equal to r") {
    model.w[0] = 0.7;
    model.u[0] = 0.7;
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
      Eigen::VectorXd x(2);
      x << rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0);
      const Prediction p = predict(model, x);
      CHECK(p.h_value == p.r_value);
    }
  }
  SUBCASE("batch prediction equals pointwise prediction") {
    const Dataset toy = generate_toy({0.5, 60, 3});
    const TrainedModel trained = train_cad_svm(toy, 1e-4, 1e-4, kSigmaNarrow, 0.2, 0.2);
    Rng rng(12);
    Eigen::MatrixXd points(100, 2);
    for (int i = 0; i < 100; ++i) {
      points(i, 0) = rng.uniform(-1.0, 2.0);
      points(i, 1) = rng.uniform(-1.0, 2.0);
    }
    const auto batch = predict_batch(trained, points);
    for (int i = 0; i < 100; ++i) {
      const Prediction one = predict(trained, points.row(i).transpose());
      CHECK(batch[static_cast<std::size_t>(i)].h_value == one.h_value);
      CHECK(batch[static_cast<std::size_t>(i)].r_value == one.r_value);
      CHECK(batch[static_cast<std::size_t>(i)].label == one.label);
      CHECK(batch[static_cast<std::size_t>(i)].rejected == one.rejected);
    }
  }
  SUBCASE("feature dimension mismatch is refused") {
    Eigen::VectorXd wide(3);
    wide << 0.0, 0.0, 0.0;
    CHECK_THROWS_WITH_AS(predict(model, wide), doctest::Contains("dimension"),
                         DataError);
  }
}

TEST_CASE("model files round-trip byte for byte") {
  const Dataset toy = generate_toy({0.5, 60, 9});
  const TrainedModel model = train_cad_svm(toy, 1e-4, 1e-4, kSigmaNarrow, 0.2, 0.2);
  const std::string path = "model_roundtrip.txt";
  const std::string path2 = "model_roundtrip2.txt";
  save_model(model, path);
  const TrainedModel loaded = load_model(path);
  save_model(loaded, path2);
  CHECK(read_file(path) == read_file(path2));
  CHECK(loaded.method == model.method);

  const auto before = predict_batch(model, toy.x);
  const auto after = predict_batch(loaded, toy.x);
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(before[i].h_value == after[i].h_value);
    CHECK(before[i].r_value == after[i].r_value);
  }
  std::remove(path.c_str());
  std::remove(path2.c_str());

  SUBCASE("unrecognized and truncated files are refused") {
    std::ofstream("bad_model.txt") << "nonsense\n";
    CHECK_THROWS_WITH_AS(load_model("bad_model.txt"),
                         doctest::Contains("not a model file"), DataError);
    std::remove("bad_model.txt");
    std::ofstream("short_model.txt") << "cadsvm-model 1\nmethod svm\n";
    CHECK_THROWS_AS(load_model("short_model.txt"), DataError);
    std::remove("short_model.txt");
    CHECK_THROWS_AS(load_model("no_such_model.txt"), DataError);
  }
}

TEST_CASE("labeled accuracy skips ambiguous rows") {
  Dataset data = separable_pair();
  data.labels[0] = 0;
  data.labels[39] = 0;
  Dataset labeled_only = separable_pair();
  labeled_only.x = data.x.middleRows(1, 38).eval();
  labeled_only.labels.assign(data.labels.begin() + 1, data.labels.end() - 1);
  const TrainedModel model = train_svm(labeled_only, 1e-3, 1.0);
  CHECK(labeled_accuracy(model, data) == 1.0);

  SUBCASE("rejection never affects the score") {
    const TrainedModel rejecting = train_cro_svm(labeled_only, 1e-5, 1e-5, 1.0, 0.45);
    TrainedModel silenced = rejecting;
    silenced.u = Eigen::VectorXd::Zero(rejecting.u.size());
    CHECK(labeled_accuracy(silenced, data) == labeled_accuracy(rejecting, data));
  }
  SUBCASE("a wrong label lowers the score proportionally") {
    Dataset flipped = data;
    flipped.labels[1] = +1;
    CHECK(labeled_accuracy(model, flipped) == doctest::Approx(37.0 / 38.0));
  }
  SUBCASE("no labeled rows is an error") {
    Dataset empty = data;
    for (auto& y : empty.labels) y = 0;
    CHECK_THROWS_WITH_AS(labeled_accuracy(model, empty),
                         doctest::Contains("no labeled"), DataError);
  }
}
