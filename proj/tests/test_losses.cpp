#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cadsvm/losses.hpp"
#include "cadsvm/rng.hpp"

using namespace cadsvm;

TEST_CASE("calibrated_params") {
  const LossParams p = calibrated_params(0.2, 0.2);
  CHECK(p.alpha == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(p.beta == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(p.eta == doctest::Approx(2.0 / 1.4).epsilon(1e-15));

  const LossParams p2 = calibrated_params(0.03, 0.5);
  CHECK(p2.alpha == doctest::Approx(1.88).epsilon(1e-15));
  CHECK(p2.beta == doctest::Approx(1.06).epsilon(1e-15));
  CHECK(p2.eta == doctest::Approx(2.0 / 1.06).epsilon(1e-15));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(calibrated_params(0.0, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(calibrated_params(0.5, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(calibrated_params(0.2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(calibrated_params(0.2, 1.5), std::invalid_argument);
  LossParams bad = calibrated_params(0.2, 0.2);
  bad.eta = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("binary losses") {
  CHECK(loss_01(0.7, 1) == 0.0);
  CHECK(loss_01(-0.7, 1) == 1.0);
  CHECK(loss_01(0.0, 1) == 1.0);  // zero margin counts as an error
  CHECK(loss_01(-0.7, -1) == 0.0);
  CHECK_THROWS_AS(loss_01(0.5, 0), std::invalid_argument);

  CHECK(loss_hinge(1.0, 1) == 0.0);
  CHECK(loss_hinge(0.0, 1) == 1.0);
  CHECK(loss_hinge(-1.0, 1) == 2.0);
  CHECK(loss_hinge(2.0, 1) == 0.0);
  CHECK_THROWS_AS(loss_hinge(0.5, 0), std::invalid_argument);
}

TEST_CASE("hinge dominates the 0-1 loss") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double h = rng.uniform(-3.0, 3.0);
    const int y = rng.below(2) == 0 ? -1 : 1;
    CHECK(loss_hinge(h, y) >= loss_01(h, y));
  }
}

TEST_CASE("rejection loss for labeled samples") {
  CHECK(loss_01c(1.0, 1.0, 1, 0.2) == 0.0);
  CHECK(loss_01c(-1.0, 1.0, 1, 0.2) == 1.0);
  CHECK(loss_01c(1.0, -1.0, 1, 0.2) == 0.2);  // rejected: flat cost c
  CHECK(loss_01c(1.0, 0.0, 1, 0.2) == 0.2);   // r = 0 counts as rejection
  CHECK_THROWS_AS(loss_01c(1.0, 1.0, 0, 0.2), std::invalid_argument);
}

TEST_CASE("rejection loss with ambiguous samples") {
  const LossParams p = calibrated_params(0.2, 0.35);
  CHECK(loss_01cd(0.5, 1.0, 0, p) == 0.35);  // accepted ambiguous costs d
  CHECK(loss_01cd(0.5, -1.0, 0, p) == 0.0);  // rejected ambiguous is free
  CHECK(loss_01cd(0.5, 1.0, 1, p) == loss_01c(0.5, 1.0, 1, p.c));
  CHECK(loss_01cd(-0.5, 1.0, -1, p) == loss_01c(-0.5, 1.0, -1, p.c));
}

TEST_CASE("max-hinge surrogate values") {
  const LossParams p = calibrated_params(0.2, 0.2);

  // The accept-positive minimizer of the expected surrogate: both active
  // branches vanish there.
  const double h_star = 2.0 / (1.0 - 4.0 * 0.2 * 0.2);
  const double r_star = 1.0 / (1.0 + 2.0 * 0.2);
  CHECK(loss_mh(h_star, r_star, 1, p) == doctest::Approx(0.0).epsilon(1e-12));

  // h = r = 0: margin branch dominates.
  CHECK(loss_mh(0.0, 0.0, 1, p) == doctest::Approx(1.0));
  CHECK_THROWS_AS(loss_mh(0.0, 0.0, 0, p), std::invalid_argument);
}

TEST_CASE("max-hinge-ambiguity surrogate values") {
  const LossParams p = calibrated_params(0.2, 0.2);
  CHECK(loss_mha(0.0, 0.0, 1, p) == doctest::Approx(1.0));
  CHECK(loss_mha(0.0, 0.0, 0, p) == doctest::Approx(p.eta * p.d));
  CHECK(loss_mha(0.0, -1.0 / p.beta, 0, p) == doctest::Approx(0.0));
  CHECK(loss_mha(0.0, -2.0, 0, p) == 0.0);
}

TEST_CASE("mha with eta = 1 and binary labels reduces to mh") {
  LossParams p = calibrated_params(0.2, 0.2);
  p.eta = 1.0;
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const double h = rng.uniform(-4.0, 4.0);
    const double r = rng.uniform(-4.0, 4.0);
    const int y = rng.below(2) == 0 ? -1 : 1;
    CHECK(loss_mha(h, r, y, p) == loss_mh(h, r, y, p));
  }
}

TEST_CASE("mha upper-bounds the discrete rejection loss") {
  Rng rng(13);
  for (int i = 0; i < 20000; ++i) {
    const double c = rng.uniform(0.01, 0.49);
    const double d = rng.uniform(0.01, 1.0);
    const LossParams p = calibrated_params(c, d);
    const double h = rng.uniform(-5.0, 5.0);
    const double r = rng.uniform(-5.0, 5.0);
    const int y = static_cast<int>(rng.below(3)) - 1;
    CHECK(loss_mha(h, r, y, p) >= loss_01cd(h, r, y, p));
  }
}

TEST_CASE("mha is convex in (h, r) along random segments") {
  Rng rng(17);
  const LossParams p = calibrated_params(0.2, 0.3);
  for (int i = 0; i < 2000; ++i) {
    const int y = static_cast<int>(rng.below(3)) - 1;
    const double h1 = rng.uniform(-4.0, 4.0), r1 = rng.uniform(-4.0, 4.0);
    const double h2 = rng.uniform(-4.0, 4.0), r2 = rng.uniform(-4.0, 4.0);
    const double t = rng.uniform();
    const double mid =
        loss_mha(t * h1 + (1 - t) * h2, t * r1 + (1 - t) * r2, y, p);
    const double chord = t * loss_mha(h1, r1, y, p) + (1 - t) * loss_mha(h2, r2, y, p);
    CHECK(mid <= chord + 1e-12);
  }
}
