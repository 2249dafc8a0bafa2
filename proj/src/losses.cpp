#include "cadsvm/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cadsvm {

namespace {

void require_binary_label(int y, const char* fn) {
  if (y != 1 && y != -1) {
    throw std::invalid_argument(std::string(fn) + ": label must be +1 or -1, got " +
                                std::to_string(y));
  }
}

void require_ternary_label(int y, const char* fn) {
  if (y != 1 && y != -1 && y != 0) {
    throw std::invalid_argument(std::string(fn) + ": label must be in {-1, 0, +1}, got " +
                                std::to_string(y));
  }
}

}  // namespace

void LossParams::validate() const {
  if (!(c > 0.0 && c < 0.5)) {
    throw std::invalid_argument("LossParams: c must lie in (0, 0.5), got " + std::to_string(c));
  }
  if (!(d > 0.0 && d <= 1.0)) {
    throw std::invalid_argument("LossParams: d must lie in (0, 1], got " + std::to_string(d));
  }
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("LossParams: alpha and beta must be positive");
  }
  if (!(eta >= 1.0)) {
    throw std::invalid_argument("LossParams: eta must be >= 1, got " + std::to_string(eta));
  }
}

LossParams calibrated_params(double c, double d) {
  LossParams p;
  p.c = c;
  p.d = d;
  p.alpha = 2.0 * (1.0 - 2.0 * c);
  p.beta = 1.0 + 2.0 * c;
  p.eta = 2.0 / (1.0 + 2.0 * c);
  p.validate();
  return p;
}

double loss_01(double h, int y) {
  require_binary_label(y, "loss_01");
  return y * h <= 0.0 ? 1.0 : 0.0;
}

double loss_hinge(double h, int y) {
  require_binary_label(y, "loss_hinge");
  return std::max(1.0 - y * h, 0.0);
}

double loss_01c(double h, double r, int y, double c) {
  require_binary_label(y, "loss_01c");
  if (r <= 0.0) return c;
  return y * h <= 0.0 ? 1.0 : 0.0;
}

double loss_01cd(double h, double r, int y, const LossParams& params) {
  require_ternary_label(y, "loss_01cd");
  if (y == 0) return r > 0.0 ? params.d : 0.0;
  return loss_01c(h, r, y, params.c);
}

double loss_mh(double h, double r, int y, const LossParams& params) {
  require_binary_label(y, "loss_mh");
  const double margin = 1.0 + 0.5 * params.alpha * (r - y * h);
  const double reject = params.c * (1.0 - params.beta * r);
  return std::max(std::max(margin, reject), 0.0);
}

double loss_mha(double h, double r, int y, const LossParams& params) {
  require_ternary_label(y, "loss_mha");
  if (y == 0) {
    return std::max(params.eta * params.d * (1.0 + params.beta * r), 0.0);
  }
  const double margin = 1.0 + 0.5 * params.alpha * (r - y * h);
  const double reject = params.eta * params.c * (1.0 - params.beta * r);
  return std::max(std::max(margin, reject), 0.0);
}

}  // namespace cadsvm
