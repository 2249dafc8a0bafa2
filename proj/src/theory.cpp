#include "cadsvm/theory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cadsvm/rng.hpp"
#include "cadsvm/simd.hpp"

namespace cadsvm {
namespace {

constexpr double kTieTol = 1e-12;

// Risks indexed in Regime declaration order.
std::array<double, 3> regime_risks(const ClassPosterior& p, double c, double d) {
  return {expected_01cd_risk(p, Regime::AcceptPositive, c, d),
          expected_01cd_risk(p, Regime::AcceptNegative, c, d),
          expected_01cd_risk(p, Regime::Reject, c, d)};
}

// Uniform sample over the probability simplex via a sorted pair of uniforms.
ClassPosterior random_posterior(Rng& rng) {
  double a = rng.uniform();
  double b = rng.uniform();
  if (a > b) std::swap(a, b);
  return {a, b - a, 1.0 - b};
}

std::string posterior_str(const ClassPosterior& p) {
  std::ostringstream out;
  out << "pi=(" << p.pi_plus << "," << p.pi_zero << "," << p.pi_minus << ")";
  return out.str();
}

simd::MhaRow surface_row(const ClassPosterior& p, double r,
                         const LossParams& params) {
  simd::MhaRow row;
  row.pp = p.pi_plus;
  row.pm = p.pi_minus;
  row.amb = p.pi_zero * std::max(params.eta * params.d * (1.0 + params.beta * r), 0.0);
  row.t1 = 1.0 + 0.5 * params.alpha * r;
  row.b_branch = params.eta * params.c * (1.0 - params.beta * r);
  row.half_alpha = 0.5 * params.alpha;
  return row;
}

struct GridMin {
  double value = 0.0;
  double h = 0.0;
  double r = 0.0;
};

// Minimum of the expected surrogate over {h_lo + i*h_step} x {r_lo + j*r_step}.
GridMin scan_surface(const ClassPosterior& p, const LossParams& params,
                     double h_lo, double h_hi, double h_step, double r_lo,
                     double r_hi, double r_step) {
  const int nh = static_cast<int>(std::llround((h_hi - h_lo) / h_step)) + 1;
  const int nr = static_cast<int>(std::llround((r_hi - r_lo) / r_step)) + 1;
  std::vector<double> h(nh);
  for (int i = 0; i < nh; ++i) h[i] = h_lo + i * h_step;

  GridMin best;
  bool first = true;
  for (int j = 0; j < nr; ++j) {
    const double r = r_lo + j * r_step;
    double row_min = 0.0;
    int row_idx = 0;
    simd::expected_mha_row(h.data(), nh, surface_row(p, r, params), &row_min,
                           &row_idx);
    if (first || row_min < best.value) {
      best = {row_min, h[row_idx], r};
      first = false;
    }
  }
  return best;
}

}  // namespace

void ClassPosterior::validate() const {
  const bool in_range = pi_plus >= 0.0 && pi_plus <= 1.0 && pi_zero >= 0.0 &&
                        pi_zero <= 1.0 && pi_minus >= 0.0 && pi_minus <= 1.0;
  if (!in_range || std::abs(pi_plus + pi_zero + pi_minus - 1.0) > 1e-12) {
    throw std::invalid_argument("ClassPosterior: entries must lie in [0,1] and sum to 1");
  }
}

const char* regime_name(Regime regime) {
  switch (regime) {
    case Regime::AcceptPositive: return "accept-positive";
    case Regime::AcceptNegative: return "accept-negative";
    case Regime::Reject: return "reject";
  }
  return "?";
}

double expected_01cd_risk(const ClassPosterior& posterior, Regime regime,
                          double c, double d) {
  switch (regime) {
    case Regime::AcceptPositive:
      return d * posterior.pi_zero + posterior.pi_minus;
    case Regime::AcceptNegative:
      return d * posterior.pi_zero + posterior.pi_plus;
    case Regime::Reject:
      return c * (posterior.pi_plus + posterior.pi_minus);
  }
  return 0.0;
}

Regime optimal_regime(const ClassPosterior& posterior, double c, double d) {
  const double pp = posterior.pi_plus;
  const double pm = posterior.pi_minus;
  const bool accept_pos = (c + d) * pp >= d + (1.0 - c - d) * pm;
  const bool accept_neg = (c + d) * pm >= d + (1.0 - c - d) * pp;
  if (accept_pos && accept_neg) {
    return pp >= pm ? Regime::AcceptPositive : Regime::AcceptNegative;
  }
  if (accept_pos) return Regime::AcceptPositive;
  if (accept_neg) return Regime::AcceptNegative;
  return Regime::Reject;
}

double expected_mha(const ClassPosterior& posterior, double h, double r,
                    const LossParams& params) {
  return posterior.pi_plus * loss_mha(h, r, +1, params) +
         posterior.pi_zero * loss_mha(h, r, 0, params) +
         posterior.pi_minus * loss_mha(h, r, -1, params);
}

SurrogateMinimizer surrogate_minimizer(const ClassPosterior& posterior,
                                       double c, double d) {
  SurrogateMinimizer m;
  m.regime = optimal_regime(posterior, c, d);
  switch (m.regime) {
    case Regime::AcceptPositive:
      m.h = 2.0 / (1.0 - 4.0 * c * c);
      m.r = 1.0 / (1.0 + 2.0 * c);
      break;
    case Regime::AcceptNegative:
      m.h = -2.0 / (1.0 - 4.0 * c * c);
      m.r = 1.0 / (1.0 + 2.0 * c);
      break;
    case Regime::Reject:
      m.h = 0.0;
      m.r = -1.0 / (1.0 + 2.0 * c);
      break;
  }
  return m;
}

double relabel_risk_gap(const ClassPosterior& posterior, double h, double r,
                        double c) {
  const double z_plus = posterior.pi_plus + 0.5 * posterior.pi_zero;
  const double z_minus = posterior.pi_minus + 0.5 * posterior.pi_zero;
  const double relabeled = z_plus * loss_01c(h, r, +1, c) +
                           z_minus * loss_01c(h, r, -1, c);
  LossParams params;
  params.c = c;
  params.d = 0.5 - c;
  const double direct = posterior.pi_plus * loss_01cd(h, r, +1, params) +
                        posterior.pi_zero * loss_01cd(h, r, 0, params) +
                        posterior.pi_minus * loss_01cd(h, r, -1, params);
  return relabeled - direct;
}

bool pair_bound_holds(double h, double r, double c, const LossParams& params) {
  const double mixture =
      0.5 * loss_mh(h, r, +1, params) + 0.5 * loss_mh(h, r, -1, params);
  LossParams discrete;
  discrete.c = c;
  discrete.d = 0.5 - c;
  return mixture >= loss_01cd(h, r, 0, discrete);
}

bool relabel_regime_check(const ClassPosterior& posterior, double c) {
  const double scale = 2.0 / (1.0 + 2.0 * c);
  const double v_pos = scale * (2.0 * posterior.pi_minus + posterior.pi_zero);
  const double v_neg = scale * (2.0 * posterior.pi_plus + posterior.pi_zero);
  const double v_rej = scale * 2.0 * c;
  const bool pos_first = posterior.pi_plus >= posterior.pi_minus;
  const double v_acc = pos_first ? v_pos : v_neg;
  const Regime relabeled =
      v_acc <= v_rej
          ? (pos_first ? Regime::AcceptPositive : Regime::AcceptNegative)
          : Regime::Reject;
  return relabeled == optimal_regime(posterior, c, 0.5 - c);
}

SweepResult regime_sweep(double step, const std::vector<double>& c_values,
                         const std::vector<double>& d_values) {
  SweepResult result;
  const int n = static_cast<int>(std::llround(1.0 / step));
  for (double c : c_values) {
    for (double d : d_values) {
      for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n - i; ++j) {
          ClassPosterior p{i * step, 0.0, j * step};
          p.pi_zero = std::max(1.0 - p.pi_plus - p.pi_minus, 0.0);
          const auto risks = regime_risks(p, c, d);
          int best = 0;
          for (int k = 1; k < 3; ++k) {
            if (risks[k] < risks[best]) best = k;
          }
          bool tied = false;
          for (int k = 0; k < 3; ++k) {
            if (k != best && risks[k] - risks[best] <= kTieTol) tied = true;
          }
          if (tied) {
            ++result.skipped;
            continue;
          }
          ++result.checked;
          const Regime closed = optimal_regime(p, c, d);
          if (static_cast<int>(closed) != best) {
            result.pass = false;
            std::ostringstream out;
            out << posterior_str(p) << " c=" << c << " d=" << d
                << ": closed-form " << regime_name(closed) << ", risk argmin "
                << regime_name(static_cast<Regime>(best));
            result.detail = out.str();
            return result;
          }
        }
      }
    }
  }
  return result;
}

SweepResult minimizer_grid_sweep(const std::vector<double>& c_values,
                                 std::uint64_t seed,
                                 const MinimizerSweepOptions& options) {
  SweepResult result;
  for (std::size_t ci = 0; ci < c_values.size(); ++ci) {
    const double c = c_values[ci];
    Rng rng(derive_seed(seed, ci));
    for (int k = 0; k < options.posteriors_per_c; ++k) {
      // Resample until the best regime leads the runner-up by a clear gap;
      // near-ties make the grid argmin's sign pattern unstable.
      ClassPosterior p;
      double d = 0.0;
      const double scale = 4.0 / (1.0 + 2.0 * c);
      for (int attempt = 0;; ++attempt) {
        p = random_posterior(rng);
        d = rng.uniform(0.05, 1.0);
        auto risks = regime_risks(p, c, d);
        std::sort(risks.begin(), risks.end());
        if (scale * (risks[1] - risks[0]) >= options.min_regime_gap) break;
        if (attempt >= 1000) {
          result.pass = false;
          result.detail = "no posterior with a clear regime gap found";
          return result;
        }
      }

      LossParams params = calibrated_params(c, d);
      if (options.eta_override > 0.0) params.eta = options.eta_override;

      const SurrogateMinimizer closed = surrogate_minimizer(p, c, d);
      const double closed_value = expected_mha(p, closed.h, closed.r, params);
      const double stated_value =
          scale * expected_01cd_risk(p, closed.regime, c, d);

      const GridMin coarse =
          scan_surface(p, params, options.grid_lo, options.grid_hi,
                       options.grid_step, options.grid_lo, options.grid_hi,
                       options.grid_step);
      const GridMin fine = scan_surface(
          p, params, coarse.h - options.refine_halfwidth,
          coarse.h + options.refine_halfwidth, options.refine_step,
          coarse.r - options.refine_halfwidth,
          coarse.r + options.refine_halfwidth, options.refine_step);

      // Acceptance minimizers sit at |h| = 2/(1-4c^2); for large c that is
      // outside the grid, where only the one-sided attainment check applies.
      const bool inside = std::abs(closed.h) <= options.grid_hi &&
                          std::abs(closed.r) <= options.grid_hi;

      ++result.checked;
      std::string fail;
      if (std::abs(closed_value - stated_value) > 1e-12 * std::max(1.0, stated_value)) {
        fail = "closed-form value differs from the stated minimum";
      } else if (inside && std::abs(fine.value - closed_value) > options.value_tol) {
        fail = "grid minimum differs from the closed-form value";
      } else if (!inside && closed_value > fine.value + options.value_tol) {
        fail = "a grid point beats the closed-form value";
      } else {
        switch (closed.regime) {
          case Regime::AcceptPositive:
            if (!(fine.h > 0.0 && fine.r > 0.0)) fail = "argmin signs should be h>0, r>0";
            break;
          case Regime::AcceptNegative:
            if (!(fine.h < 0.0 && fine.r > 0.0)) fail = "argmin signs should be h<0, r>0";
            break;
          case Regime::Reject:
            if (!(fine.r < 0.0)) fail = "argmin sign should be r<0";
            break;
        }
      }
      if (!fail.empty()) {
        result.pass = false;
        std::ostringstream out;
        out << posterior_str(p) << " c=" << c << " d=" << d << " regime="
            << regime_name(closed.regime) << ": " << fail << " (closed "
            << closed_value << ", grid " << fine.value << " at h=" << fine.h
            << " r=" << fine.r << ")";
        result.detail = out.str();
        return result;
      }
    }
  }
  return result;
}

SweepResult surrogate_bound_sweep(long tuples, std::uint64_t seed) {
  SweepResult result;
  Rng rng(seed);
  for (long k = 0; k < tuples; ++k) {
    const double h = rng.uniform(-5.0, 5.0);
    const double r = rng.uniform(-5.0, 5.0);
    const int y = static_cast<int>(rng.below(3)) - 1;
    const double c = rng.uniform(0.01, 0.49);
    const double d = rng.uniform(0.001, 1.0);
    const LossParams params = calibrated_params(c, d);
    const double surrogate = loss_mha(h, r, y, params);
    const double target = loss_01cd(h, r, y, params);
    ++result.checked;
    if (surrogate < target) {
      result.pass = false;
      std::ostringstream out;
      out << "h=" << h << " r=" << r << " y=" << y << " c=" << c << " d=" << d
          << ": surrogate " << surrogate << " < loss " << target;
      result.detail = out.str();
      return result;
    }
  }
  return result;
}

SweepResult relabel_gap_sweep(int tuples, std::uint64_t seed) {
  SweepResult result;
  Rng rng(seed);
  for (int k = 0; k < tuples; ++k) {
    const ClassPosterior p = random_posterior(rng);
    double h = 0.0;
    do {
      h = rng.uniform(-5.0, 5.0);
    } while (std::abs(h) < 1e-9);
    const double r = rng.uniform(-5.0, 5.0);
    const double c = rng.uniform(0.01, 0.49);
    const double gap = relabel_risk_gap(p, h, r, c);
    ++result.checked;
    if (std::abs(gap - p.pi_zero * c) > 1e-12) {
      result.pass = false;
      std::ostringstream out;
      out << posterior_str(p) << " h=" << h << " r=" << r << " c=" << c
          << ": gap " << gap << " != " << p.pi_zero * c;
      result.detail = out.str();
      return result;
    }
  }
  return result;
}

SweepResult pair_bound_sweep(long samples, std::uint64_t seed) {
  SweepResult result;
  Rng rng(seed);
  for (long k = 0; k < samples; ++k) {
    const double h = rng.uniform(-5.0, 5.0);
    const double r = rng.uniform(-5.0, 5.0);
    const double c = rng.uniform(0.01, 0.49);
    const LossParams params = calibrated_params(c, 0.5 - c);
    ++result.checked;
    if (!pair_bound_holds(h, r, c, params)) {
      result.pass = false;
      std::ostringstream out;
      out << "h=" << h << " r=" << r << " c=" << c << ": bound violated";
      result.detail = out.str();
      return result;
    }
  }
  return result;
}

SweepResult relabel_regime_sweep(double step,
                                 const std::vector<double>& c_values) {
  SweepResult result;
  const int n = static_cast<int>(std::llround(1.0 / step));
  for (double c : c_values) {
    const double scale = 2.0 / (1.0 + 2.0 * c);
    const LossParams params = calibrated_params(c, 0.5 - c);
    const double r_acc = 1.0 / (1.0 + 2.0 * c);
    const double h_acc = 2.0 / (1.0 - 4.0 * c * c);
    const double r_rej = -1.0 / (1.0 + 2.0 * c);
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n - i; ++j) {
        ClassPosterior p{i * step, 0.0, j * step};
        p.pi_zero = std::max(1.0 - p.pi_plus - p.pi_minus, 0.0);
        const double z_plus = p.pi_plus + 0.5 * p.pi_zero;
        const double z_minus = p.pi_minus + 0.5 * p.pi_zero;

        // Candidate values, each both in closed form and through the loss.
        const std::array<double, 3> stated = {
            scale * (2.0 * p.pi_minus + p.pi_zero),
            scale * (2.0 * p.pi_plus + p.pi_zero), scale * 2.0 * c};
        const std::array<std::array<double, 2>, 3> points = {
            {{h_acc, r_acc}, {-h_acc, r_acc}, {0.0, r_rej}}};
        std::array<double, 3> evaluated;
        for (int k = 0; k < 3; ++k) {
          evaluated[k] = z_plus * loss_mh(points[k][0], points[k][1], +1, params) +
                         z_minus * loss_mh(points[k][0], points[k][1], -1, params);
          if (std::abs(evaluated[k] - stated[k]) > 1e-12) {
            result.pass = false;
            std::ostringstream out;
            out << posterior_str(p) << " c=" << c << ": candidate " << k
                << " evaluates to " << evaluated[k] << ", stated " << stated[k];
            result.detail = out.str();
            return result;
          }
        }

        int best = 0;
        for (int k = 1; k < 3; ++k) {
          if (evaluated[k] < evaluated[best]) best = k;
        }
        bool tied = false;
        for (int k = 0; k < 3; ++k) {
          if (k != best && evaluated[k] - evaluated[best] <= kTieTol) tied = true;
        }
        if (tied) {
          ++result.skipped;
          continue;
        }
        ++result.checked;
        const Regime direct = optimal_regime(p, c, 0.5 - c);
        if (static_cast<int>(direct) != best) {
          result.pass = false;
          std::ostringstream out;
          out << posterior_str(p) << " c=" << c << ": relabeled argmin "
              << regime_name(static_cast<Regime>(best)) << ", direct "
              << regime_name(direct);
          result.detail = out.str();
          return result;
        }
      }
    }
  }
  return result;
}

}  // namespace cadsvm
