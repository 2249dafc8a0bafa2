#include <cassert>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

#include "kernels_internal.hpp"

namespace cadsvm::simd::scalar_impl {

namespace {

// exp(t) for t <= 0 via range reduction t = k*ln2 + r and a degree-13 Taylor
// polynomial on |r| <= ln2/2. std::fma keeps the rounding identical to the
// fused AVX2 path.
inline double exp_nonpos(double t) {
  using namespace detail;
  if (t < kExpCutoff) return 0.0;
  if (t > 0.0) t = 0.0;
  const double kd = std::nearbyint(t * kLog2E);
  double r = std::fma(-kLn2Hi, kd, t);
  r = std::fma(-kLn2Lo, kd, r);
  double p = kExpCoeffs[kExpDegree];
  for (int i = kExpDegree - 1; i >= 0; --i) p = std::fma(p, r, kExpCoeffs[i]);
  const auto k = static_cast<std::int64_t>(kd);
  const std::uint64_t bits = static_cast<std::uint64_t>(1023 + k) << 52;
  double scale;
  std::memcpy(&scale, &bits, sizeof(scale));
  return p * scale;
}

}  // namespace

void exp_scale(const double* x, double a, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = exp_nonpos(a * x[i]);
}

void sqdist_row(const double* x, const double* centers_t, int dim, int m, double* out) {
  for (int j = 0; j < m; ++j) out[j] = 0.0;
  for (int f = 0; f < dim; ++f) {
    const double xf = x[f];
    const double* row = centers_t + static_cast<std::size_t>(f) * m;
    for (int j = 0; j < m; ++j) {
      const double d = xf - row[j];
      out[j] = std::fma(d, d, out[j]);
    }
  }
}

void expected_mha_row(const double* h, int n, const MhaRow& row, double* min_val, int* min_idx) {
  assert(n > 0);
  double best = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < n; ++i) {
    const double u = std::fma(-row.half_alpha, h[i], row.t1);
    const double v = std::fma(row.half_alpha, h[i], row.t1);
    const double lu = std::max(std::max(u, row.b_branch), 0.0);
    const double lv = std::max(std::max(v, row.b_branch), 0.0);
    const double e = std::fma(row.pp, lu, std::fma(row.pm, lv, row.amb));
    if (e < best) {
      best = e;
      best_i = i;
    }
  }
  *min_val = best;
  *min_idx = best_i;
}

}  // namespace cadsvm::simd::scalar_impl
