// AVX2 + FMA variants of the batched kernels. This translation unit is the
// only one compiled with -mavx2 -mfma; it is reached solely through the
// dispatch table after a CPU capability probe.

#include <immintrin.h>

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>

#include "kernels_internal.hpp"

namespace cadsvm::simd::avx2_impl {

namespace {

// Vector form of scalar_impl::exp_nonpos; identical constants and operation
// order make the two paths bit-identical.
inline __m256d exp_nonpos(__m256d t) {
  using namespace detail;
  const __m256d zero = _mm256_setzero_pd();
  const __m256d underflow = _mm256_cmp_pd(t, _mm256_set1_pd(kExpCutoff), _CMP_LT_OQ);
  t = _mm256_min_pd(t, zero);
  const __m256d kd =
      _mm256_round_pd(_mm256_mul_pd(t, _mm256_set1_pd(kLog2E)),
                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fmadd_pd(_mm256_set1_pd(-kLn2Hi), kd, t);
  r = _mm256_fmadd_pd(_mm256_set1_pd(-kLn2Lo), kd, r);
  __m256d p = _mm256_set1_pd(kExpCoeffs[kExpDegree]);
  for (int i = kExpDegree - 1; i >= 0; --i) {
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kExpCoeffs[i]));
  }
  const __m128i k32 = _mm256_cvtpd_epi32(kd);
  const __m256i k64 = _mm256_cvtepi32_epi64(k32);
  const __m256i bits =
      _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  const __m256d scale = _mm256_castsi256_pd(bits);
  const __m256d y = _mm256_mul_pd(p, scale);
  return _mm256_andnot_pd(underflow, y);
}

}  // namespace

void exp_scale(const double* x, double a, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, exp_nonpos(t));
  }
  if (i < n) {
    alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t j = i; j < n; ++j) buf[j - i] = a * x[j];
    alignas(32) double res[4];
    _mm256_store_pd(res, exp_nonpos(_mm256_load_pd(buf)));
    for (std::size_t j = i; j < n; ++j) y[j] = res[j - i];
  }
}

void sqdist_row(const double* x, const double* centers_t, int dim, int m, double* out) {
  int j = 0;
  for (; j + 4 <= m; j += 4) _mm256_storeu_pd(out + j, _mm256_setzero_pd());
  for (; j < m; ++j) out[j] = 0.0;
  for (int f = 0; f < dim; ++f) {
    const __m256d xf = _mm256_set1_pd(x[f]);
    const double* row = centers_t + static_cast<std::size_t>(f) * m;
    j = 0;
    for (; j + 4 <= m; j += 4) {
      const __m256d d = _mm256_sub_pd(xf, _mm256_loadu_pd(row + j));
      const __m256d acc = _mm256_fmadd_pd(d, d, _mm256_loadu_pd(out + j));
      _mm256_storeu_pd(out + j, acc);
    }
    const double xfs = x[f];
    for (; j < m; ++j) {
      const double d = xfs - row[j];
      out[j] = std::fma(d, d, out[j]);
    }
  }
}

void expected_mha_row(const double* h, int n, const MhaRow& row, double* min_val, int* min_idx) {
  assert(n > 0);
  double best = std::numeric_limits<double>::infinity();
  std::int64_t best_i = -1;
  const __m256d vslope = _mm256_set1_pd(row.half_alpha);
  const __m256d vnslope = _mm256_set1_pd(-row.half_alpha);
  const __m256d vt1 = _mm256_set1_pd(row.t1);
  const __m256d vb = _mm256_set1_pd(row.b_branch);
  const __m256d vamb = _mm256_set1_pd(row.amb);
  const __m256d vpp = _mm256_set1_pd(row.pp);
  const __m256d vpm = _mm256_set1_pd(row.pm);
  const __m256d zero = _mm256_setzero_pd();

  __m256d vmin = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256i vmin_idx = _mm256_set1_epi64x(-1);
  __m256i vidx = _mm256_setr_epi64x(0, 1, 2, 3);
  const __m256i vfour = _mm256_set1_epi64x(4);

  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vh = _mm256_loadu_pd(h + i);
    const __m256d u = _mm256_fmadd_pd(vnslope, vh, vt1);
    const __m256d v = _mm256_fmadd_pd(vslope, vh, vt1);
    const __m256d lu = _mm256_max_pd(_mm256_max_pd(u, vb), zero);
    const __m256d lv = _mm256_max_pd(_mm256_max_pd(v, vb), zero);
    const __m256d e = _mm256_fmadd_pd(vpp, lu, _mm256_fmadd_pd(vpm, lv, vamb));
    const __m256d lt = _mm256_cmp_pd(e, vmin, _CMP_LT_OQ);
    vmin = _mm256_blendv_pd(vmin, e, lt);
    vmin_idx = _mm256_castpd_si256(_mm256_blendv_pd(
        _mm256_castsi256_pd(vmin_idx), _mm256_castsi256_pd(vidx), lt));
    vidx = _mm256_add_epi64(vidx, vfour);
  }

  alignas(32) double lane_val[4];
  alignas(32) std::int64_t lane_idx[4];
  _mm256_store_pd(lane_val, vmin);
  _mm256_store_si256(reinterpret_cast<__m256i*>(lane_idx), vmin_idx);
  for (int lane = 0; lane < 4; ++lane) {
    if (lane_idx[lane] < 0) continue;
    if (lane_val[lane] < best || (lane_val[lane] == best && lane_idx[lane] < best_i)) {
      best = lane_val[lane];
      best_i = lane_idx[lane];
    }
  }

  for (; i < n; ++i) {
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
  *min_idx = static_cast<int>(best_i < 0 ? 0 : best_i);
}

}  // namespace cadsvm::simd::avx2_impl
