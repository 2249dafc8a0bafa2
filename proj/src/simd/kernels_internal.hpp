#pragma once

#include <array>
#include <cstddef>

#include "cadsvm/simd.hpp"

namespace cadsvm::simd {

// Shared constants of the exp kernel. Both implementations must use exactly
// these values and the same operation order; the equivalence tests assert
// bit-identical output across levels.
namespace detail {

// Below this argument the true exp is subnormal; every level returns 0.0.
inline constexpr double kExpCutoff = -708.390;
inline constexpr double kLog2E = 1.4426950408889634074;
// Cody-Waite split of ln 2; the high part has 20 trailing zero mantissa bits
// so k * kLn2Hi is exact for |k| < 2^20.
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr int kExpDegree = 13;

constexpr std::array<double, kExpDegree + 1> exp_taylor_coeffs() {
  std::array<double, kExpDegree + 1> c{};
  c[0] = 1.0;
  for (int i = 1; i <= kExpDegree; ++i) c[i] = c[i - 1] / static_cast<double>(i);
  return c;
}

inline constexpr std::array<double, kExpDegree + 1> kExpCoeffs = exp_taylor_coeffs();

}  // namespace detail

namespace scalar_impl {
void exp_scale(const double* x, double a, double* y, std::size_t n);
void sqdist_row(const double* x, const double* centers_t, int dim, int m, double* out);
void expected_mha_row(const double* h, int n, const MhaRow& row, double* min_val, int* min_idx);
}  // namespace scalar_impl

namespace avx2_impl {
void exp_scale(const double* x, double a, double* y, std::size_t n);
void sqdist_row(const double* x, const double* centers_t, int dim, int m, double* out);
void expected_mha_row(const double* h, int n, const MhaRow& row, double* min_val, int* min_idx);
}  // namespace avx2_impl

}  // namespace cadsvm::simd
