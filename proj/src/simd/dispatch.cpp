#include <cstdlib>
#include <cstring>

#include "kernels_internal.hpp"

namespace cadsvm::simd {

namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

IsaLevel detect() {
  const bool hw = cpu_has_avx2_fma();
  if (const char* env = std::getenv("CADSVM_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return IsaLevel::Scalar;
    if (std::strcmp(env, "avx2") == 0) return hw ? IsaLevel::Avx2 : IsaLevel::Scalar;
  }
  return hw ? IsaLevel::Avx2 : IsaLevel::Scalar;
}

}  // namespace

IsaLevel active_isa() {
  static const IsaLevel level = detect();
  return level;
}

const char* isa_name(IsaLevel level) {
  switch (level) {
    case IsaLevel::Avx2:
      return "avx2";
    case IsaLevel::Scalar:
    default:
      return "scalar";
  }
}

bool isa_available(IsaLevel level) {
  return level == IsaLevel::Scalar || cpu_has_avx2_fma();
}

void exp_scale_at(IsaLevel level, const double* x, double a, double* y, std::size_t n) {
  if (level == IsaLevel::Avx2) {
    avx2_impl::exp_scale(x, a, y, n);
  } else {
    scalar_impl::exp_scale(x, a, y, n);
  }
}

void sqdist_row_at(IsaLevel level, const double* x, const double* centers_t, int dim, int m,
                   double* out) {
  if (level == IsaLevel::Avx2) {
    avx2_impl::sqdist_row(x, centers_t, dim, m, out);
  } else {
    scalar_impl::sqdist_row(x, centers_t, dim, m, out);
  }
}

void expected_mha_row_at(IsaLevel level, const double* h, int n, const MhaRow& row,
                         double* min_val, int* min_idx) {
  if (level == IsaLevel::Avx2) {
    avx2_impl::expected_mha_row(h, n, row, min_val, min_idx);
  } else {
    scalar_impl::expected_mha_row(h, n, row, min_val, min_idx);
  }
}

void exp_scale(const double* x, double a, double* y, std::size_t n) {
  exp_scale_at(active_isa(), x, a, y, n);
}

void sqdist_row(const double* x, const double* centers_t, int dim, int m, double* out) {
  sqdist_row_at(active_isa(), x, centers_t, dim, m, out);
}

void expected_mha_row(const double* h, int n, const MhaRow& row, double* min_val, int* min_idx) {
  expected_mha_row_at(active_isa(), h, n, row, min_val, min_idx);
}

}  // namespace cadsvm::simd
