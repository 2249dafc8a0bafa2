#pragma once

#include <cstddef>

namespace cadsvm::simd {

// Instruction-set level of the batched kernels. The scalar path is the
// reference implementation; vector paths must produce bit-identical results
// (the scalar path uses std::fma so that fused multiply-adds round the same
// way on every level).
enum class IsaLevel { Scalar, Avx2 };

// Level selected at runtime from CPU capabilities. The environment variable
// CADSVM_SIMD overrides the probe: "scalar" forces the reference path,
// "avx2" requests AVX2 and falls back to scalar when unsupported.
IsaLevel active_isa();
const char* isa_name(IsaLevel level);
bool isa_available(IsaLevel level);

// y[i] = exp(a * x[i]). Intended for non-positive products (Gaussian kernel
// rows); a * x[i] > 0 is clamped to 0 and products below -708.39 flush to
// exactly 0.0 on every level.
void exp_scale(const double* x, double a, double* y, std::size_t n);
void exp_scale_at(IsaLevel level, const double* x, double a, double* y, std::size_t n);

// out[j] = squared Euclidean distance between x (length dim) and center j,
// where centers_t is a dim x m row-major matrix (feature f contiguous over
// centers). A center identical to x yields exactly 0.0.
void sqdist_row(const double* x, const double* centers_t, int dim, int m, double* out);
void sqdist_row_at(IsaLevel level, const double* x, const double* centers_t, int dim, int m,
                   double* out);

// One grid row of the expected max-hinge-ambiguity surface at fixed r:
//   E(h) = pp * max(t1 - half_alpha*h, b_branch, 0)
//        + pm * max(t1 + half_alpha*h, b_branch, 0) + amb
// Returns the row minimum and the first index attaining it.
struct MhaRow {
  double pp;          // posterior weight of the positive class
  double pm;          // posterior weight of the negative class
  double amb;         // ambiguous-class contribution, constant over the row
  double t1;          // margin branch constant 1 + half_alpha * r
  double b_branch;    // reject branch value eta*c*(1 - beta*r)
  double half_alpha;  // slope of the margin branch in h
};
void expected_mha_row(const double* h, int n, const MhaRow& row, double* min_val, int* min_idx);
void expected_mha_row_at(IsaLevel level, const double* h, int n, const MhaRow& row,
                         double* min_val, int* min_idx);

}  // namespace cadsvm::simd
