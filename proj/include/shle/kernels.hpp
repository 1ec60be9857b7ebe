#pragma once

#include <cstddef>

namespace shle::kernels {

// Running sums for zero-normalized cross-correlation between two patches,
// accumulated row by row in double precision.
struct CorrStats {
  double sum_a = 0.0;
  double sum_b = 0.0;
  double sum_aa = 0.0;
  double sum_bb = 0.0;
  double sum_ab = 0.0;
  std::size_t count = 0;
};

// out[i] = focal_baseline / disp[i] where disp[i] is finite and > 0,
// NaN otherwise.
using DepthFromDisparityFn = void (*)(const float* disp, float* depth,
                                      std::size_t n, float focal_baseline);

// Sum of exp(-0.5 * ((x - s) * inv_bandwidth)^2) over the samples.
using GaussianWeightSumFn = double (*)(const double* samples, std::size_t n,
                                       double x, double inv_bandwidth);

using CorrAccumulateFn = void (*)(const float* a, const float* b,
                                  std::size_t n, CorrStats& acc);

// Reference lane. Plain loops, std::exp, left-to-right accumulation.
namespace scalar {
void depth_from_disparity(const float* disp, float* depth, std::size_t n,
                          float focal_baseline);
double gaussian_weight_sum(const double* samples, std::size_t n, double x,
                           double inv_bandwidth);
void corr_accumulate(const float* a, const float* b, std::size_t n,
                     CorrStats& acc);
}  // namespace scalar

// AVX2/FMA lane. depth_from_disparity is bit-identical to scalar (elementwise
// IEEE division); the two reductions match scalar to ~1e-13 relative because
// accumulation order and the exp evaluation differ.
namespace avx2 {
void depth_from_disparity(const float* disp, float* depth, std::size_t n,
                          float focal_baseline);
double gaussian_weight_sum(const double* samples, std::size_t n, double x,
                           double inv_bandwidth);
void corr_accumulate(const float* a, const float* b, std::size_t n,
                     CorrStats& acc);
}  // namespace avx2

enum class Lane { scalar, avx2 };

struct Ops {
  DepthFromDisparityFn depth_from_disparity;
  GaussianWeightSumFn gaussian_weight_sum;
  CorrAccumulateFn corr_accumulate;
  Lane lane;
};

// True when the AVX2 lane was compiled into this binary.
bool avx2_compiled();
// True when the AVX2 lane is compiled and the CPU reports AVX2+FMA.
bool avx2_available();

// Dispatch table chosen once per process: AVX2 when available, scalar
// otherwise. SHLE_KERNELS=scalar|avx2|auto overrides the choice (forcing
// avx2 on a machine without it throws).
const Ops& active();

}  // namespace shle::kernels
