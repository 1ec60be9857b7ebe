#include "shle/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <string>

#include "shle/errors.hpp"

namespace shle::kernels {

namespace scalar {

void depth_from_disparity(const float* disp, float* depth, std::size_t n,
                          float focal_baseline) {
  const float nan = std::numeric_limits<float>::quiet_NaN();
  for (std::size_t i = 0; i < n; ++i) {
    const float d = disp[i];
    depth[i] = (std::isfinite(d) && d > 0.0f) ? focal_baseline / d : nan;
  }
}

double gaussian_weight_sum(const double* samples, std::size_t n, double x,
                           double inv_bandwidth) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (x - samples[i]) * inv_bandwidth;
    sum += std::exp(-0.5 * u * u);
  }
  return sum;
}

void corr_accumulate(const float* a, const float* b, std::size_t n,
                     CorrStats& acc) {
  for (std::size_t i = 0; i < n; ++i) {
    const double av = a[i];
    const double bv = b[i];
    acc.sum_a += av;
    acc.sum_b += bv;
    acc.sum_aa += av * av;
    acc.sum_bb += bv * bv;
    acc.sum_ab += av * bv;
  }
  acc.count += n;
}

}  // namespace scalar

namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Ops make_ops(Lane lane) {
  if (lane == Lane::avx2) {
    return Ops{&avx2::depth_from_disparity, &avx2::gaussian_weight_sum,
               &avx2::corr_accumulate, Lane::avx2};
  }
  return Ops{&scalar::depth_from_disparity, &scalar::gaussian_weight_sum,
             &scalar::corr_accumulate, Lane::scalar};
}

Lane pick_lane() {
  const char* env = std::getenv("SHLE_KERNELS");
  if (env != nullptr && std::strlen(env) > 0) {
    const std::string want(env);
    if (want == "scalar") return Lane::scalar;
    if (want == "avx2") {
      if (!avx2_available())
        throw ConfigurationError(
            "SHLE_KERNELS=avx2 requested but AVX2 kernels are unavailable");
      return Lane::avx2;
    }
    if (want != "auto")
      throw ConfigurationError("SHLE_KERNELS must be scalar, avx2 or auto, got '" +
                               want + "'");
  }
  return avx2_available() ? Lane::avx2 : Lane::scalar;
}

}  // namespace

bool avx2_available() { return avx2_compiled() && cpu_has_avx2_fma(); }

const Ops& active() {
  static const Ops ops = make_ops(pick_lane());
  return ops;
}

}  // namespace shle::kernels
