#pragma once

#include <utility>
#include <vector>

#include "shle/geometry.hpp"

namespace shle {

struct KalmanParams {
  double q = 1e-3;   // process noise variance
  double r = 1e-2;   // measurement noise variance
  double p0 = 1.0;   // initial covariance

  void validate() const;  // throws DomainError unless all are > 0
};

// Raw and smoothed per-frame heights plus the scene-level average.
struct HeightSeries {
  std::vector<std::pair<int, double>> frames;    // (frame index, h_df)
  std::vector<std::pair<int, double>> filtered;  // (frame index, h_tf)
  double scene_height_m = 0.0;
};

// Mean of the min(n, |cloud|) smallest heights above ground. Throws
// Error(no_sample) on an empty cloud, DomainError for n < 1.
double average_lowest(const DevicePointCloud& cloud, int n);

// Scalar Kalman filter with identity transition and observation, seeded from
// the first measurement; the first output equals it exactly.
std::vector<double> kalman_smooth(const std::vector<double>& series,
                                  const KalmanParams& params);

// Arithmetic mean; throws Error(no_scene_estimate) on empty input.
double scene_height(const std::vector<double>& h_tf);

}  // namespace shle
