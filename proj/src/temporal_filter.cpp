#include "shle/temporal_filter.hpp"

#include <algorithm>
#include <cmath>

#include "shle/errors.hpp"

namespace shle {

void KalmanParams::validate() const {
  if (!(q > 0.0) || !(r > 0.0) || !(p0 > 0.0))
    throw DomainError("kalman parameters q, r, p0 must all be > 0");
}

double average_lowest(const DevicePointCloud& cloud, int n) {
  if (n < 1) throw DomainError("average_lowest: n must be >= 1");
  if (cloud.points.empty())
    throw Error(ErrorCode::no_sample, "average_lowest: empty point cloud");

  std::vector<double> heights;
  heights.reserve(cloud.points.size());
  for (const WorldPoint& p : cloud.points) heights.push_back(p.y_w_prime);
  std::sort(heights.begin(), heights.end());

  const std::size_t k = std::min<std::size_t>(n, heights.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += heights[i];
  return sum / static_cast<double>(k);
}

std::vector<double> kalman_smooth(const std::vector<double>& series,
                                  const KalmanParams& params) {
  params.validate();
  std::vector<double> out;
  out.reserve(series.size());
  if (series.empty()) return out;

  double x = series.front();
  double p = params.p0;
  out.push_back(x);
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double p_pred = p + params.q;
    const double k = p_pred / (p_pred + params.r);
    x += k * (series[i] - x);
    p = (1.0 - k) * p_pred;
    out.push_back(x);
  }
  return out;
}

double scene_height(const std::vector<double>& h_tf) {
  if (h_tf.empty())
    throw Error(ErrorCode::no_scene_estimate,
                "scene_height: no per-frame heights");
  double sum = 0.0;
  for (double v : h_tf) sum += v;
  return sum / static_cast<double>(h_tf.size());
}

}  // namespace shle
