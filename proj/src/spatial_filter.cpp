#include "shle/spatial_filter.hpp"

#include <algorithm>
#include <cmath>

#include "shle/errors.hpp"
#include "shle/kernels.hpp"

namespace shle {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

// exp underflows to exactly 0.0 below about -745, i.e. for |x - s| > 39 h,
// so restricting the sum to a sorted window around x drops only terms that
// are bitwise zero: the windowed sum equals the full sum exactly.
double density_sorted(const std::vector<double>& sorted, double x, double h,
                      double inv_h) {
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x - 39.0 * h) -
                  sorted.begin();
  const auto hi = std::upper_bound(sorted.begin(), sorted.end(), x + 39.0 * h) -
                  sorted.begin();
  if (lo >= hi) return 0.0;
  const double sum = kernels::active().gaussian_weight_sum(
      sorted.data() + lo, static_cast<std::size_t>(hi - lo), x, inv_h);
  return sum / (h * static_cast<double>(sorted.size()) * kSqrt2Pi);
}

void check_kde_args(const std::vector<double>& samples, double h,
                    const char* who) {
  if (samples.empty())
    throw DomainError(std::string(who) + ": sample set is empty");
  if (!(h > 0.0) || !std::isfinite(h))
    throw DomainError(std::string(who) + ": bandwidth must be finite and > 0");
}

}  // namespace

double kde_density(double x, const std::vector<double>& samples, double h) {
  check_kde_args(samples, h, "kde_density");
  const double sum = kernels::active().gaussian_weight_sum(
      samples.data(), samples.size(), x, 1.0 / h);
  return sum / (h * static_cast<double>(samples.size()) * kSqrt2Pi);
}

double kde_mode(const std::vector<double>& samples, double h) {
  check_kde_args(samples, h, "kde_mode");

  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double inv_h = 1.0 / h;

  double best_x = sorted.front();
  double best_d = density_sorted(sorted, best_x, h, inv_h);
  // Tied anchors resolve to the smaller depth; the later grid refinement
  // moves only on a strict improvement, so a numerically flat plateau around
  // the winning anchor cannot drag the mode off it.
  auto consider_anchor = [&](double x) {
    const double d = density_sorted(sorted, x, h, inv_h);
    if (d > best_d || (d == best_d && x < best_x)) {
      best_d = d;
      best_x = x;
    }
  };
  auto consider = [&](double x) {
    const double d = density_sorted(sorted, x, h, inv_h);
    if (d > best_d) {
      best_d = d;
      best_x = x;
    }
  };

  // Anchor scan over the distinct sample values. Above the cap, anchors are
  // strided: inside any cluster dense enough to host the mode, consecutive
  // distinct values sit far closer than h apart, so the ±h refinement below
  // still reaches the peak.
  std::vector<double> uniq;
  uniq.reserve(sorted.size());
  std::unique_copy(sorted.begin(), sorted.end(), std::back_inserter(uniq));
  constexpr std::size_t kAnchorCap = 10240;
  const std::size_t stride =
      uniq.size() > kAnchorCap ? (uniq.size() + kAnchorCap - 1) / kAnchorCap : 1;
  for (std::size_t i = 0; i < uniq.size(); i += stride)
    consider_anchor(uniq[i]);

  // Local grid refinement: first pass covers ±h around the winning anchor at
  // step h/100; each later pass shrinks the step tenfold and re-centers.
  double step = h / 100.0;
  double span = h;
  while (true) {
    const long half = std::lround(span / step);
    const double center = best_x;
    for (long i = -half; i <= half; ++i) consider(center + static_cast<double>(i) * step);
    if (step <= 1e-10 * h) break;
    span = step;
    step /= 10.0;
  }
  return best_x;
}

DevicePointCloud depth_filter(const DevicePointCloud& cloud, double z_cen,
                              double sigma) {
  if (!(sigma > 0.0))
    throw DomainError("depth_filter: sigma must be > 0");
  DevicePointCloud out;
  out.source_frame = cloud.source_frame;
  for (const WorldPoint& p : cloud.points)
    if (p.z_cam >= z_cen - sigma && p.z_cam <= z_cen + sigma)
      out.points.push_back(p);
  if (out.points.empty())
    throw Error(ErrorCode::empty_after_filter,
                "depth_filter: no point within the depth interval");
  return out;
}

}  // namespace shle
