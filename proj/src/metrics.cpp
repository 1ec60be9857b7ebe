#include "shle/metrics.hpp"

#include <cmath>

#include "shle/errors.hpp"

namespace shle {

BoxMetrics box_metrics(const BBox& pred, const BBox& gt) {
  if (!(gt.w > 0.0) || !(gt.h > 0.0))
    throw DomainError("box_metrics: ground-truth box is degenerate");
  const double dx = pred.center_x() - gt.center_x();
  const double dy = pred.center_y() - gt.center_y();
  const double cpd = std::hypot(dx, dy);
  return {cpd, cpd / (gt.w * gt.h), cpd / std::hypot(gt.w, gt.h)};
}

HeightMetrics height_metrics(double predicted_m, double true_m) {
  if (!(true_m > 0.0))
    throw DomainError("height_metrics: true height must be > 0");
  const double he = predicted_m - true_m;
  return {he, std::abs(he) / true_m * 100.0};
}

HeightAggregate aggregate(const std::vector<HeightMetrics>& scenes) {
  if (scenes.empty()) throw DomainError("aggregate: no height metrics");
  HeightAggregate out;
  for (const HeightMetrics& m : scenes) {
    out.mean_abs_he += std::abs(m.he);
    out.mean_her += m.her;
  }
  out.mean_abs_he /= static_cast<double>(scenes.size());
  out.mean_her /= static_cast<double>(scenes.size());
  return out;
}

BoxMetrics aggregate(const std::vector<BoxMetrics>& scenes) {
  if (scenes.empty()) throw DomainError("aggregate: no box metrics");
  BoxMetrics out;
  for (const BoxMetrics& m : scenes) {
    out.cpd += m.cpd;
    out.rcpda += m.rcpda;
    out.rcpdh += m.rcpdh;
  }
  const double n = static_cast<double>(scenes.size());
  out.cpd /= n;
  out.rcpda /= n;
  out.rcpdh /= n;
  return out;
}

}  // namespace shle
