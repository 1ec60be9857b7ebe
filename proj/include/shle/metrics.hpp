#pragma once

#include <vector>

#include "shle/detection.hpp"

namespace shle {

// Stage-1 box localization metrics: center point distance and its
// normalizations by ground-truth area and diagonal.
struct BoxMetrics {
  double cpd = 0.0;
  double rcpda = 0.0;
  double rcpdh = 0.0;
};

// Stage-2 height metrics: signed error in meters and error rate in percent
// of the true height.
struct HeightMetrics {
  double he = 0.0;
  double her = 0.0;
};

// Corpus-level means; |he| is averaged, so both summary errors are
// magnitudes.
struct HeightAggregate {
  double mean_abs_he = 0.0;
  double mean_her = 0.0;
};

// Throws DomainError when the ground-truth box is degenerate (w or h <= 0).
BoxMetrics box_metrics(const BBox& pred, const BBox& gt);

// he = predicted - true; her = |he| / true * 100. Throws DomainError for
// true height <= 0.
HeightMetrics height_metrics(double predicted_m, double true_m);

// Field-wise means; both throw DomainError on empty input.
HeightAggregate aggregate(const std::vector<HeightMetrics>& scenes);
BoxMetrics aggregate(const std::vector<BoxMetrics>& scenes);

}  // namespace shle
