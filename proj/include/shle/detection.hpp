#pragma once

#include <optional>
#include <vector>

#include "shle/config.hpp"

namespace shle {

// Axis-aligned box in image coordinates, y growing downward.
struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double w = 0.0;
  double h = 0.0;
  double score = 0.0;

  double center_x() const { return x_min + w / 2.0; }
  double center_y() const { return y_min + h / 2.0; }
  double area() const { return w * h; }

  bool operator==(const BBox&) const = default;
};

struct DetectionSet {
  int frame_index = 0;
  std::vector<BBox> boxes;
};

// Per-frame candidate selection: drop the traffic-side half by center-x, drop
// the lower half by center-y, drop boxes touching the top edge, then take the
// best score (ties: larger area, then smaller x_min, then smaller y_min).
// Returns nothing when no box survives. Deterministic under any permutation
// of the input.
std::optional<BBox> filter_candidates(const DetectionSet& dets, double image_w,
                                      double image_h,
                                      const PipelineConfig& cfg);

// Grow the lower boundary by extension_px, clamped to the image bottom.
BBox extend_bbox(const BBox& box, double extension_px, double image_h);

}  // namespace shle
