#include "shle/detection.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "shle/errors.hpp"

namespace shle {

namespace {

// Strict total order making every sort below independent of input order:
// boxes that compare equal here are field-for-field identical and therefore
// interchangeable.
std::tuple<double, double, double, double, double> canon(const BBox& b) {
  return {b.center_x(), b.center_y(), b.w, b.h, b.score};
}

bool canon_less(const BBox& a, const BBox& b) { return canon(a) < canon(b); }

}  // namespace

std::optional<BBox> filter_candidates(const DetectionSet& dets, double image_w,
                                      double image_h,
                                      const PipelineConfig& cfg) {
  (void)image_w;
  (void)image_h;
  std::vector<BBox> boxes = dets.boxes;
  if (boxes.empty()) return std::nullopt;

  // (a) cut the half nearest the oncoming-traffic side: for right-hand
  // traffic the device over our lane sits to the right, so the left half
  // goes; left-hand traffic mirrors the rule.
  std::sort(boxes.begin(), boxes.end(), [&](const BBox& a, const BBox& b) {
    if (a.center_x() != b.center_x())
      return cfg.traffic_side == TrafficSide::right
                 ? a.center_x() < b.center_x()
                 : a.center_x() > b.center_x();
    return canon_less(a, b);
  });
  boxes.erase(boxes.begin(), boxes.begin() + boxes.size() / 2);

  // (b) cut the lower half: overhead devices sit high in the frame, so the
  // boxes with the larger center-y (lower on screen) go.
  std::sort(boxes.begin(), boxes.end(), [](const BBox& a, const BBox& b) {
    if (a.center_y() != b.center_y()) return a.center_y() > b.center_y();
    return canon_less(a, b);
  });
  boxes.erase(boxes.begin(), boxes.begin() + boxes.size() / 2);

  // (c) a box clipped by the top edge has lost its upper boundary, so its
  // height (and the device's lower edge) is untrustworthy.
  boxes.erase(std::remove_if(boxes.begin(), boxes.end(),
                             [&](const BBox& b) {
                               return b.y_min <= cfg.top_margin;
                             }),
              boxes.end());
  if (boxes.empty()) return std::nullopt;

  // (d) best confidence wins; ties broken toward the larger box, then the
  // leftmost/topmost corner so the result is reproducible.
  const BBox* best = &boxes.front();
  for (const BBox& b : boxes) {
    if (b.score > best->score ||
        (b.score == best->score &&
         (b.area() > best->area() ||
          (b.area() == best->area() &&
           (b.x_min < best->x_min ||
            (b.x_min == best->x_min && b.y_min < best->y_min)))))) {
      best = &b;
    }
  }
  return *best;
}

BBox extend_bbox(const BBox& box, double extension_px, double image_h) {
  if (extension_px < 0.0)
    throw DomainError("extend_bbox: extension must be non-negative");
  BBox out = box;
  out.h = std::min(box.h + extension_px, image_h - box.y_min);
  return out;
}

}  // namespace shle
