#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "shle/detection.hpp"
#include "shle/grid.hpp"

namespace shle {

// What a tracker sees per frame: the frame index and, when the sequence
// carries one, the intensity image (null otherwise).
struct TrackerFrame {
  int index = 0;
  const Image* image = nullptr;
};

// Boxes for every frame between the first and last anchor, inclusive; anchor
// frames hold their detections verbatim.
struct TrackedSequence {
  std::map<int, BBox> entries;
};

class Tracker {
public:
  virtual ~Tracker() = default;

  virtual void init(const TrackerFrame& frame, const BBox& box) = 0;

  // Optional hint: the anchor that closes the current gap. Trackers that
  // only look forward ignore it.
  virtual void set_endpoint(const TrackerFrame& frame, const BBox& box) {
    (void)frame;
    (void)box;
  }

  virtual BBox step(const TrackerFrame& frame) = 0;
};

using TrackerFactory = std::function<std::unique_ptr<Tracker>()>;

// For each consecutive anchor pair, run a fresh tracker from the earlier
// anchor through the gap. Frames before the first anchor and after the last
// carry no box. Throws Error(no_device) when there are no anchors at all.
TrackedSequence fill_gaps(const std::map<int, BBox>& anchors,
                          const std::vector<TrackerFrame>& frames,
                          const TrackerFactory& make_tracker);

// Straight-line interpolation of every box field between the two anchors.
std::unique_ptr<Tracker> linear_interpolation_tracker();

// Template matcher: the previous box crop is searched in a (2r+1)^2 window
// by zero-normalized cross-correlation; the template refreshes after every
// step and a peak below min_peak keeps the previous box. Needs intensity
// images; throws Error(tracker_unavailable) without them.
std::unique_ptr<Tracker> ncc_template_tracker(int search_radius,
                                              double min_peak = 0.5);

}  // namespace shle
