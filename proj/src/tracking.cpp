#include "shle/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shle/errors.hpp"
#include "shle/kernels.hpp"

namespace shle {

namespace {

class LinearInterpolationTracker final : public Tracker {
public:
  void init(const TrackerFrame& frame, const BBox& box) override {
    start_index_ = frame.index;
    start_box_ = box;
    has_end_ = false;
  }

  void set_endpoint(const TrackerFrame& frame, const BBox& box) override {
    end_index_ = frame.index;
    end_box_ = box;
    has_end_ = end_index_ != start_index_;
  }

  BBox step(const TrackerFrame& frame) override {
    if (!has_end_) return start_box_;  // open-ended gap: hold the last box
    const double t = static_cast<double>(frame.index - start_index_) /
                     (end_index_ - start_index_);
    auto lerp = [t](double a, double b) { return a + t * (b - a); };
    return {lerp(start_box_.x_min, end_box_.x_min),
            lerp(start_box_.y_min, end_box_.y_min),
            lerp(start_box_.w, end_box_.w), lerp(start_box_.h, end_box_.h),
            lerp(start_box_.score, end_box_.score)};
  }

private:
  int start_index_ = 0;
  int end_index_ = 0;
  BBox start_box_;
  BBox end_box_;
  bool has_end_ = false;
};

struct PatchRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
};

class NccTemplateTracker final : public Tracker {
public:
  NccTemplateTracker(int search_radius, double min_peak)
      : radius_(search_radius), min_peak_(min_peak) {
    if (search_radius < 0)
      throw DomainError("ncc tracker: search radius must be >= 0");
  }

  void init(const TrackerFrame& frame, const BBox& box) override {
    const Image* image = require_image(frame);
    box_ = box;
    rect_ = clamp_rect(round_rect(box), *image);
    template_ = crop(*image, rect_);
  }

  BBox step(const TrackerFrame& frame) override {
    const Image* image = require_image(frame);

    double best_score = -2.0;
    int best_dx = 0;
    int best_dy = 0;
    for (int dy = -radius_; dy <= radius_; ++dy) {
      for (int dx = -radius_; dx <= radius_; ++dx) {
        PatchRect cand = rect_;
        cand.x += dx;
        cand.y += dy;
        if (cand.x < 0 || cand.y < 0 || cand.x + cand.w > image->width ||
            cand.y + cand.h > image->height)
          continue;
        const double score = zncc(*image, cand);
        if (score > best_score ||
            (score == best_score && better_tie(dx, dy, best_dx, best_dy))) {
          best_score = score;
          best_dx = dx;
          best_dy = dy;
        }
      }
    }

    if (best_score >= min_peak_) {
      box_.x_min += best_dx;
      box_.y_min += best_dy;
      rect_.x += best_dx;
      rect_.y += best_dy;
    }
    template_ = crop(*image, rect_);  // refresh even when holding position
    return box_;
  }

private:
  static const Image* require_image(const TrackerFrame& frame) {
    if (frame.image == nullptr || frame.image->values.empty())
      throw Error(ErrorCode::tracker_unavailable,
                  "ncc tracker: frame " + std::to_string(frame.index) +
                      " carries no intensity image");
    return frame.image;
  }

  static PatchRect round_rect(const BBox& box) {
    return {static_cast<int>(std::lround(box.x_min)),
            static_cast<int>(std::lround(box.y_min)),
            std::max(1, static_cast<int>(std::lround(box.w))),
            std::max(1, static_cast<int>(std::lround(box.h)))};
  }

  static PatchRect clamp_rect(PatchRect r, const Image& image) {
    r.w = std::min(r.w, image.width);
    r.h = std::min(r.h, image.height);
    r.x = std::clamp(r.x, 0, image.width - r.w);
    r.y = std::clamp(r.y, 0, image.height - r.h);
    return r;
  }

  static std::vector<float> crop(const Image& image, const PatchRect& r) {
    std::vector<float> out(static_cast<std::size_t>(r.w) * r.h);
    for (int row = 0; row < r.h; ++row) {
      const float* src = &image.values[static_cast<std::size_t>(r.y + row) *
                                          image.width +
                                      r.x];
      std::copy(src, src + r.w, out.begin() + static_cast<std::size_t>(row) * r.w);
    }
    return out;
  }

  // Prefer the smallest motion, then the lexicographically smallest offset,
  // so exact ties cannot depend on scan order.
  static bool better_tie(int dx, int dy, int best_dx, int best_dy) {
    const int l1 = std::abs(dx) + std::abs(dy);
    const int best_l1 = std::abs(best_dx) + std::abs(best_dy);
    if (l1 != best_l1) return l1 < best_l1;
    if (dy != best_dy) return dy < best_dy;
    return dx < best_dx;
  }

  double zncc(const Image& image, const PatchRect& cand) const {
    kernels::CorrStats s;
    const auto& ops = kernels::active();
    for (int row = 0; row < cand.h; ++row) {
      const float* a = template_.data() + static_cast<std::size_t>(row) * cand.w;
      const float* b = &image.values[static_cast<std::size_t>(cand.y + row) *
                                        image.width +
                                    cand.x];
      ops.corr_accumulate(a, b, cand.w, s);
    }
    const double n = static_cast<double>(s.count);
    const double var_a = n * s.sum_aa - s.sum_a * s.sum_a;
    const double var_b = n * s.sum_bb - s.sum_b * s.sum_b;
    if (var_a <= 0.0 || var_b <= 0.0) return -1.0;  // flat patch: undefined
    return (n * s.sum_ab - s.sum_a * s.sum_b) / std::sqrt(var_a * var_b);
  }

  int radius_;
  double min_peak_;
  BBox box_;
  PatchRect rect_;
  std::vector<float> template_;
};

}  // namespace

TrackedSequence fill_gaps(const std::map<int, BBox>& anchors,
                          const std::vector<TrackerFrame>& frames,
                          const TrackerFactory& make_tracker) {
  if (anchors.empty())
    throw Error(ErrorCode::no_device, "fill_gaps: no anchor detections");

  std::map<int, std::size_t> position;
  for (std::size_t i = 0; i < frames.size(); ++i)
    position[frames[i].index] = i;
  for (const auto& [index, box] : anchors) {
    (void)box;
    if (position.find(index) == position.end())
      throw DomainError("fill_gaps: anchor frame " + std::to_string(index) +
                        " is not part of the sequence");
  }

  TrackedSequence seq;
  for (const auto& [index, box] : anchors) seq.entries[index] = box;

  for (auto it = anchors.begin(); std::next(it) != anchors.end(); ++it) {
    const auto& [k0, b0] = *it;
    const auto& [k1, b1] = *std::next(it);
    const std::size_t p0 = position[k0];
    const std::size_t p1 = position[k1];
    if (p1 <= p0 + 1) continue;  // adjacent anchors: nothing to fill

    auto tracker = make_tracker();
    tracker->init(frames[p0], b0);
    tracker->set_endpoint(frames[p1], b1);
    for (std::size_t p = p0 + 1; p < p1; ++p)
      seq.entries[frames[p].index] = tracker->step(frames[p]);
  }
  return seq;
}

std::unique_ptr<Tracker> linear_interpolation_tracker() {
  return std::make_unique<LinearInterpolationTracker>();
}

std::unique_ptr<Tracker> ncc_template_tracker(int search_radius,
                                              double min_peak) {
  return std::make_unique<NccTemplateTracker>(search_radius, min_peak);
}

}  // namespace shle
