#include <vector>

#include "doctest.h"
#include "shle/errors.hpp"
#include "shle/tracking.hpp"

using namespace shle;

namespace {

std::vector<TrackerFrame> plain_frames(int count) {
  std::vector<TrackerFrame> frames;
  for (int i = 0; i < count; ++i) frames.push_back({i, nullptr});
  return frames;
}

// Light square target on a dark field, top-left corner at (x, y).
Image scene_with_square(int x, int y, int w = 8, int h = 6) {
  Image img(48, 48, 0.8f);
  for (int row = y; row < y + h; ++row)
    for (int col = x; col < x + w; ++col)
      if (img.in_bounds(col, row)) img.at(col, row) = 0.2f;
  return img;
}

}  // namespace

TEST_CASE("linear gap fill hits the midpoint exactly") {
  const std::map<int, BBox> anchors{{0, {100, 100, 50, 20, 0.9}},
                                    {10, {200, 200, 70, 40, 0.9}}};
  const TrackedSequence seq =
      fill_gaps(anchors, plain_frames(11), linear_interpolation_tracker);

  REQUIRE(seq.entries.size() == 11);  // contiguous cover of [0, 10]
  const BBox mid = seq.entries.at(5);
  CHECK(mid.x_min == doctest::Approx(150.0).epsilon(1e-12));
  CHECK(mid.y_min == doctest::Approx(150.0).epsilon(1e-12));
  CHECK(mid.w == doctest::Approx(60.0).epsilon(1e-12));
  CHECK(mid.h == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(seq.entries.at(0) == anchors.at(0));
  CHECK(seq.entries.at(10) == anchors.at(10));
}

TEST_CASE("interpolated coordinates are affine in the frame index") {
  const BBox b0{100, 100, 50, 20, 0.5};
  const BBox b1{108, 100, 50, 20, 0.9};  // differs by (8, 0, 0, 0)
  const std::map<int, BBox> anchors{{0, b0}, {8, b1}};
  const TrackedSequence seq =
      fill_gaps(anchors, plain_frames(9), linear_interpolation_tracker);

  CHECK(seq.entries.at(2).x_min == doctest::Approx(102.0).epsilon(1e-12));
  for (int k = 0; k <= 8; ++k) {
    const BBox b = seq.entries.at(k);
    const double t = k / 8.0;
    CHECK(b.x_min == doctest::Approx(100.0 + 8.0 * t).epsilon(1e-12));
    CHECK(b.y_min == 100.0);
    CHECK(b.w == 50.0);
    CHECK(b.score == doctest::Approx(0.5 + 0.4 * t).epsilon(1e-12));
  }
  // Monotone between the anchors.
  for (int k = 1; k <= 8; ++k)
    CHECK(seq.entries.at(k).x_min >= seq.entries.at(k - 1).x_min);
}

TEST_CASE("single anchor yields exactly that frame") {
  const BBox b{50, 60, 20, 10, 0.7};
  const TrackedSequence seq =
      fill_gaps({{3, b}}, plain_frames(8), linear_interpolation_tracker);
  REQUIRE(seq.entries.size() == 1);
  CHECK(seq.entries.at(3) == b);
}

TEST_CASE("zero anchors and unknown anchor frames are rejected") {
  try {
    fill_gaps({}, plain_frames(4), linear_interpolation_tracker);
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_device);
  }
  CHECK_THROWS_AS(fill_gaps({{99, BBox{}}}, plain_frames(4),
                            linear_interpolation_tracker),
                  DomainError);
}

TEST_CASE("gaps do not bleed into each other") {
  const std::map<int, BBox> anchors{{0, {0, 0, 10, 10, 0.5}},
                                    {2, {20, 0, 10, 10, 0.5}},
                                    {6, {20, 40, 10, 10, 0.5}}};
  const TrackedSequence seq =
      fill_gaps(anchors, plain_frames(7), linear_interpolation_tracker);
  REQUIRE(seq.entries.size() == 7);
  CHECK(seq.entries.at(1).x_min == doctest::Approx(10.0));
  CHECK(seq.entries.at(1).y_min == doctest::Approx(0.0));
  // Second gap interpolates y only; x is already at its endpoint value.
  CHECK(seq.entries.at(4).x_min == doctest::Approx(20.0));
  CHECK(seq.entries.at(4).y_min == doctest::Approx(20.0));
}

TEST_CASE("ncc tracker recovers a 2 px/frame translation exactly") {
  std::vector<Image> images;
  for (int t = 0; t <= 4; ++t) images.push_back(scene_with_square(6 + 2 * t, 10));
  std::vector<TrackerFrame> frames;
  for (int t = 0; t <= 4; ++t) frames.push_back({t, &images[t]});

  // The box carries a 2 px background margin around the square; a box that
  // hugged the square exactly would make a zero-variance template, which the
  // tracker deliberately treats as unmatchable.
  const BBox start{4, 8, 12, 10, 0.9};
  const BBox end{12, 8, 12, 10, 0.9};
  const TrackedSequence seq = fill_gaps(
      {{0, start}, {4, end}}, frames, [] { return ncc_template_tracker(8); });

  REQUIRE(seq.entries.size() == 5);
  for (int t = 0; t <= 4; ++t) {
    CHECK(seq.entries.at(t).x_min == doctest::Approx(4.0 + 2.0 * t));
    CHECK(seq.entries.at(t).y_min == doctest::Approx(8.0));
  }
}

TEST_CASE("ncc tracker holds still on a static scene") {
  const Image img = scene_with_square(20, 18);
  std::vector<TrackerFrame> frames;
  for (int t = 0; t < 6; ++t) frames.push_back({t, &img});

  const BBox box{18, 16, 12, 10, 0.9};
  const TrackedSequence seq = fill_gaps(
      {{0, box}, {5, box}}, frames, [] { return ncc_template_tracker(8); });
  for (int t = 0; t < 6; ++t) {
    CHECK(seq.entries.at(t).x_min == 18.0);
    CHECK(seq.entries.at(t).y_min == 16.0);
  }
}

TEST_CASE("blank images keep the previous box (no correlation peak)") {
  const Image blank(48, 48, 0.5f);
  std::vector<TrackerFrame> frames;
  for (int t = 0; t < 4; ++t) frames.push_back({t, &blank});

  const BBox b0{10, 10, 8, 6, 0.9};
  const BBox b1{30, 30, 8, 6, 0.9};
  const TrackedSequence seq = fill_gaps(
      {{0, b0}, {3, b1}}, frames, [] { return ncc_template_tracker(8); });
  CHECK(seq.entries.at(1) == b0);
  CHECK(seq.entries.at(2) == b0);
  CHECK(seq.entries.at(3) == b1);  // anchors stay verbatim regardless
}

TEST_CASE("ncc tracker without images reports tracker_unavailable") {
  auto tracker = ncc_template_tracker(8);
  try {
    tracker->init({0, nullptr}, {10, 10, 8, 6, 0.9});
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::tracker_unavailable);
  }
}

TEST_CASE("sub-threshold peaks hold the box, strong peaks move it") {
  // Frame 1 erases the target: correlation against background is flat-ish
  // and the peak cannot reach a strict threshold of 1.0 either.
  const Image with_target = scene_with_square(12, 12);
  const Image empty(48, 48, 0.8f);
  std::vector<TrackerFrame> frames{{0, &with_target}, {1, &empty}};

  auto tracker = ncc_template_tracker(8, 0.5);
  tracker->init(frames[0], {12, 12, 8, 6, 0.9});
  const BBox held = tracker->step(frames[1]);
  CHECK(held.x_min == 12.0);
  CHECK(held.y_min == 12.0);
}
