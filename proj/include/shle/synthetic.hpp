#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shle/detection.hpp"
#include "shle/geometry.hpp"
#include "shle/grid.hpp"

namespace shle {

// Recipe for a synthetic stereo approach toward an overhead bar. The bar is
// a camera-facing slab whose lower edge sits bar_height_m above the ground
// plane; per frame it stands at depth_trajectory[t] meters. Everything
// random (noise, spurious pixels, decoys, dropout) derives from the seed.
struct SceneSpec {
  CameraRig rig;
  double bar_height_m = 3.5;
  double bar_thickness_m = 0.3;
  double bar_x_extent_m = 6.0;
  std::vector<double> depth_trajectory;
  double noise_std = 0.0;          // disparity noise sigma (px)
  double spurious_fraction = 0.0;  // pixels overwritten with junk disparity
  double detection_dropout = 0.0;  // fraction of frames with no detections
  int decoy_boxes = 0;             // distractor boxes per detection frame
  std::uint64_t seed = 0;
  bool render_images = true;       // intensity images are optional ballast

  void validate() const;
};

// Exact answers the generator knows by construction. A frame's box is absent
// when the bar projects entirely outside the image.
struct GroundTruth {
  std::vector<std::optional<BBox>> boxes;   // clipped analytic bar boxes
  std::vector<double> lower_edge_m;         // exact clearance per frame
  double scene_height_m = 0.0;
};

struct SyntheticFrame {
  int index = 0;
  DisparityMap disparity;
  Image image;             // empty when images were not rendered
  DetectionSet detections;
};

struct SyntheticScene {
  CameraRig rig;
  std::vector<SyntheticFrame> frames;
  GroundTruth truth;
};

// Render the scene: per-pixel nearest surface among bar slab, ground plane
// and a 500 m background, converted to disparity (plus noise and spurious
// pixels), an intensity image (dark bar on light background), and per-frame
// detections (analytic box at score 0.9 plus decoys, withheld on dropout
// frames). Throws Error(degenerate_spec) when the bar is never visible.
SyntheticScene generate_scene(const SceneSpec& spec);

// Reapply one nuisance to an existing scene: kind is "dropout" (magnitude =
// fraction of frames to withhold), "decoys" (boxes added per detection
// frame) or "noise" (extra disparity sigma in px). Ground truth is
// untouched. Unknown kinds raise Error(usage).
SyntheticScene perturb(const SyntheticScene& scene, const std::string& kind,
                       double magnitude, std::uint64_t seed);

// Depth trajectory whose every frame puts the bar's lower edge exactly on an
// integer pixel row: depths follow a straight z_start -> z_end sweep, each
// snapped to the nearest row-aligned depth. Keeps projection quantization
// out of per-frame height errors.
std::vector<double> row_aligned_depths(const CameraRig& rig,
                                       double edge_height_m, double z_start,
                                       double z_end, int frames);

}  // namespace shle
