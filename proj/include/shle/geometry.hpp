#pragma once

#include <array>
#include <vector>

#include "shle/detection.hpp"
#include "shle/grid.hpp"

namespace shle {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Result of projecting a world point: pixel position plus camera depth.
struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
  double z_c = 0.0;
};

// Calibrated stereo rig. Camera frame: x right, y down, z forward. World
// frame: x right, y up, z forward (heights grow upward). The two differ by a
// reflection, so `rotation` may be any orthogonal matrix, det +1 or -1; the
// default extrinsics are that pure y-flip with the camera at the origin.
struct CameraRig {
  double fx = 700.0;
  double fy = 700.0;
  double cx = 640.0;
  double cy = 360.0;
  int width = 1280;
  int height = 720;
  double baseline_m = 0.12;
  double mount_height_m = 1.45;
  // Row-major world->camera rotation R and translation T: p_c = R p_w + T.
  std::array<double, 9> rotation = {1, 0, 0, 0, -1, 0, 0, 0, 1};
  std::array<double, 3> translation = {0, 0, 0};

  // Throws ConfigurationError listing every violated constraint.
  void validate() const;
};

// One lifted pixel: world position (y includes the camera mounting height,
// i.e. height above the ground plane) plus the camera depth it came from.
struct WorldPoint {
  double x_w = 0.0;
  double y_w_prime = 0.0;
  double z_w = 0.0;
  double z_cam = 0.0;
};

struct DevicePointCloud {
  std::vector<WorldPoint> points;
  int source_frame = 0;
};

// Z = B * fx / d for every valid disparity; invalid cells stay invalid.
DepthMap disparity_to_depth(const DisparityMap& d, const CameraRig& rig);

// Back-project pixel (u, v) at camera depth z_c; throws DomainError for
// z_c <= 0.
Vec3 pixel_to_camera(double u, double v, double z_c, const CameraRig& rig);

// p_w = R^T (p_c - T).
Vec3 camera_to_world(const Vec3& p_c, const CameraRig& rig);

// Height above ground: world y plus the rig mounting height.
double apply_mount_height(double y_w, const CameraRig& rig);

// Forward projection; throws DomainError when the point lands at or behind
// the camera (z_c <= 0). Exact inverse of the unprojection chain above.
PixelPoint project_world_to_pixel(const Vec3& p_w, const CameraRig& rig);

// Lift every integer pixel inside the box with a valid depth into the world
// frame. Pixels sampled are u in [ceil(x_min), floor(x_min + w)) intersected
// with the image, likewise v. Throws Error(empty_extraction) when nothing
// inside the box has valid depth.
DevicePointCloud extract_frustum_points(const BBox& box, const DepthMap& depth,
                                        const CameraRig& rig);

}  // namespace shle
