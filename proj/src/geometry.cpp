#include "shle/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shle/errors.hpp"
#include "shle/kernels.hpp"

namespace shle {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void CameraRig::validate() const {
  std::string problems;
  auto complain = [&](const std::string& p) {
    if (!problems.empty()) problems += "; ";
    problems += p;
  };

  if (!(finite(fx) && fx > 0.0)) complain("fx must be finite and > 0");
  if (!(finite(fy) && fy > 0.0)) complain("fy must be finite and > 0");
  if (width <= 0) complain("width must be > 0");
  if (height <= 0) complain("height must be > 0");
  if (!(finite(cx) && cx >= 0.0 && cx < width))
    complain("cx must lie in [0, width)");
  if (!(finite(cy) && cy >= 0.0 && cy < height))
    complain("cy must lie in [0, height)");
  if (!(finite(baseline_m) && baseline_m > 0.0))
    complain("baseline_m must be finite and > 0");
  if (!(finite(mount_height_m) && mount_height_m >= 0.0))
    complain("mount_height_m must be finite and >= 0");

  bool rotation_finite = true;
  for (double r : rotation) rotation_finite = rotation_finite && finite(r);
  bool translation_finite = true;
  for (double t : translation) translation_finite = translation_finite && finite(t);
  if (!translation_finite) complain("translation must be finite");
  if (!rotation_finite) {
    complain("rotation must be finite");
  } else {
    // R^T R = I to 1e-9; det may be +1 or -1 (the world/camera y-flip is a
    // reflection).
    double max_err = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double dot = 0.0;
        for (int k = 0; k < 3; ++k) dot += rotation[k * 3 + i] * rotation[k * 3 + j];
        max_err = std::max(max_err, std::abs(dot - (i == j ? 1.0 : 0.0)));
      }
    }
    if (max_err > 1e-9) complain("rotation must be orthogonal (R^T R = I)");
  }

  if (!problems.empty()) throw ConfigurationError("invalid camera: " + problems);
}

DepthMap disparity_to_depth(const DisparityMap& d, const CameraRig& rig) {
  if (d.width != rig.width || d.height != rig.height)
    throw ConfigurationError(
        "disparity_to_depth: map is " + std::to_string(d.width) + "x" +
        std::to_string(d.height) + " but camera expects " +
        std::to_string(rig.width) + "x" + std::to_string(rig.height));
  DepthMap out(d.width, d.height);
  const float fb = static_cast<float>(rig.baseline_m * rig.fx);
  kernels::active().depth_from_disparity(d.values.data(), out.values.data(),
                                         d.values.size(), fb);
  return out;
}

Vec3 pixel_to_camera(double u, double v, double z_c, const CameraRig& rig) {
  if (!(z_c > 0.0))
    throw DomainError("pixel_to_camera: depth must be > 0, got " +
                      std::to_string(z_c));
  return {z_c * (u - rig.cx) / rig.fx, z_c * (v - rig.cy) / rig.fy, z_c};
}

Vec3 camera_to_world(const Vec3& p_c, const CameraRig& rig) {
  const auto& r = rig.rotation;
  const double x = p_c.x - rig.translation[0];
  const double y = p_c.y - rig.translation[1];
  const double z = p_c.z - rig.translation[2];
  // R is orthogonal, so the inverse is the transpose.
  return {r[0] * x + r[3] * y + r[6] * z,
          r[1] * x + r[4] * y + r[7] * z,
          r[2] * x + r[5] * y + r[8] * z};
}

double apply_mount_height(double y_w, const CameraRig& rig) {
  return y_w + rig.mount_height_m;
}

PixelPoint project_world_to_pixel(const Vec3& p_w, const CameraRig& rig) {
  const auto& r = rig.rotation;
  const double x_c =
      r[0] * p_w.x + r[1] * p_w.y + r[2] * p_w.z + rig.translation[0];
  const double y_c =
      r[3] * p_w.x + r[4] * p_w.y + r[5] * p_w.z + rig.translation[1];
  const double z_c =
      r[6] * p_w.x + r[7] * p_w.y + r[8] * p_w.z + rig.translation[2];
  if (!(z_c > 0.0))
    throw DomainError("project_world_to_pixel: point not in front of camera");
  return {rig.fx * x_c / z_c + rig.cx, rig.fy * y_c / z_c + rig.cy, z_c};
}

DevicePointCloud extract_frustum_points(const BBox& box, const DepthMap& depth,
                                        const CameraRig& rig) {
  if (depth.width != rig.width || depth.height != rig.height)
    throw ConfigurationError("extract_frustum_points: depth map dims differ "
                             "from camera dims");

  const int u_begin = std::max(0, static_cast<int>(std::ceil(box.x_min)));
  const int u_end = std::min(depth.width,
                             static_cast<int>(std::floor(box.x_min + box.w)));
  const int v_begin = std::max(0, static_cast<int>(std::ceil(box.y_min)));
  const int v_end = std::min(depth.height,
                             static_cast<int>(std::floor(box.y_min + box.h)));

  DevicePointCloud cloud;
  if (u_begin < u_end && v_begin < v_end)
    cloud.points.reserve(static_cast<std::size_t>(u_end - u_begin) *
                         (v_end - v_begin));
  for (int v = v_begin; v < v_end; ++v) {
    for (int u = u_begin; u < u_end; ++u) {
      const float z = depth.at(u, v);
      if (!FloatGrid::is_valid(z)) continue;
      const Vec3 cam = pixel_to_camera(u, v, z, rig);
      const Vec3 world = camera_to_world(cam, rig);
      cloud.points.push_back(
          {world.x, apply_mount_height(world.y, rig), world.z, cam.z});
    }
  }
  if (cloud.points.empty())
    throw Error(ErrorCode::empty_extraction,
                "extract_frustum_points: no valid depth inside the box");
  return cloud;
}

}  // namespace shle
