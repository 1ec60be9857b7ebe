#include "shle/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "shle/errors.hpp"

namespace shle {

namespace {

// Slack for surface-membership tests: a point computed to sit exactly on the
// bar's lower edge must not fall out of the slab over the last ulp.
constexpr double kEdgeEps = 1e-9;

constexpr std::uint64_t kStreamRender = 1;
constexpr std::uint64_t kStreamDecoys = 2;
constexpr std::uint64_t kStreamDropout = 3;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent deterministic substream per (seed, purpose, frame): frames can
// be generated in any order or in parallel without changing a single byte.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t frame) {
  return std::mt19937_64(
      splitmix64(seed ^ splitmix64(stream * 0x9E3779B97F4A7C15ULL + frame)));
}

struct Ray {
  double ox, oy, oz;  // camera center in world coordinates
  double dx, dy, dz;  // direction of the pixel ray in world coordinates
};

// R^T applied to v minus-translated: world-frame form of camera data.
Ray pixel_ray(const CameraRig& rig, double u, double v) {
  const auto& r = rig.rotation;
  const auto& t = rig.translation;
  const double xd = (u - rig.cx) / rig.fx;
  const double yd = (v - rig.cy) / rig.fy;
  Ray ray;
  ray.ox = -(r[0] * t[0] + r[3] * t[1] + r[6] * t[2]);
  ray.oy = -(r[1] * t[0] + r[4] * t[1] + r[7] * t[2]);
  ray.oz = -(r[2] * t[0] + r[5] * t[1] + r[8] * t[2]);
  ray.dx = r[0] * xd + r[3] * yd + r[6];
  ray.dy = r[1] * xd + r[4] * yd + r[7];
  ray.dz = r[2] * xd + r[5] * yd + r[8];
  return ray;
}

BBox clamp_into_image(BBox b, double width, double height) {
  b.w = std::min(b.w, width);
  b.h = std::min(b.h, height);
  b.x_min = std::clamp(b.x_min, 0.0, width - b.w);
  b.y_min = std::clamp(b.y_min, 0.0, height - b.h);
  return b;
}

// Distractors exercising each pruning branch of the candidate filter: one in
// the left half, one low on the right, one clipped by the top edge; the
// cycle repeats for larger counts. Scores stay below the analytic box's 0.9
// so a decoy that slips through the positional cuts still loses.
std::vector<BBox> make_decoys(std::mt19937_64& rng, int count,
                              const CameraRig& rig) {
  const double W = rig.width;
  const double H = rig.height;
  auto uni = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  std::vector<BBox> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    BBox b;
    switch (i % 3) {
      case 0: {  // left half of the road scene
        const double cx = uni(0.0625 * W, 0.4375 * W);
        const double cy = uni(0.347 * H, 0.694 * H);
        b.w = uni(40.0, 120.0) * W / 1280.0;
        b.h = uni(20.0, 60.0) * H / 720.0;
        b.x_min = cx - b.w / 2.0;
        b.y_min = cy - b.h / 2.0;
        b.score = uni(0.3, 0.85);
        break;
      }
      case 1: {  // low and to the right (roadside clutter)
        const double cx = uni(0.547 * W, 0.898 * W);
        const double cy = uni(0.806 * H, 0.93 * H);
        b.w = uni(40.0, 120.0) * W / 1280.0;
        b.h = uni(20.0, 60.0) * H / 720.0;
        b.x_min = cx - b.w / 2.0;
        b.y_min = cy - b.h / 2.0;
        b.score = uni(0.3, 0.85);
        break;
      }
      default: {  // clipped by the top edge
        const double cx = uni(0.0625 * W, 0.4375 * W);
        b.w = uni(40.0, 120.0) * W / 1280.0;
        b.h = uni(30.0, 60.0) * H / 720.0;
        b.x_min = cx - b.w / 2.0;
        b.y_min = 0.0;
        b.score = uni(0.3, 0.85);
        break;
      }
    }
    BBox clamped = clamp_into_image(b, W, H);
    if (i % 3 == 2) clamped.y_min = 0.0;  // keep the top-edge trait
    out.push_back(clamped);
  }
  return out;
}

std::vector<bool> pick_dropped_frames(std::uint64_t seed, double fraction,
                                      std::size_t frame_count) {
  std::vector<bool> dropped(frame_count, false);
  const long k = std::lround(fraction * static_cast<double>(frame_count));
  if (k <= 0) return dropped;
  std::vector<std::size_t> order(frame_count);
  std::iota(order.begin(), order.end(), 0);
  auto rng = substream(seed, kStreamDropout, 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (long i = 0; i < k && i < static_cast<long>(frame_count); ++i)
    dropped[order[i]] = true;
  return dropped;
}

std::optional<BBox> analytic_bar_box(const SceneSpec& spec, double z_t) {
  const CameraRig& rig = spec.rig;
  const double half = spec.bar_x_extent_m / 2.0;
  const double y_low = spec.bar_height_m - rig.mount_height_m;
  const double y_high = y_low + spec.bar_thickness_m;

  double u_min = 0, u_max = 0, v_min = 0, v_max = 0;
  bool first = true;
  for (double x : {-half, half}) {
    for (double y : {y_low, y_high}) {
      const PixelPoint p = project_world_to_pixel({x, y, z_t}, rig);
      u_min = first ? p.u : std::min(u_min, p.u);
      u_max = first ? p.u : std::max(u_max, p.u);
      v_min = first ? p.v : std::min(v_min, p.v);
      v_max = first ? p.v : std::max(v_max, p.v);
      first = false;
    }
  }

  const double x0 = std::max(u_min, 0.0);
  const double x1 = std::min(u_max, static_cast<double>(rig.width));
  const double y0 = std::max(v_min, 0.0);
  const double y1 = std::min(v_max, static_cast<double>(rig.height));
  if (!(x1 - x0 > 0.0) || !(y1 - y0 > 0.0)) return std::nullopt;
  return BBox{x0, y0, x1 - x0, y1 - y0, 0.9};
}

}  // namespace

void SceneSpec::validate() const {
  rig.validate();
  std::string problems;
  auto complain = [&](const char* p) {
    if (!problems.empty()) problems += "; ";
    problems += p;
  };
  if (depth_trajectory.empty()) complain("depth_trajectory must be non-empty");
  for (double z : depth_trajectory)
    if (!(std::isfinite(z) && z > 0.0)) {
      complain("depth_trajectory entries must be finite and > 0");
      break;
    }
  if (!(bar_height_m > 0.0)) complain("bar_height_m must be > 0");
  if (!(bar_thickness_m > 0.0)) complain("bar_thickness_m must be > 0");
  if (!(bar_x_extent_m > 0.0)) complain("bar_x_extent_m must be > 0");
  if (!(noise_std >= 0.0)) complain("noise_std must be >= 0");
  if (!(spurious_fraction >= 0.0 && spurious_fraction <= 1.0))
    complain("spurious_fraction must lie in [0, 1]");
  if (!(detection_dropout >= 0.0 && detection_dropout <= 1.0))
    complain("detection_dropout must lie in [0, 1]");
  if (decoy_boxes < 0) complain("decoy_boxes must be >= 0");
  if (!problems.empty())
    throw ConfigurationError("invalid scene spec: " + problems);
}

SyntheticScene generate_scene(const SceneSpec& spec) {
  spec.validate();
  const CameraRig& rig = spec.rig;
  // The bar is modeled in a world plane of constant camera depth, which
  // requires the camera's forward axis to coincide with world z.
  if (!(rig.rotation[6] == 0.0 && rig.rotation[7] == 0.0 &&
        rig.rotation[8] == 1.0 && rig.translation[2] == 0.0))
    throw Error(ErrorCode::degenerate_spec,
                "generate_scene: rig must keep camera z aligned with world z");

  const int W = rig.width;
  const int H = rig.height;
  const double fb = rig.fx * rig.baseline_m;
  const double half = spec.bar_x_extent_m / 2.0;
  const double y_low = spec.bar_height_m;
  const double y_high = y_low + spec.bar_thickness_m;
  const std::size_t T = spec.depth_trajectory.size();

  const std::vector<bool> dropped =
      pick_dropped_frames(spec.seed, spec.detection_dropout, T);

  SyntheticScene scene;
  scene.rig = rig;
  scene.frames.resize(T);
  scene.truth.boxes.resize(T);
  scene.truth.lower_edge_m.assign(T, spec.bar_height_m);
  scene.truth.scene_height_m = spec.bar_height_m;

  bool bar_ever_visible = false;
  for (std::size_t t = 0; t < T; ++t) {
    const double z_t = spec.depth_trajectory[t];
    SyntheticFrame& frame = scene.frames[t];
    frame.index = static_cast<int>(t);
    frame.disparity = DisparityMap(W, H);
    if (spec.render_images) frame.image = Image(W, H, 0.8f);

    auto rng = substream(spec.seed, kStreamRender, t);
    std::normal_distribution<double> noise(0.0, spec.noise_std);
    std::bernoulli_distribution junk(spec.spurious_fraction);
    std::uniform_real_distribution<double> junk_disp(0.5, 100.0);

    for (int v = 0; v < H; ++v) {
      for (int u = 0; u < W; ++u) {
        const Ray ray = pixel_ray(rig, u, v);
        double depth = 500.0;  // distant background

        // Ground plane: height above ground is zero where the ray reaches
        // world y = -mount_height.
        if (ray.dy != 0.0) {
          const double s = (-rig.mount_height_m - ray.oy) / ray.dy;
          if (s > 0.0 && s < depth) depth = s;
        }

        // Bar slab billboard at camera depth z_t.
        bool on_bar = false;
        if (z_t < depth) {
          const double xw = ray.ox + z_t * ray.dx;
          const double yw_prime = ray.oy + z_t * ray.dy + rig.mount_height_m;
          if (yw_prime >= y_low - kEdgeEps && yw_prime <= y_high + kEdgeEps &&
              std::abs(xw) <= half + kEdgeEps) {
            depth = z_t;
            on_bar = true;
          }
        }

        double disp = fb / depth;
        if (spec.noise_std > 0.0) disp += noise(rng);
        if (spec.spurious_fraction > 0.0 && junk(rng)) disp = junk_disp(rng);
        frame.disparity.at(u, v) = static_cast<float>(disp);
        if (spec.render_images && on_bar) frame.image.at(u, v) = 0.2f;
      }
    }

    frame.detections.frame_index = frame.index;
    const std::optional<BBox> box = analytic_bar_box(spec, z_t);
    scene.truth.boxes[t] = box;
    if (box) bar_ever_visible = true;
    if (!dropped[t] && box) {
      frame.detections.boxes.push_back(*box);
      auto decoy_rng = substream(spec.seed, kStreamDecoys, t);
      for (BBox& d : make_decoys(decoy_rng, spec.decoy_boxes, rig))
        frame.detections.boxes.push_back(d);
    }
  }

  if (!bar_ever_visible)
    throw Error(ErrorCode::degenerate_spec,
                "generate_scene: bar is never visible in any frame");
  return scene;
}

SyntheticScene perturb(const SyntheticScene& scene, const std::string& kind,
                       double magnitude, std::uint64_t seed) {
  SyntheticScene out = scene;
  const std::size_t T = out.frames.size();

  if (kind == "dropout") {
    if (!(magnitude >= 0.0 && magnitude <= 1.0))
      throw DomainError("perturb: dropout fraction must lie in [0, 1]");
    const std::vector<bool> dropped = pick_dropped_frames(seed, magnitude, T);
    for (std::size_t t = 0; t < T; ++t)
      if (dropped[t]) out.frames[t].detections.boxes.clear();
    return out;
  }

  if (kind == "decoys") {
    const int count = static_cast<int>(std::lround(magnitude));
    if (count < 0) throw DomainError("perturb: decoy count must be >= 0");
    for (std::size_t t = 0; t < T; ++t) {
      auto& boxes = out.frames[t].detections.boxes;
      if (boxes.empty()) continue;  // withheld frames stay withheld
      boxes.resize(1);              // keep the analytic box, replace decoys
      auto rng = substream(seed, kStreamDecoys, t);
      for (BBox& d : make_decoys(rng, count, out.rig)) boxes.push_back(d);
    }
    return out;
  }

  if (kind == "noise") {
    if (!(magnitude >= 0.0))
      throw DomainError("perturb: noise sigma must be >= 0");
    if (magnitude == 0.0) return out;
    for (std::size_t t = 0; t < T; ++t) {
      auto rng = substream(seed, kStreamRender, t);
      std::normal_distribution<double> noise(0.0, magnitude);
      for (float& d : out.frames[t].disparity.values)
        d = static_cast<float>(d + noise(rng));
    }
    return out;
  }

  throw Error(ErrorCode::usage, "perturb: unknown kind '" + kind +
                                    "' (expected dropout, decoys or noise)");
}

std::vector<double> row_aligned_depths(const CameraRig& rig,
                                       double edge_height_m, double z_start,
                                       double z_end, int frames) {
  if (frames < 1) throw DomainError("row_aligned_depths: frames must be >= 1");
  if (!(z_start > 0.0) || !(z_end > 0.0))
    throw DomainError("row_aligned_depths: depths must be > 0");

  const double drop = rig.mount_height_m - edge_height_m;  // negative overhead
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(frames));
  for (int t = 0; t < frames; ++t) {
    const double z_lin =
        frames == 1 ? z_start
                    : z_start + (z_end - z_start) * t / (frames - 1.0);
    const double v_exact = rig.cy + rig.fy * drop / z_lin;
    long v = std::lround(v_exact);
    if (v == std::lround(rig.cy)) v += drop < 0.0 ? -1 : 1;  // avoid horizon
    const double z = rig.fy * drop / (static_cast<double>(v) - rig.cy);
    out.push_back(std::isfinite(z) && z > 0.0 ? z : z_lin);
  }
  return out;
}

}  // namespace shle
