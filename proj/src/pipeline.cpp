#include "shle/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <numeric>
#include <thread>

#include "shle/geometry.hpp"
#include "shle/spatial_filter.hpp"
#include "shle/tracking.hpp"

namespace shle {

void PipelineConfig::validate() const {
  std::string complain;
  auto bad = [&](const char* what) {
    if (!complain.empty()) complain += "; ";
    complain += what;
  };
  if (!(std::isfinite(M) && M >= 0.0)) bad("M must be finite and >= 0");
  if (!(std::isfinite(sigma) && sigma > 0.0)) bad("sigma must be > 0");
  if (!(std::isfinite(kde_bandwidth) && kde_bandwidth > 0.0))
    bad("kde_bandwidth must be > 0");
  if (n_lowest < 1) bad("n_lowest must be >= 1");
  if (!(std::isfinite(kalman_q) && kalman_q > 0.0)) bad("kalman_q must be > 0");
  if (!(std::isfinite(kalman_r) && kalman_r > 0.0)) bad("kalman_r must be > 0");
  if (!(std::isfinite(kalman_p0) && kalman_p0 > 0.0))
    bad("kalman_p0 must be > 0");
  if (!(std::isfinite(top_margin) && top_margin >= 0.0))
    bad("top_margin must be >= 0");
  if (ncc_search_radius < 1) bad("ncc_search_radius must be >= 1");
  if (!(ncc_min_peak >= -1.0 && ncc_min_peak <= 1.0))
    bad("ncc_min_peak must lie in [-1, 1]");
  if (!complain.empty()) throw ConfigurationError("config: " + complain);
}

namespace {

unsigned thread_budget() {
  if (const char* env = std::getenv("SHLE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Runs fn(0..n-1) on up to SHLE_THREADS workers. Callers index into
// preallocated slots, so scheduling order cannot affect the output.
template <typename Fn>
void parallel_indices(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(thread_budget(), n ? n : 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
          fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

struct FrameOutcome {
  std::optional<FrameEstimate> estimate;
  std::optional<SkippedFrame> skip;
};

FrameOutcome process_frame(const SceneFrame& frame, const BBox& box,
                           const CameraRig& rig, const PipelineConfig& cfg) {
  FrameOutcome out;
  try {
    const DepthMap depth = disparity_to_depth(frame.disparity, rig);
    const BBox extended = extend_bbox(box, cfg.M, rig.height);
    DevicePointCloud cloud = extract_frustum_points(extended, depth, rig);
    cloud.source_frame = frame.index;

    std::vector<double> zs;
    zs.reserve(cloud.points.size());
    for (const WorldPoint& p : cloud.points) zs.push_back(p.z_cam);
    const double z_cen =
        cfg.use_kde_center
            ? kde_mode(zs, cfg.kde_bandwidth)
            : std::accumulate(zs.begin(), zs.end(), 0.0) /
                  static_cast<double>(zs.size());

    const DevicePointCloud kept =
        cfg.use_depth_filter ? depth_filter(cloud, z_cen, cfg.sigma) : cloud;

    FrameEstimate est;
    est.index = frame.index;
    est.box = box;
    est.h_df = average_lowest(kept, cfg.n_lowest);
    est.n_points_after_filter = static_cast<int>(kept.points.size());
    out.estimate = est;
  } catch (const Error& e) {
    out.skip = SkippedFrame{frame.index, e.code(), e.what()};
  }
  return out;
}

}  // namespace

SceneEstimate run_scene(const SceneData& scene, const PipelineConfig& config) {
  config.validate();
  scene.rig.validate();

  // Stage 1: per-frame selection, then gap filling between the anchors.
  std::map<int, BBox> anchors;
  for (const SceneFrame& frame : scene.frames)
    if (frame.detections)
      if (const auto selected = filter_candidates(
              *frame.detections, scene.rig.width, scene.rig.height, config))
        anchors.emplace(frame.index, *selected);
  if (anchors.empty())
    throw Error(ErrorCode::no_scene_estimate,
                "stage 1 selected no device box in any frame");

  std::vector<TrackerFrame> tracker_frames;
  tracker_frames.reserve(scene.frames.size());
  for (const SceneFrame& frame : scene.frames)
    tracker_frames.push_back(
        {frame.index, frame.image ? &*frame.image : nullptr});

  TrackerFactory make_tracker;
  if (config.tracker == TrackerChoice::ncc) {
    make_tracker = [&config] {
      return ncc_template_tracker(config.ncc_search_radius,
                                  config.ncc_min_peak);
    };
  } else {
    make_tracker = [] { return linear_interpolation_tracker(); };
  }

  TrackedSequence tracked;
  try {
    tracked = fill_gaps(anchors, tracker_frames, make_tracker);
  } catch (const Error& e) {
    // No images on disk is an input property, not a dead end: fall back
    // from template matching to interpolation.
    if (e.code() != ErrorCode::tracker_unavailable) throw;
    tracked = fill_gaps(anchors, tracker_frames,
                        [] { return linear_interpolation_tracker(); });
  }

  // Stage 2, one job per tracked frame.
  struct Job {
    const SceneFrame* frame;
    BBox box;
  };
  std::vector<Job> jobs;
  SceneEstimate result;
  for (const SceneFrame& frame : scene.frames) {
    const auto it = tracked.entries.find(frame.index);
    if (it == tracked.entries.end()) {
      result.skipped.push_back({frame.index, ErrorCode::no_device,
                                "outside the tracked span"});
    } else {
      jobs.push_back({&frame, it->second});
    }
  }

  std::vector<FrameOutcome> outcomes(jobs.size());
  parallel_indices(jobs.size(), [&](std::size_t i) {
    outcomes[i] = process_frame(*jobs[i].frame, jobs[i].box, scene.rig, config);
  });

  std::vector<double> h_df;
  for (FrameOutcome& out : outcomes) {
    if (out.estimate) {
      h_df.push_back(out.estimate->h_df);
      result.series.frames.emplace_back(out.estimate->index,
                                        out.estimate->h_df);
      result.frames.push_back(std::move(*out.estimate));
    } else {
      result.skipped.push_back(std::move(*out.skip));
    }
  }
  if (h_df.empty())
    throw Error(ErrorCode::no_scene_estimate, "every tracked frame was skipped");

  const KalmanParams params{config.kalman_q, config.kalman_r,
                            config.kalman_p0};
  const std::vector<double> h_tf = kalman_smooth(h_df, params);
  result.series.filtered.reserve(h_tf.size());
  for (std::size_t k = 0; k < h_tf.size(); ++k)
    result.series.filtered.emplace_back(result.series.frames[k].first,
                                        h_tf[k]);
  result.series.scene_height_m = scene_height(h_tf);

  std::sort(result.skipped.begin(), result.skipped.end(),
            [](const SkippedFrame& a, const SkippedFrame& b) {
              return a.index < b.index;
            });
  return result;
}

ResultsTable SceneEstimate::to_results() const {
  ResultsTable table;
  table.rows.reserve(frames.size());
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const FrameEstimate& f = frames[k];
    ResultsRow row;
    row.frame_index = f.index;
    row.h_df = f.h_df;
    row.h_tf = series.filtered[k].second;
    row.box_x = f.box.x_min;
    row.box_y = f.box.y_min;
    row.box_w = f.box.w;
    row.box_h = f.box.h;
    row.n_points_after_filter = f.n_points_after_filter;
    table.rows.push_back(row);
  }
  table.scene_height_m = series.scene_height_m;
  return table;
}

CorpusSummary run_corpus(const std::vector<std::filesystem::path>& manifests,
                         const PipelineConfig& config) {
  CorpusSummary summary;
  std::vector<HeightMetrics> with_gt;
  for (const std::filesystem::path& path : manifests) {
    SceneReport report;
    report.manifest = path;
    try {
      const SceneData scene = load_scene(path);
      const SceneEstimate estimate = run_scene(scene, config);
      report.scene_height_m = estimate.series.scene_height_m;
      if (scene.ground_truth_height_m) {
        report.height = height_metrics(estimate.series.scene_height_m,
                                       *scene.ground_truth_height_m);
        with_gt.push_back(*report.height);
      }
    } catch (const std::exception& e) {
      report.error = e.what();
    }
    summary.scenes.push_back(std::move(report));
  }
  if (!with_gt.empty()) summary.aggregate = aggregate(with_gt);
  return summary;
}

}  // namespace shle
