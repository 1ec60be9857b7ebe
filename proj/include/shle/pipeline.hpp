#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shle/config.hpp"
#include "shle/detection.hpp"
#include "shle/errors.hpp"
#include "shle/io_formats.hpp"
#include "shle/metrics.hpp"
#include "shle/temporal_filter.hpp"

namespace shle {

// One frame that made it through stage 2.
struct FrameEstimate {
  int index = 0;
  BBox box;           // stage-1 box, before pixel extension
  double h_df = 0.0;  // per-frame height, before temporal smoothing
  int n_points_after_filter = 0;
};

// One frame that did not, and why.
struct SkippedFrame {
  int index = 0;
  ErrorCode reason = ErrorCode::no_device;
  std::string detail;
};

// Scene-level output: every input frame lands in exactly one of
// `frames` (estimated) or `skipped`.
struct SceneEstimate {
  HeightSeries series;
  std::vector<FrameEstimate> frames;
  std::vector<SkippedFrame> skipped;

  ResultsTable to_results() const;
};

// End-to-end run over one scene: per-frame box selection, gap tracking,
// depth lifting and filtering, then Kalman smoothing and the scene mean.
// Per-frame failures become SkippedFrame entries; only a scene with zero
// surviving frames throws (Error with code no_scene_estimate).
// Honors SHLE_THREADS as a cap on frame-level parallelism; results are
// byte-identical at any parallelism degree.
SceneEstimate run_scene(const SceneData& scene, const PipelineConfig& config);

// Per-scene outcome inside a corpus run; `error` is set instead of the
// estimate when the whole scene failed.
struct SceneReport {
  std::filesystem::path manifest;
  std::optional<double> scene_height_m;
  std::optional<HeightMetrics> height;  // present when ground truth was known
  std::optional<std::string> error;
};

struct CorpusSummary {
  std::vector<SceneReport> scenes;
  // Mean |HE| / mean HER over the scenes that had ground truth.
  std::optional<HeightAggregate> aggregate;
};

// Runs every manifest, never propagating per-scene failures.
CorpusSummary run_corpus(const std::vector<std::filesystem::path>& manifests,
                         const PipelineConfig& config);

}  // namespace shle
