#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shle/config.hpp"
#include "shle/detection.hpp"
#include "shle/geometry.hpp"
#include "shle/grid.hpp"
#include "shle/metrics.hpp"
#include "shle/synthetic.hpp"

namespace shle {

// ---- PFM (portable float map) ---------------------------------------------
// Header "Pf\n<width> <height>\n<scale>\n"; negative scale marks
// little-endian payload; float32 rows stored bottom to top. Readers reject
// malformed bytes with the offending byte offset; writer/reader round trips
// are bit-exact.

DisparityMap read_pfm(const std::filesystem::path& path);
Image read_pfm_image(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const FloatGrid& grid);

// ---- Detections ------------------------------------------------------------
// {"frames":[{"index":0,"boxes":[{"x":..,"y":..,"w":..,"h":..,"score":..}]}]}
// Unknown fields are ignored; negative sizes or scores outside [0,1] raise
// ValidationError naming the frame.

std::vector<DetectionSet> read_detections(const std::filesystem::path& path);
void write_detections(const std::filesystem::path& path,
                      const std::vector<DetectionSet>& sets);

// ---- Manifest and in-memory scene ------------------------------------------

struct ManifestFrame {
  int index = 0;
  std::string disparity_path;
  std::optional<std::string> image_path;
  std::optional<std::vector<BBox>> detections;  // inline detections
  std::optional<BBox> gt_box;                   // analytic truth, if known
};

struct Manifest {
  CameraRig rig;
  std::vector<ManifestFrame> frames;
  std::optional<std::string> detections_path;  // external file wins over inline
  std::optional<double> ground_truth_height_m;
  std::filesystem::path base_dir;  // directory the relative paths hang off
};

// Fully loaded scene, ready for the pipeline.
struct SceneFrame {
  int index = 0;
  DisparityMap disparity;
  std::optional<Image> image;
  std::optional<DetectionSet> detections;
  std::optional<BBox> gt_box;
};

struct SceneData {
  CameraRig rig;
  std::vector<SceneFrame> frames;
  std::optional<double> ground_truth_height_m;
};

// Parses and validates; every referenced file must exist. Missing camera
// fields raise ConfigurationError listing their names.
Manifest read_manifest(const std::filesystem::path& path);

SceneData load_scene(const Manifest& manifest);
SceneData load_scene(const std::filesystem::path& manifest_path);

// In-memory bridge from the synthetic generator.
SceneData to_scene_data(const SyntheticScene& scene);

// Writes manifest.json plus frames/*.pfm under dir; detections and ground
// truth go inline into the manifest.
void write_scene(const std::filesystem::path& dir, const SyntheticScene& scene);

// ---- Results table ---------------------------------------------------------

struct ResultsRow {
  int frame_index = 0;
  double h_df = 0.0;
  double h_tf = 0.0;
  double box_x = 0.0;
  double box_y = 0.0;
  double box_w = 0.0;
  double box_h = 0.0;
  int n_points_after_filter = 0;
};

struct ResultsTable {
  std::vector<ResultsRow> rows;
  double scene_height_m = 0.0;
};

void write_results(const std::filesystem::path& path, const ResultsTable& table);
ResultsTable read_results(const std::filesystem::path& path);

// ---- Metrics ---------------------------------------------------------------

void write_metrics(const std::filesystem::path& path,
                   const std::optional<HeightMetrics>& height,
                   const std::optional<BoxMetrics>& box);

// ---- Pipeline config file --------------------------------------------------
// Strict: keys mirror PipelineConfig field names exactly; unknown keys are
// rejected so a typo cannot silently fall back to a default.

PipelineConfig read_config(const std::filesystem::path& path);

// ---- Synthetic scene spec --------------------------------------------------
// Strict JSON mirror of SceneSpec (unknown keys rejected). depth_trajectory
// is either an explicit array of per-frame depths or
// {"start":..,"end":..,"frames":..,"row_aligned":bool} which expands to a
// linear sweep, optionally snapped so the bar edge hits integer pixel rows.
// The camera block is optional and overrides defaults field by field.

SceneSpec read_scene_spec(const std::filesystem::path& path);

}  // namespace shle
