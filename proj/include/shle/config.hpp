#pragma once

namespace shle {

enum class TrafficSide { right, left };
enum class TrackerChoice { interpolation, ncc };

// Knobs for the whole two-stage pipeline. Defaults are the values that worked
// best in our sweeps; sweep-able names match the config-file keys one-to-one.
struct PipelineConfig {
  double M = 20.0;               // box lower-boundary extension (px)
  double sigma = 0.6;            // depth interval radius around Z_cen (m)
  double kde_bandwidth = 2.5;    // KDE bandwidth h (m)
  int n_lowest = 10;             // lowest-N points averaged into h_df
  double kalman_q = 1e-3;        // process noise variance
  double kalman_r = 1e-2;        // measurement noise variance
  double kalman_p0 = 1.0;        // initial covariance
  TrafficSide traffic_side = TrafficSide::right;
  double top_margin = 0.0;       // boxes with y_min <= margin are discarded
  TrackerChoice tracker = TrackerChoice::interpolation;
  int ncc_search_radius = 8;     // template search radius (px)
  double ncc_min_peak = 0.5;     // correlation below this keeps the old box
  bool use_depth_filter = true;  // ablation switch: Z interval filtering
  bool use_kde_center = true;    // ablation switch: KDE mode vs plain mean

  // Throws ConfigurationError naming every offending field.
  void validate() const;
};

}  // namespace shle
