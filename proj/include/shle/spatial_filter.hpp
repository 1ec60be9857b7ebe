#pragma once

#include <vector>

#include "shle/geometry.hpp"

namespace shle {

struct KdeConfig {
  double bandwidth = 2.5;  // h, meters of depth

  // Finest step of the first local-search stage around the best sample.
  double refinement_step() const { return bandwidth / 100.0; }
};

// Effective-depth window [center - radius, center + radius].
struct DepthInterval {
  double center = 0.0;
  double radius = 0.0;
};

// Gaussian kernel density estimate at x: mean of N(x_i, h^2) densities.
double kde_density(double x, const std::vector<double>& samples, double h);

// Location of the density maximum: densities are compared at sample
// locations first, then a local grid search refines around the winner.
// Exact ties resolve toward the smaller depth.
double kde_mode(const std::vector<double>& samples, double h);

// Keep exactly the points whose camera depth lies in the closed interval
// [z_cen - sigma, z_cen + sigma], in input order. Throws
// Error(empty_after_filter) when nothing survives.
DevicePointCloud depth_filter(const DevicePointCloud& cloud, double z_cen,
                              double sigma);

}  // namespace shle
