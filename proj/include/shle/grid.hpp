#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace shle {

// Row-major float raster, row 0 at the top of the image. Disparity and depth
// share one validity rule: a cell is usable iff it is finite and positive;
// everything else (NaN, inf, zero, negatives) is the invalid sentinel.
struct FloatGrid {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  FloatGrid() = default;
  FloatGrid(int w, int h, float fill = invalid())
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  static float invalid() { return std::numeric_limits<float>::quiet_NaN(); }
  static bool is_valid(float v) { return std::isfinite(v) && v > 0.0f; }

  float at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  float& at(int x, int y) {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  std::size_t size() const { return values.size(); }
};

struct DisparityMap : FloatGrid {
  using FloatGrid::FloatGrid;
};

struct DepthMap : FloatGrid {
  using FloatGrid::FloatGrid;
};

// Grayscale intensity image, values nominally in [0, 1].
struct Image : FloatGrid {
  using FloatGrid::FloatGrid;
};

}  // namespace shle
