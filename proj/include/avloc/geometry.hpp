#pragma once

#include <cmath>
#include <string>

#include "avloc/errors.hpp"

namespace avloc {

/// Pixel-space position. Origin at the top-left image corner, x grows to the
/// right (columns), y grows downward (rows).
struct PixelPos {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const PixelPos&) const = default;
};

struct CellIndex {
  int row = 0;
  int col = 0;

  bool operator==(const CellIndex&) const = default;
};

/// Uniform localization grid laid over a camera frame. Rows span the image
/// height, columns span the width; boundary pixels belong to the higher-index
/// cell (half-open cell intervals).
struct GridGeometry {
  int rows = 20;
  int cols = 24;
  double frame_width = 720.0;
  double frame_height = 450.0;

  double cell_width() const { return frame_width / cols; }
  double cell_height() const { return frame_height / rows; }
  int cell_count() const { return rows * cols; }
  int cell_index(int i, int j) const { return i * cols + j; }

  bool contains(const PixelPos& p) const {
    return p.x >= 0.0 && p.x < frame_width && p.y >= 0.0 && p.y < frame_height;
  }

  bool operator==(const GridGeometry&) const = default;
};

inline void ensure_valid(const GridGeometry& g) {
  if (g.rows < 1 || g.cols < 1) {
    throw UsageError("grid geometry requires rows >= 1 and cols >= 1");
  }
  if (!(g.frame_width > 0.0) || !(g.frame_height > 0.0)) {
    throw UsageError("grid geometry requires positive frame dimensions");
  }
}

/// Pixel coordinates of the center of cell (i, j).
inline PixelPos cell_center(const GridGeometry& g, int i, int j) {
  ensure_valid(g);
  if (i < 0 || i >= g.rows || j < 0 || j >= g.cols) {
    throw UsageError("cell index (" + std::to_string(i) + ", " + std::to_string(j) +
                     ") outside " + std::to_string(g.rows) + "x" + std::to_string(g.cols) +
                     " grid");
  }
  return {(j + 0.5) * g.frame_width / g.cols, (i + 0.5) * g.frame_height / g.rows};
}

/// Cell containing an in-frame pixel. Inverse of cell_center for all cell
/// centers: pixel_to_cell(cell_center(i, j)) == (i, j).
inline CellIndex pixel_to_cell(const GridGeometry& g, double x, double y) {
  ensure_valid(g);
  if (!g.contains({x, y})) {
    throw UsageError("pixel (" + std::to_string(x) + ", " + std::to_string(y) +
                     ") outside frame " + std::to_string(g.frame_width) + "x" +
                     std::to_string(g.frame_height));
  }
  int i = static_cast<int>(std::floor(y / g.cell_height()));
  int j = static_cast<int>(std::floor(x / g.cell_width()));
  // Guard against floating-point division landing exactly on rows/cols.
  if (i >= g.rows) i = g.rows - 1;
  if (j >= g.cols) j = g.cols - 1;
  return {i, j};
}

inline CellIndex pixel_to_cell(const GridGeometry& g, const PixelPos& p) {
  return pixel_to_cell(g, p.x, p.y);
}

inline double euclidean_distance(const PixelPos& a, const PixelPos& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace avloc
