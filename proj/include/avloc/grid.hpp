#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "avloc/geometry.hpp"

namespace avloc {

namespace detail {

struct ProbabilityPolicy {
  static constexpr const char* kName = "probability";
  static bool valid(double v) { return v >= 0.0 && v <= 1.0; }
};

struct WeightPolicy {
  static constexpr const char* kName = "stream weight";
  static bool valid(double v) { return v >= 0.0 && v <= 1.0; }
};

struct LogLikPolicy {
  static constexpr const char* kName = "log-likelihood";
  static bool valid(double v) { return v <= 0.0; }  // rejects NaN as well
};

}  // namespace detail

/// Immutable rows x cols grid of doubles, validated on construction against
/// the policy's value range. Values are stored row-major.
template <class Policy>
class ValueGrid {
 public:
  ValueGrid(const GridGeometry& geom, std::vector<double> values)
      : geom_(geom), values_(std::move(values)) {
    ensure_valid(geom_);
    if (static_cast<int>(values_.size()) != geom_.cell_count()) {
      throw UsageError(std::string(Policy::kName) + " grid expects " +
                       std::to_string(geom_.cell_count()) + " values, got " +
                       std::to_string(values_.size()));
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!Policy::valid(values_[k])) {
        throw UsageError(std::string(Policy::kName) + " grid value " +
                         std::to_string(values_[k]) + " at flat index " + std::to_string(k) +
                         " out of range");
      }
    }
  }

  static ValueGrid filled(const GridGeometry& geom, double v) {
    ensure_valid(geom);
    return ValueGrid(geom, std::vector<double>(static_cast<std::size_t>(geom.cell_count()), v));
  }

  const GridGeometry& geometry() const { return geom_; }
  std::span<const double> values() const { return values_; }

  double operator()(int i, int j) const { return values_[geom_.cell_index(i, j)]; }

  int rows() const { return geom_.rows; }
  int cols() const { return geom_.cols; }

  bool operator==(const ValueGrid&) const = default;

 private:
  GridGeometry geom_;
  std::vector<double> values_;
};

/// Per-cell speaker-presence probabilities z^(i,j) in [0, 1].
using ProbGrid = ValueGrid<detail::ProbabilityPolicy>;

/// Per-cell stream weights lambda^(i,j) in [0, 1].
using WeightGrid = ValueGrid<detail::WeightPolicy>;

/// Fused per-cell log-likelihoods y^(i,j) <= 0.
using LogLikGrid = ValueGrid<detail::LogLikPolicy>;

/// Clamps a raw tracker output into [floor, 1] so that its logarithm stays
/// finite. The floor must lie strictly inside (0, 1).
inline double clamp_probability(double v, double floor) {
  if (!(floor > 0.0) || !(floor < 1.0)) {
    throw UsageError("probability clamp floor must lie in (0, 1)");
  }
  return std::min(std::max(v, floor), 1.0);
}

/// Binary occupancy grid: 1 in every cell that contains at least one of the
/// given in-frame positions.
inline std::vector<std::uint8_t> occupancy_from_positions(const GridGeometry& geom,
                                                          std::span<const PixelPos> positions) {
  ensure_valid(geom);
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(geom.cell_count()), 0);
  for (const PixelPos& p : positions) {
    const CellIndex c = pixel_to_cell(geom, p);
    occ[geom.cell_index(c.row, c.col)] = 1;
  }
  return occ;
}

/// Ground-truth speaker positions for one frame, with the derived binary
/// occupancy indicator per grid cell.
class GroundTruthFrame {
 public:
  GroundTruthFrame(const GridGeometry& geom, std::vector<PixelPos> positions)
      : geom_(geom), positions_(std::move(positions)) {
    occupancy_ = occupancy_from_positions(geom_, positions_);
  }

  const GridGeometry& geometry() const { return geom_; }
  const std::vector<PixelPos>& positions() const { return positions_; }
  std::span<const std::uint8_t> occupancy() const { return occupancy_; }
  bool occupied(int i, int j) const { return occupancy_[geom_.cell_index(i, j)] != 0; }
  int speaker_count() const { return static_cast<int>(positions_.size()); }

 private:
  GridGeometry geom_;
  std::vector<PixelPos> positions_;
  std::vector<std::uint8_t> occupancy_;
};

}  // namespace avloc
