#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "avloc/grid.hpp"

namespace avloc {

/// The three ways of combining per-modality speaker-presence grids.
enum class FusionStrategy {
  Flat,       // unweighted sum of log-likelihoods
  Invariant,  // one scalar weight per frame: lambda, 1 - lambda
  Spatial,    // one weight per cell and modality
};

inline const char* to_string(FusionStrategy s) {
  switch (s) {
    case FusionStrategy::Flat: return "flat";
    case FusionStrategy::Invariant: return "invariant";
    case FusionStrategy::Spatial: return "spatial";
  }
  return "?";
}

inline FusionStrategy parse_fusion_strategy(const std::string& s) {
  if (s == "flat") return FusionStrategy::Flat;
  if (s == "invariant") return FusionStrategy::Invariant;
  if (s == "spatial") return FusionStrategy::Spatial;
  throw UsageError("unknown fusion strategy '" + s + "' (expected flat|invariant|spatial)");
}

/// Default clamp floor applied to tracker probabilities before the log.
inline constexpr double kDefaultProbFloor = 1e-6;

namespace detail {

inline void require_same_geometry(const GridGeometry& a, const GridGeometry& b,
                                  const char* what) {
  if (!(a == b)) {
    throw UsageError(std::string("geometry mismatch between fusion inputs (") + what + ")");
  }
}

}  // namespace detail

/// Flat fusion: y = log z_A + log z_V per cell, probabilities clamped to
/// [floor, 1] so the logs stay finite.
inline LogLikGrid flat_fuse(const ProbGrid& z_a, const ProbGrid& z_v,
                            double floor = kDefaultProbFloor) {
  detail::require_same_geometry(z_a.geometry(), z_v.geometry(), "audio vs video");
  const auto a = z_a.values();
  const auto v = z_v.values();
  std::vector<double> y(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    y[k] = std::log(clamp_probability(a[k], floor)) + std::log(clamp_probability(v[k], floor));
  }
  return LogLikGrid(z_a.geometry(), std::move(y));
}

/// Weighted fusion with per-cell stream weights:
/// y = lambda_A * log z_A + lambda_V * log z_V per cell.
inline LogLikGrid spatial_fuse(const ProbGrid& z_a, const ProbGrid& z_v,
                               const WeightGrid& w_a, const WeightGrid& w_v,
                               double floor = kDefaultProbFloor) {
  detail::require_same_geometry(z_a.geometry(), z_v.geometry(), "audio vs video");
  detail::require_same_geometry(z_a.geometry(), w_a.geometry(), "observations vs audio weights");
  detail::require_same_geometry(z_a.geometry(), w_v.geometry(), "observations vs video weights");
  const auto a = z_a.values();
  const auto v = z_v.values();
  const auto wa = w_a.values();
  const auto wv = w_v.values();
  std::vector<double> y(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    y[k] = wa[k] * std::log(clamp_probability(a[k], floor)) +
           wv[k] * std::log(clamp_probability(v[k], floor));
  }
  return LogLikGrid(z_a.geometry(), std::move(y));
}

/// Time-variant but spatially invariant fusion: the scalar lambda_t weights
/// audio, its complement weights video. Equivalent to spatial_fuse with
/// constant weight grids (lambda_t, 1 - lambda_t).
inline LogLikGrid invariant_fuse(const ProbGrid& z_a, const ProbGrid& z_v, double lambda_t,
                                 double floor = kDefaultProbFloor) {
  if (!(lambda_t >= 0.0 && lambda_t <= 1.0)) {
    throw UsageError("invariant fusion weight must lie in [0, 1], got " +
                     std::to_string(lambda_t));
  }
  const WeightGrid w_a = WeightGrid::filled(z_a.geometry(), lambda_t);
  const WeightGrid w_v = WeightGrid::filled(z_a.geometry(), 1.0 - lambda_t);
  return spatial_fuse(z_a, z_v, w_a, w_v, floor);
}

/// Maps a fused log-likelihood grid to a presence-probability grid, p = exp(y).
inline ProbGrid to_probability(const LogLikGrid& y) {
  const auto in = y.values();
  std::vector<double> p(in.size());
  for (std::size_t k = 0; k < in.size(); ++k) {
    p[k] = std::exp(in[k]);
  }
  return ProbGrid(y.geometry(), std::move(p));
}

}  // namespace avloc
