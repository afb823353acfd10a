#pragma once

#include <string>
#include <utility>
#include <vector>

#include "avloc/grid.hpp"

namespace avloc {

/// One synchronized frame: audio and video tracker posterior grids plus the
/// ground truth.
struct Frame {
  ProbGrid z_audio;
  ProbGrid z_video;
  GroundTruthFrame truth;
};

/// A contiguous recording of frames sharing one geometry.
struct Scenario {
  std::string name;
  int n_speakers = 0;
  std::uint64_t seed = 0;
  std::vector<Frame> frames;
};

enum class Split { Train, Val, Test };

inline const char* to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

inline Split parse_split(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw UsageError("unknown split '" + s + "' (expected train|val|test)");
}

/// Scenario-level train/val/test partition.
struct DatasetBundle {
  GridGeometry geometry{};
  std::vector<Scenario> train;
  std::vector<Scenario> val;
  std::vector<Scenario> test;

  const std::vector<Scenario>& split(Split s) const {
    switch (s) {
      case Split::Train: return train;
      case Split::Val: return val;
      case Split::Test: return test;
    }
    return test;
  }
};

/// Flattens scenarios into a frame-pointer list (scenario order, then frame
/// order) for batching and evaluation.
inline std::vector<const Frame*> flatten_frames(const std::vector<Scenario>& scenarios) {
  std::vector<const Frame*> out;
  for (const Scenario& sc : scenarios) {
    for (const Frame& f : sc.frames) out.push_back(&f);
  }
  return out;
}

}  // namespace avloc
