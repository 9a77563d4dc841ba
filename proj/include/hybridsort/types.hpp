#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hybridsort/geometry.hpp"

namespace hybridsort {

using Embedding = std::vector<double>;

/// One detector output for one frame.
struct Detection {
  Box box;
  double confidence = 0.0;
  std::optional<Embedding> embedding;
  std::size_t source_index = 0;  // position within its frame
};

/// All detections of one frame, in source order.
struct FrameDetections {
  int frame = 0;
  std::vector<Detection> detections;
};

/// A tracker output for one frame.
struct TrackedObject {
  int id = 0;
  Box box;
  double confidence = 0.0;
};

/// A row of a MOT result file.
struct ResultRow {
  int frame = 0;
  int id = 0;
  Box box;
  double confidence = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct GtObject {
  int id = 0;
  Box box;
  double visibility = 1.0;
};

/// Ground truth per frame; `frames[k]` holds frame `first_frame + k`.
struct GroundTruth {
  int first_frame = 1;
  std::vector<std::vector<GtObject>> frames;

  [[nodiscard]] int last_frame() const {
    return first_frame + static_cast<int>(frames.size()) - 1;
  }
};

}  // namespace hybridsort
