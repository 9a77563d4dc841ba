#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hybridsort/types.hpp"

namespace hybridsort {

/// One rectangle to draw.
struct OverlayRecord {
  int frame = 0;
  int id = 0;
  Box box;
  std::string color;  // "#rrggbb", a function of id only
  bool ground_truth = false;

  friend bool operator==(const OverlayRecord&, const OverlayRecord&) = default;
};

[[nodiscard]] std::string color_token(int id);

/// Records ordered by frame, ground truth before results, then id.
[[nodiscard]] std::vector<OverlayRecord> build_overlay(std::span<const ResultRow> results,
                                                       const GroundTruth* gt = nullptr);

/// One line per record: "frame id kind color left top width height".
[[nodiscard]] std::string render_overlay_text(std::span<const OverlayRecord> records);

/// SVG with one <g> per frame; ground-truth boxes are dashed.
[[nodiscard]] std::string render_overlay_svg(std::span<const OverlayRecord> records,
                                             double width, double height);

/// Picks SVG for a ".svg" extension and text otherwise. Written atomically.
void write_overlay(const std::filesystem::path& path, std::span<const OverlayRecord> records,
                   double width = 1280.0, double height = 720.0);

}  // namespace hybridsort
