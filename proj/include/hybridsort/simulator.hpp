#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "hybridsort/types.hpp"

namespace hybridsort {

enum class MotionModel {
  kLinear,        // constant velocity, reflected at the image border
  kWeave,         // linear drift plus a sinusoidal sideways oscillation
  kCrossingPair,  // objects paired up, walking through each other mid-sequence
};

[[nodiscard]] MotionModel parse_motion_model(std::string_view name);
[[nodiscard]] std::string_view to_string(MotionModel m);

/// Parameters of a synthetic scene. Every random draw comes from `seed`.
struct ScenarioSpec {
  int object_count = 2;
  MotionModel motion = MotionModel::kCrossingPair;
  std::vector<MotionModel> motion_overrides;  // per object; falls back to `motion`
  int frame_count = 120;
  double image_width = 1280.0;
  double image_height = 720.0;

  double speed = 4.0;             // px/frame, mean
  double weave_amplitude = 40.0;  // px
  double weave_period = 50.0;     // frames
  double min_height = 120.0;      // farthest objects
  double max_height = 260.0;      // nearest objects
  double aspect = 0.4;            // width / height
  double width_variation = 0.15;  // relative amplitude of pose-driven width changes
  double width_period = 40.0;     // mean period of the width oscillation, frames
  double aspect_spread = 0.0;     // per-object aspect drawn from aspect * [1 - s, 1 + s]

  // Occlusion model. An object is occluded when a nearer object overlaps it with
  // IoU above `occlusion_iou`; its confidence becomes
  // base_confidence * (1 - confidence_slope * occluded_fraction).
  double occlusion_iou = 0.1;
  double confidence_slope = 0.8;
  double base_confidence = 0.9;
  double confidence_noise = 0.02;  // std of unoccluded confidences around the base
  double dropout_probability = 0.2;
  double jitter_std = 1.0;  // px, per box coordinate
  // Limbs push detected box edges outward: each side of a detection moves out
  // by |N(0, 1)| * limb_extent * width.
  double limb_extent = 0.0;

  std::uint64_t seed = 0;

  /// Throws InputError when a parameter is out of range.
  void validate() const;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

struct Scenario {
  GroundTruth ground_truth;
  std::vector<FrameDetections> detections;  // one entry per frame, frames 1..frame_count
};

/// True when `a` is nearer to the camera than `b`: taller box, then lower bottom edge,
/// then smaller id.
[[nodiscard]] bool is_nearer(const GtObject& a, const GtObject& b);

/// Fraction of `target` that stays visible behind the union of `occluders`.
[[nodiscard]] double visible_fraction(const Box& target, std::span<const Box> occluders);

[[nodiscard]] Scenario generate(const ScenarioSpec& spec);

/// Writes <dir>/gt/gt.txt, <dir>/det/det.txt and <dir>/seqinfo.ini.
void export_scenario(const Scenario& scenario, const ScenarioSpec& spec,
                     const std::filesystem::path& dir, std::string_view name = "synthetic");

}  // namespace hybridsort
