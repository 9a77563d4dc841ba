#pragma once

#include <vector>

#include "hybridsort/pipeline.hpp"
#include "hybridsort/simulator.hpp"

// Seeded scenario suites for the ablation direction checks. Pose parameters give
// each object its own build and a width that changes faster than its height.
namespace testsuite {

using namespace hybridsort;

inline ScenarioSpec pose_scene(MotionModel motion, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.object_count = 6;
  spec.frame_count = 150;
  spec.motion = motion;
  spec.aspect_spread = 0.2;
  spec.width_variation = 0.25;
  spec.width_period = 24.0;
  spec.limb_extent = 0.05;
  spec.seed = seed;
  return spec;
}

inline std::vector<Sequence> append(std::vector<Sequence> a, std::vector<Sequence> b) {
  for (Sequence& s : b) a.push_back(std::move(s));
  return a;
}

/// 100 crossing-pair and 100 weave scenes.
inline std::vector<Sequence> crossing_weave_suite() {
  return append(generate_suite(pose_scene(MotionModel::kCrossingPair, 5000), 100, "cross"),
                generate_suite(pose_scene(MotionModel::kWeave, 6000), 100, "weave"));
}

/// 200 crossing-pair scenes with a wide spread of object heights (depths).
inline std::vector<Sequence> depth_stratified_suite() {
  ScenarioSpec spec = pose_scene(MotionModel::kCrossingPair, 7000);
  spec.min_height = 70.0;
  spec.max_height = 330.0;
  return generate_suite(spec, 200, "depth");
}

}  // namespace testsuite
