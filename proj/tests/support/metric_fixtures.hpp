#pragma once

#include <algorithm>
#include <vector>

#include "generators.hpp"
#include "hybridsort/types.hpp"
#include "oracles.hpp"

namespace testfix {

using namespace hybridsort;

inline GroundTruth make_gt(int frames) {
  GroundTruth gt;
  gt.frames.resize(static_cast<std::size_t>(frames));
  return gt;
}

inline void add_gt(GroundTruth& gt, int frame, int id, const Box& b) {
  gt.frames[static_cast<std::size_t>(frame - 1)].push_back({id, b, 1.0});
}

inline std::vector<ResultRow> perfect(const GroundTruth& gt) {
  std::vector<ResultRow> out;
  for (std::size_t f = 0; f < gt.frames.size(); ++f) {
    for (const GtObject& g : gt.frames[f]) out.push_back({static_cast<int>(f) + 1, g.id, g.box, 1.0});
  }
  return out;
}

inline std::vector<oracle::LabeledBox> labeled(const GroundTruth& gt) {
  std::vector<oracle::LabeledBox> out;
  for (std::size_t f = 0; f < gt.frames.size(); ++f) {
    for (const GtObject& g : gt.frames[f]) {
      out.push_back({static_cast<int>(f) + 1, g.id, {g.box.x1, g.box.y1, g.box.x2, g.box.y2}});
    }
  }
  return out;
}

inline std::vector<oracle::LabeledBox> labeled(const std::vector<ResultRow>& rows) {
  std::vector<oracle::LabeledBox> out;
  for (const ResultRow& r : rows) out.push_back({r.frame, r.id, {r.box.x1, r.box.y1, r.box.x2, r.box.y2}});
  return out;
}

// Random scene: up to `max_ids` objects on a coarse grid (no overlaps between objects),
// and predictions that copy, shift, drop, relabel or invent boxes.
struct Fixture {
  GroundTruth gt;
  std::vector<ResultRow> results;
};

inline Fixture random_fixture(testgen::Rng& rng, int max_ids, int max_pred_ids) {
  Fixture fx;
  const int frames = rng.integer(1, 8);
  fx.gt = make_gt(frames);
  const int ids = rng.integer(0, max_ids);
  for (int f = 1; f <= frames; ++f) {
    std::vector<int> used_pred;
    for (int id = 1; id <= ids; ++id) {
      if (rng.coin(0.15)) continue;
      const Box b = Box{100.0 * id, 50.0, 100.0 * id + 40.0, 150.0}.translated(2.0 * f, 0);
      add_gt(fx.gt, f, id, b);
      if (rng.coin(0.2)) continue;
      int pid = rng.integer(1, max_pred_ids);
      if (std::find(used_pred.begin(), used_pred.end(), pid) != used_pred.end()) continue;
      used_pred.push_back(pid);
      const double shift = rng.coin(0.2) ? rng.uniform(10, 30) : rng.uniform(-2, 2);
      fx.results.push_back({f, pid, b.translated(shift, 0), 0.9});
    }
    if (rng.coin(0.3)) {
      const int pid = rng.integer(1, max_pred_ids);
      if (std::find(used_pred.begin(), used_pred.end(), pid) == used_pred.end()) {
        fx.results.push_back({f, pid, {900, 500, 940, 600}, 0.5});
      }
    }
  }
  return fx;
}

}  // namespace testfix
