#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hybridsort/metrics.hpp"
#include "hybridsort/simulator.hpp"
#include "hybridsort/tracker.hpp"
#include "hybridsort/types.hpp"

namespace hybridsort {

/// Wall-clock cost of the Tracker::step calls of one run (I/O excluded).
struct RunTiming {
  std::size_t frames = 0;
  double total_seconds = 0.0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;

  [[nodiscard]] double fps() const {
    return total_seconds > 0.0 ? static_cast<double>(frames) / total_seconds : 0.0;
  }
};

struct SequenceRun {
  std::vector<ResultRow> rows;  // sorted by (frame, id)
  RunTiming timing;
};

/// Runs a fresh tracker over frames 1..frame_count. `frames` may omit empty frames and
/// must be in ascending frame order; frames past `frame_count` extend the run.
[[nodiscard]] SequenceRun run_sequence(const TrackerConfig& cfg,
                                       std::span<const FrameDetections> frames,
                                       int frame_count = 0);

struct Sequence {
  std::string name;
  Scenario scenario;
};

/// `count` scenarios from `base` with seeds base.seed + k, named "<prefix>-<k>".
[[nodiscard]] std::vector<Sequence> generate_suite(const ScenarioSpec& base, int count,
                                                   std::string_view prefix = "seq");

// Ablation grids. An axis is "name=v1,v2,..."; axes are separated by ';'.
// Axis names: any toggle accepted by TrackerConfig::set_toggle (values on/off),
// "variant" (switches the stage layout and cue flags like make_baseline_config but keeps
// weights and thresholds), "spatial", "stage1_conf", "stage2_conf", and any tracker.* or
// noise.* config key written without the "tracker." prefix (e.g. lambda1, gate).
struct GridAxis {
  std::string name;
  std::vector<std::string> values;
};

struct GridCell {
  std::string label;  // "name=value,name=value"
  std::vector<std::pair<std::string, std::string>> settings;
  TrackerConfig config;
};

[[nodiscard]] std::vector<GridAxis> parse_grid(std::string_view text);

/// Applies one axis value to a configuration. Throws InputError on unknown names/values.
void apply_axis(TrackerConfig& cfg, std::string_view name, std::string_view value);

/// Cartesian product in axis order (last axis fastest). No axes yields no cells.
[[nodiscard]] std::vector<GridCell> expand_grid(const TrackerConfig& base,
                                                std::span<const GridAxis> axes);

struct AblationRow {
  GridCell cell;
  EvalReport report;  // aggregated over the suite
  double track_seconds = 0.0;
};

struct AblationTable {
  std::vector<std::string> axes;
  std::vector<AblationRow> rows;  // in grid order
};

/// Tracks and evaluates every (cell, sequence) pair on `jobs` worker threads. The table is
/// identical for any `jobs` value apart from timing columns.
[[nodiscard]] AblationTable run_ablation(std::span<const Sequence> suite,
                                         std::span<const GridCell> cells,
                                         std::span<const GridAxis> axes, int jobs = 1);

/// Header line plus one line per row: axis values, MOTA, IDF1, IDSW, FP, FN.
[[nodiscard]] std::string format_ablation_table(const AblationTable& table);

}  // namespace hybridsort
