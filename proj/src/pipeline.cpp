#include "hybridsort/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "hybridsort/config.hpp"
#include "hybridsort/errors.hpp"

namespace hybridsort {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double percentile(std::vector<double> sorted_ms, double q) {
  if (sorted_ms.empty()) return 0.0;
  const auto idx = static_cast<std::size_t>(q * static_cast<double>(sorted_ms.size() - 1) + 0.5);
  return sorted_ms[std::min(idx, sorted_ms.size() - 1)];
}

}  // namespace

SequenceRun run_sequence(const TrackerConfig& cfg, std::span<const FrameDetections> frames,
                         int frame_count) {
  using Clock = std::chrono::steady_clock;
  for (std::size_t k = 1; k < frames.size(); ++k) {
    if (frames[k].frame <= frames[k - 1].frame) {
      throw InputError(fmt::format("detection frames out of order: {} after {}", frames[k].frame,
                                   frames[k - 1].frame));
    }
  }
  const int last = std::max(frame_count, frames.empty() ? 0 : frames.back().frame);
  Tracker tracker(cfg);
  SequenceRun run;
  std::vector<double> step_ms;
  step_ms.reserve(static_cast<std::size_t>(std::max(last, 0)));
  std::size_t next = 0;
  const std::vector<Detection> none;
  for (int frame = 1; frame <= last; ++frame) {
    while (next < frames.size() && frames[next].frame < frame) ++next;
    const bool present = next < frames.size() && frames[next].frame == frame;
    std::span<const Detection> dets = present ? std::span<const Detection>(frames[next].detections)
                                              : std::span<const Detection>(none);
    const auto t0 = Clock::now();
    const std::vector<TrackedObject> out = tracker.step(frame, dets);
    const auto t1 = Clock::now();
    step_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    for (const TrackedObject& o : out) run.rows.push_back({frame, o.id, o.box, o.confidence});
  }

  RunTiming& t = run.timing;
  t.frames = step_ms.size();
  for (double ms : step_ms) t.total_seconds += ms / 1000.0;
  if (!step_ms.empty()) {
    t.mean_ms = 1000.0 * t.total_seconds / static_cast<double>(step_ms.size());
    std::sort(step_ms.begin(), step_ms.end());
    t.p50_ms = percentile(step_ms, 0.5);
    t.p95_ms = percentile(step_ms, 0.95);
    t.max_ms = step_ms.back();
  }
  return run;
}

std::vector<Sequence> generate_suite(const ScenarioSpec& base, int count,
                                     std::string_view prefix) {
  std::vector<Sequence> suite;
  suite.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    ScenarioSpec spec = base;
    spec.seed = base.seed + static_cast<std::uint64_t>(k);
    suite.push_back({fmt::format("{}-{:03d}", prefix, k), generate(spec)});
  }
  return suite;
}

std::vector<GridAxis> parse_grid(std::string_view text) {
  std::vector<GridAxis> axes;
  if (trim(text).empty()) return axes;
  for (std::string_view part : split(text, ';')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) {
      throw InputError(fmt::format("grid axis '{}' lacks '='", part));
    }
    GridAxis axis{std::string(trim(part.substr(0, eq))), {}};
    for (std::string_view v : split(part.substr(eq + 1), ',')) {
      if (v.empty()) throw InputError(fmt::format("grid axis '{}' has an empty value", axis.name));
      axis.values.emplace_back(v);
    }
    if (axis.name.empty()) throw InputError("grid axis without a name");
    for (const GridAxis& other : axes) {
      if (other.name == axis.name) throw InputError("duplicate grid axis '" + axis.name + "'");
    }
    axes.push_back(std::move(axis));
  }
  return axes;
}

void apply_axis(TrackerConfig& cfg, std::string_view name, std::string_view value) {
  static constexpr std::string_view kToggles[] = {"tcm",  "hmiou", "wmiou", "rocm",
                                                  "appearance", "byte", "ocr"};
  if (std::find(std::begin(kToggles), std::end(kToggles), name) != std::end(kToggles)) {
    cfg.set_toggle(name, parse_bool(value));
    return;
  }
  if (name == "variant") {
    const TrackerConfig layout = make_baseline_config(parse_variant(value));
    cfg.variant = layout.variant;
    cfg.tcm = layout.tcm;
    cfg.rocm = layout.rocm;
    cfg.appearance = layout.appearance;
    cfg.byte_stage = layout.byte_stage;
    cfg.ocr_stage = layout.ocr_stage;
    cfg.spatial = layout.spatial;
    return;
  }
  if (name == "stage1_conf") {
    cfg.first_stage_confidence = parse_confidence_model(value);
    return;
  }
  if (name == "stage2_conf") {
    cfg.byte_stage_confidence = parse_confidence_model(value);
    return;
  }
  ConfigDocument doc;
  doc.tracker = cfg;
  const std::string key = name.substr(0, 6) == "noise." ? std::string(name)
                                                        : "tracker." + std::string(name);
  apply_setting(doc, key, value);
  cfg = doc.tracker;
}

std::vector<GridCell> expand_grid(const TrackerConfig& base, std::span<const GridAxis> axes) {
  std::vector<GridCell> cells;
  if (axes.empty()) return cells;
  for (const GridAxis& a : axes) {
    if (a.values.empty()) return cells;
  }
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    GridCell cell;
    cell.config = base;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      const std::string& v = axes[k].values[idx[k]];
      apply_axis(cell.config, axes[k].name, v);
      cell.settings.emplace_back(axes[k].name, v);
      if (!cell.label.empty()) cell.label += ',';
      cell.label += axes[k].name + "=" + v;
    }
    cell.config.validate();
    cells.push_back(std::move(cell));

    std::size_t k = axes.size();
    while (k > 0) {
      --k;
      if (++idx[k] < axes[k].values.size()) break;
      idx[k] = 0;
      if (k == 0) return cells;
    }
  }
}

AblationTable run_ablation(std::span<const Sequence> suite, std::span<const GridCell> cells,
                           std::span<const GridAxis> axes, int jobs) {
  AblationTable table;
  for (const GridAxis& a : axes) table.axes.push_back(a.name);

  const std::size_t n_seq = suite.size();
  const std::size_t n_items = cells.size() * n_seq;
  std::vector<EvalReport> reports(n_items);
  std::vector<double> seconds(n_items, 0.0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    while (true) {
      const std::size_t item = next.fetch_add(1);
      if (item >= n_items) return;
      try {
        const GridCell& cell = cells[item / n_seq];
        const Sequence& seq = suite[item % n_seq];
        const SequenceRun run = run_sequence(cell.config, seq.scenario.detections,
                                             seq.scenario.ground_truth.last_frame());
        reports[item] = evaluate(seq.scenario.ground_truth, run.rows);
        reports[item].name = seq.name;
        seconds[item] = run.timing.total_seconds;
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_items);
      }
    }
  };

  const std::size_t threads =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1,
                              std::max<std::size_t>(n_items, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t c = 0; c < cells.size(); ++c) {
    AblationRow row;
    row.cell = cells[c];
    const std::span<const EvalReport> per_seq(reports.data() + c * n_seq, n_seq);
    row.report = aggregate(per_seq, cells[c].label);
    for (std::size_t s = 0; s < n_seq; ++s) row.track_seconds += seconds[c * n_seq + s];
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string format_ablation_table(const AblationTable& table) {
  std::vector<std::size_t> widths;
  for (std::size_t k = 0; k < table.axes.size(); ++k) {
    std::size_t w = table.axes[k].size();
    for (const AblationRow& r : table.rows) w = std::max(w, r.cell.settings[k].second.size());
    widths.push_back(w);
  }
  std::string out;
  for (std::size_t k = 0; k < table.axes.size(); ++k) {
    out += fmt::format("{:<{}}  ", table.axes[k], widths[k]);
  }
  out += fmt::format("{:>8}  {:>8}  {:>6}  {:>7}  {:>7}\n", "MOTA", "IDF1", "IDSW", "FP", "FN");
  for (const AblationRow& r : table.rows) {
    for (std::size_t k = 0; k < table.axes.size(); ++k) {
      out += fmt::format("{:<{}}  ", r.cell.settings[k].second, widths[k]);
    }
    out += fmt::format("{:>8.4f}  {:>8.4f}  {:>6}  {:>7}  {:>7}\n", r.report.mota(),
                       r.report.idf1(), r.report.counts.idsw, r.report.counts.fp,
                       r.report.counts.fn);
  }
  return out;
}

}  // namespace hybridsort
