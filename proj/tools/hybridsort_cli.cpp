// hybridsort: track, simulate, evaluate, ablate, overlay.
//
// Exit codes: 0 success, 1 unexpected failure, 2 bad input or usage, 3 numerical or
// internal invariant failure. Log verbosity comes from HYBRIDSORT_LOG_LEVEL
// (trace, debug, info, warn, error, off).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hybridsort/config.hpp"
#include "hybridsort/errors.hpp"
#include "hybridsort/io_mot.hpp"
#include "hybridsort/metrics.hpp"
#include "hybridsort/overlay.hpp"
#include "hybridsort/pipeline.hpp"
#include "hybridsort/simulator.hpp"

#ifndef HYBRIDSORT_VERSION
#define HYBRIDSORT_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace hybridsort;

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kBadInput = 2, kInternal = 3 };

// Tracker overrides shared by track and ablate.
struct TrackerFlags {
  std::optional<std::string> variant;
  std::vector<std::string> toggles;
  std::optional<double> lambda1;
  std::optional<std::string> lambda2;
  std::optional<double> lambda3;
  std::optional<double> gate;
  std::optional<double> high_thresh;
  std::optional<double> low_thresh;

  void add_to(CLI::App& app) {
    app.add_option("--variant", variant, "hybrid_sort | sort | byte_two_stage");
    app.add_option("--toggle", toggles,
                   "name=on|off for tcm, hmiou, wmiou, rocm, appearance, byte, ocr")
        ->take_all();
    app.add_option("--lambda1", lambda1, "velocity-direction weight");
    app.add_option("--lambda2", lambda2, "confidence weight: first[,byte]");
    app.add_option("--lambda3", lambda3, "appearance weight");
    app.add_option("--gate", gate, "minimum spatial similarity of a match");
    app.add_option("--high-thresh", high_thresh, "high/low confidence split");
    app.add_option("--low-thresh", low_thresh, "discard threshold");
  }

  void apply(TrackerConfig& cfg) const {
    if (variant) {
      // Switching the family resets the cue layout; weights and thresholds stay.
      apply_axis(cfg, "variant", *variant);
    }
    for (const std::string& t : toggles) {
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw InputError("--toggle expects name=on|off, got '" + t + "'");
      cfg.set_toggle(t.substr(0, eq), parse_bool(t.substr(eq + 1)));
    }
    if (lambda1) cfg.lambda_velocity = *lambda1;
    if (lambda2) {
      const auto comma = lambda2->find(',');
      cfg.lambda_confidence_first = parse_double(lambda2->substr(0, comma));
      cfg.lambda_confidence_byte = comma == std::string::npos
                                       ? cfg.lambda_confidence_first
                                       : parse_double(lambda2->substr(comma + 1));
    }
    if (lambda3) cfg.lambda_appearance = *lambda3;
    if (gate) cfg.gate = *gate;
    if (high_thresh) cfg.high_threshold = *high_thresh;
    if (low_thresh) cfg.low_threshold = *low_thresh;
    cfg.validate();
  }
};

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("hybridsort");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("HYBRIDSORT_LOG_LEVEL")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off") {
      spdlog::warn("ignoring unknown HYBRIDSORT_LOG_LEVEL '{}'", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

ConfigDocument load_config(const std::optional<std::string>& path) {
  return path ? read_config(*path) : ConfigDocument{};
}

// seqinfo.ini sits one directory above det/det.txt and gt/gt.txt.
std::optional<int> sequence_length_near(const fs::path& file) {
  const fs::path seqinfo = file.parent_path().parent_path() / "seqinfo.ini";
  return read_sequence_length(seqinfo);
}

// ---------------------------------------------------------------------------- track

struct TrackArgs {
  std::optional<std::string> config;
  std::optional<std::string> manifest;
  std::optional<std::string> dets;
  std::optional<std::string> embeddings;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> frames;
  TrackerFlags flags;
};

int cmd_track(const TrackArgs& args) {
  ConfigDocument doc;
  std::optional<std::string> dets = args.dets;
  std::optional<std::string> embeddings = args.embeddings;
  std::optional<int> frames = args.frames;
  if (args.manifest) {
    if (args.config) throw InputError("--manifest and --config are exclusive");
    doc = read_config(*args.manifest);
    const auto run_value = [&](const std::string& key) -> std::optional<std::string> {
      const auto it = doc.run.find(key);
      if (it == doc.run.end() || it->second.empty()) return std::nullopt;
      return it->second;
    };
    if (!dets) dets = run_value("dets");
    if (!embeddings) embeddings = run_value("embeddings");
    if (!frames) {
      if (auto v = run_value("frame_count")) frames = static_cast<int>(parse_integer(*v));
    }
  } else {
    doc = load_config(args.config);
  }
  args.flags.apply(doc.tracker);
  if (args.seed) doc.scenario.seed = *args.seed;
  if (!dets) throw InputError("no detection file given (--dets or --manifest)");

  const bool appearance = doc.tracker.uses_appearance();
  if (appearance && !embeddings) {
    throw InputError("appearance is enabled but no --embeddings file was given");
  }
  if (embeddings && !fs::exists(*embeddings)) {
    throw InputError("embedding file '" + *embeddings + "' does not exist");
  }

  DetectionFile det_file = read_detections(*dets);
  if (det_file.clamped_confidences > 0) {
    spdlog::warn("{}: clamped {} confidences into [0, 1]", *dets, det_file.clamped_confidences);
  }
  if (embeddings) {
    attach_embeddings(det_file, read_embeddings(*embeddings, det_file.row_count()));
  }
  const int frame_count =
      frames.value_or(sequence_length_near(*dets).value_or(det_file.last_frame()));
  spdlog::info("tracking {} rows over {} frames", det_file.row_count(), frame_count);

  const SequenceRun run = run_sequence(doc.tracker, det_file.frames, frame_count);

  const fs::path out_dir = args.out;
  fs::create_directories(out_dir);
  const fs::path results = out_dir / "results.txt";
  const fs::path manifest = out_dir / "manifest.txt";
  std::ostringstream body;
  write_results(body, run.rows);
  write_file_atomically(results, body.str());

  const RunTiming& t = run.timing;
  doc.run = {
      {"tool", "hybridsort track"},
      {"version", HYBRIDSORT_VERSION},
      {"dets", fs::absolute(*dets).string()},
      {"embeddings", embeddings ? fs::absolute(*embeddings).string() : ""},
      {"frame_count", std::to_string(frame_count)},
      {"seed", std::to_string(doc.scenario.seed)},
      {"results", fs::absolute(results).string()},
      {"result_rows", std::to_string(run.rows.size())},
      {"clamped_confidences", std::to_string(det_file.clamped_confidences)},
      {"timing.frames", std::to_string(t.frames)},
      {"timing.total_seconds", format_double(t.total_seconds)},
      {"timing.fps", format_double(t.fps())},
      {"timing.mean_ms", format_double(t.mean_ms)},
      {"timing.p50_ms", format_double(t.p50_ms)},
      {"timing.p95_ms", format_double(t.p95_ms)},
      {"timing.max_ms", format_double(t.max_ms)},
  };
  write_file_atomically(manifest, format_config(doc));
  spdlog::info("wrote {} rows to {} ({:.1f} frames/s in the association loop)", run.rows.size(),
               results.string(), t.fps());
  return kOk;
}

// ------------------------------------------------------------------------- simulate

struct SimulateArgs {
  std::optional<std::string> config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> objects;
  std::optional<int> frames;
  std::optional<std::string> motion;
  int count = 1;
};

int cmd_simulate(const SimulateArgs& args) {
  ConfigDocument doc = load_config(args.config);
  ScenarioSpec& spec = doc.scenario;
  if (args.seed) spec.seed = *args.seed;
  if (args.objects) spec.object_count = *args.objects;
  if (args.frames) spec.frame_count = *args.frames;
  if (args.motion) spec.motion = parse_motion_model(*args.motion);
  spec.validate();
  if (args.count < 1) throw InputError("--count must be >= 1");

  const fs::path out = args.out;
  for (int k = 0; k < args.count; ++k) {
    ScenarioSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(k);
    const std::string name = args.count == 1 ? out.filename().string() : fmt::format("seq-{:03d}", k);
    const fs::path dir = args.count == 1 ? out : out / name;
    const Scenario scenario = generate(s);
    export_scenario(scenario, s, dir, name);
    ConfigDocument snapshot = doc;
    snapshot.scenario = s;
    snapshot.run = {{"tool", "hybridsort simulate"}, {"version", HYBRIDSORT_VERSION}};
    write_file_atomically(dir / "manifest.txt", format_config(snapshot));
  }
  spdlog::info("wrote {} scenario(s) under {}", args.count, out.string());
  return kOk;
}

// ------------------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::vector<std::string> gt;
  std::vector<std::string> results;
  std::optional<std::string> out;
  double iou = kDefaultMatchIou;
};

int cmd_evaluate(const EvaluateArgs& args) {
  if (args.gt.size() != args.results.size()) {
    throw InputError(fmt::format("{} --gt files but {} --results files", args.gt.size(),
                                 args.results.size()));
  }
  std::vector<EvalReport> reports;
  for (std::size_t k = 0; k < args.gt.size(); ++k) {
    const GroundTruth gt = read_ground_truth(args.gt[k], sequence_length_near(args.gt[k]));
    const std::vector<ResultRow> rows = read_results(args.results[k]);
    EvalReport r = evaluate(gt, rows, args.iou);
    r.name = args.gt.size() == 1 ? "sequence" : fs::path(args.gt[k]).parent_path().parent_path().filename().string();
    if (r.name.empty()) r.name = fmt::format("seq{}", k);
    reports.push_back(std::move(r));
  }
  if (reports.size() > 1) reports.push_back(aggregate(reports));
  std::cout << format_report_table(reports);
  if (args.out) write_file_atomically(*args.out, format_report_kv(reports));
  return kOk;
}

// --------------------------------------------------------------------------- ablate

struct AblateArgs {
  std::optional<std::string> config;
  std::string grid;
  std::vector<std::string> sequences;
  int suite_size = 20;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::optional<std::string> out;
  TrackerFlags flags;
};

int cmd_ablate(const AblateArgs& args) {
  ConfigDocument doc = load_config(args.config);
  args.flags.apply(doc.tracker);
  if (args.seed) doc.scenario.seed = *args.seed;

  std::vector<Sequence> suite;
  if (!args.sequences.empty()) {
    for (const std::string& dir : args.sequences) {
      const fs::path root = dir;
      Sequence seq;
      seq.name = root.filename().string();
      const std::optional<int> len = read_sequence_length(root / "seqinfo.ini");
      seq.scenario.ground_truth = read_ground_truth(root / "gt" / "gt.txt", len);
      DetectionFile dets = read_detections(root / "det" / "det.txt");
      seq.scenario.detections = std::move(dets.frames);
      suite.push_back(std::move(seq));
    }
  } else {
    suite = generate_suite(doc.scenario, args.suite_size);
  }

  const std::vector<GridAxis> axes = parse_grid(args.grid);
  const std::vector<GridCell> cells = expand_grid(doc.tracker, axes);
  spdlog::info("{} grid cells x {} sequences on {} job(s)", cells.size(), suite.size(), args.jobs);
  const AblationTable table = run_ablation(suite, cells, axes, args.jobs);
  const std::string text = format_ablation_table(table);
  std::cout << text;
  if (args.out) {
    write_file_atomically(*args.out, text);
    std::vector<EvalReport> reports;
    for (const AblationRow& r : table.rows) reports.push_back(r.report);
    write_file_atomically(fs::path(*args.out).concat(".kv"), format_report_kv(reports));
  }
  return kOk;
}

// -------------------------------------------------------------------------- overlay

struct OverlayArgs {
  std::string results;
  std::optional<std::string> gt;
  std::string out;
  double width = 1280.0;
  double height = 720.0;
};

int cmd_overlay(const OverlayArgs& args) {
  const std::vector<ResultRow> rows = read_results(args.results);
  std::optional<GroundTruth> gt;
  if (args.gt) gt = read_ground_truth(*args.gt, sequence_length_near(*args.gt));
  const std::vector<OverlayRecord> records = build_overlay(rows, gt ? &*gt : nullptr);
  write_overlay(args.out, records, args.width, args.height);
  spdlog::info("wrote {} overlay records to {}", records.size(), args.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Multi-object tracker with weak-cue association, plus evaluation tools"};
  app.set_version_flag("--version", HYBRIDSORT_VERSION);
  app.require_subcommand(1);

  TrackArgs track;
  auto* track_cmd = app.add_subcommand("track", "track a MOT detection file");
  track_cmd->add_option("--config", track.config, "config file");
  track_cmd->add_option("--manifest", track.manifest, "re-run from a previous run manifest");
  track_cmd->add_option("--dets", track.dets, "MOT detection file");
  track_cmd->add_option("--embeddings", track.embeddings, "embedding sidecar");
  track_cmd->add_option("--out", track.out, "output directory")->required();
  track_cmd->add_option("--seed", track.seed, "seed recorded in the manifest");
  track_cmd->add_option("--frames", track.frames, "sequence length (default: seqinfo.ini or last frame)");
  track.flags.add_to(*track_cmd);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "generate synthetic scenarios");
  sim_cmd->add_option("--config", sim.config, "config file (scenario.* keys)");
  sim_cmd->add_option("--out", sim.out, "output directory")->required();
  sim_cmd->add_option("--seed", sim.seed, "RNG seed");
  sim_cmd->add_option("--objects", sim.objects, "object count");
  sim_cmd->add_option("--frames", sim.frames, "frame count");
  sim_cmd->add_option("--motion", sim.motion, "linear | weave | crossing_pair");
  sim_cmd->add_option("--count", sim.count, "number of sequences (seeds seed..seed+count-1)");

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "score results against ground truth");
  eval_cmd->add_option("--gt", eval.gt, "ground-truth file(s)")->required()->take_all();
  eval_cmd->add_option("--results", eval.results, "result file(s), paired with --gt")
      ->required()
      ->take_all();
  eval_cmd->add_option("--out", eval.out, "key-value report file");
  eval_cmd->add_option("--iou", eval.iou, "match IoU threshold");

  AblateArgs ablate;
  auto* ablate_cmd = app.add_subcommand("ablate", "run a configuration grid over a scenario suite");
  ablate_cmd->add_option("--config", ablate.config, "base config file");
  ablate_cmd->add_option("--grid", ablate.grid, "axes, e.g. \"tcm=on,off;spatial=iou,hmiou\"");
  ablate_cmd->add_option("--sequences", ablate.sequences, "sequence directories (default: simulate)")
      ->take_all();
  ablate_cmd->add_option("--suite-size", ablate.suite_size, "number of simulated sequences");
  ablate_cmd->add_option("--seed", ablate.seed, "first scenario seed");
  ablate_cmd->add_option("--jobs", ablate.jobs, "worker threads");
  ablate_cmd->add_option("--out", ablate.out, "table file (a .kv report is written next to it)");
  ablate.flags.add_to(*ablate_cmd);

  OverlayArgs overlay;
  auto* overlay_cmd = app.add_subcommand("overlay", "export boxes per frame as text or SVG");
  overlay_cmd->add_option("--results", overlay.results, "result file")->required();
  overlay_cmd->add_option("--gt", overlay.gt, "ground-truth file");
  overlay_cmd->add_option("--out", overlay.out, "output path; .svg selects SVG")->required();
  overlay_cmd->add_option("--width", overlay.width, "canvas width");
  overlay_cmd->add_option("--height", overlay.height, "canvas height");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (*track_cmd) return cmd_track(track);
    if (*sim_cmd) return cmd_simulate(sim);
    if (*eval_cmd) return cmd_evaluate(eval);
    if (*ablate_cmd) return cmd_ablate(ablate);
    if (*overlay_cmd) return cmd_overlay(overlay);
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return kBadInput;
  } catch (const NumericalError& e) {
    spdlog::error("numerical failure: {}", e.what());
    return kInternal;
  } catch (const std::logic_error& e) {
    spdlog::error("internal error: {}", e.what());
    return kInternal;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kBadInput;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
  return kFailure;
}
