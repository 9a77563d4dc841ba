#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hybridsort/assignment.hpp"
#include "hybridsort/geometry.hpp"
#include "hybridsort/kalman.hpp"
#include "hybridsort/types.hpp"

namespace hybridsort {

/// Stage layout of a tracker instance.
///  - hybrid_sort: first stage with fused cost, BYTE stage, OCR recovery.
///  - sort: first stage only, plain IoU by default.
///  - byte_two_stage: first stage + BYTE stage, plain IoU by default.
/// The sort-family baselines still honour the TCM and spatial-metric settings.
enum class Variant { kHybridSort, kSort, kByteTwoStage };

/// Spatial similarity used in the first and BYTE stages.
enum class SpatialMetric { kIou, kHmiou, kWmiou };

/// How the tracklet confidence is estimated for a stage's confidence cost.
enum class ConfidenceModel { kKalman, kLinear };

[[nodiscard]] Variant parse_variant(std::string_view name);
[[nodiscard]] std::string_view to_string(Variant v);
[[nodiscard]] SpatialMetric parse_spatial_metric(std::string_view name);
[[nodiscard]] std::string_view to_string(SpatialMetric m);
[[nodiscard]] ConfidenceModel parse_confidence_model(std::string_view name);
[[nodiscard]] std::string_view to_string(ConfidenceModel m);

struct TrackerConfig {
  Variant variant = Variant::kHybridSort;

  double lambda_velocity = 0.2;
  double lambda_confidence_first = 1.5;
  double lambda_confidence_byte = 1.0;
  double lambda_appearance = 1.0;

  double high_threshold = 0.6;
  double low_threshold = 0.1;
  double gate = 0.15;

  int min_hits = 3;
  int max_age = 30;
  double ema_momentum = 0.9;

  NoiseConfig noise;

  bool tcm = true;
  bool rocm = true;
  bool appearance = false;
  bool byte_stage = true;
  bool ocr_stage = true;
  SpatialMetric spatial = SpatialMetric::kHmiou;
  ConfidenceModel first_stage_confidence = ConfidenceModel::kKalman;
  ConfidenceModel byte_stage_confidence = ConfidenceModel::kLinear;

  /// Throws InputError on unordered thresholds, negative weights, etc.
  void validate() const;

  /// Sets a named feature toggle: tcm, hmiou, wmiou, rocm, appearance, byte, ocr.
  /// `hmiou`/`wmiou` select the spatial metric when on and fall back to plain IoU when off.
  void set_toggle(std::string_view name, bool on);

  [[nodiscard]] bool uses_byte_stage() const;
  [[nodiscard]] bool uses_ocr_stage() const;
  [[nodiscard]] bool uses_rocm() const;
  [[nodiscard]] bool uses_appearance() const;

  friend bool operator==(const TrackerConfig&, const TrackerConfig&) = default;
};

/// Default configuration of a tracker family member.
[[nodiscard]] TrackerConfig make_baseline_config(Variant variant);

enum class TrackStatus { kTentative, kConfirmed, kLost };

inline constexpr std::size_t kObservationHistory = 5;

struct Track {
  int id = 0;
  KalmanState kalman;
  BoxEstimate prior;                     // prediction for the current frame
  std::vector<Observation> observations;  // newest last, at most kObservationHistory
  std::deque<double> confidences;        // newest last, at most 2
  std::optional<Embedding> ema_embedding;
  int hits = 0;  // consecutive matched frames
  int time_since_update = 0;
  Observation last_observation;

  [[nodiscard]] TrackStatus status(int min_hits) const;
  /// Confidence predicted by linear extrapolation of the stored confidences.
  [[nodiscard]] double linear_confidence() const;
};

/// Per-pair cost terms. `total` is -spatial + l1*velocity + l2*confidence + l3*appearance
/// restricted to the terms the stage uses.
struct CostBreakdown {
  double spatial = 0.0;  // similarity, enters negated
  double velocity = 0.0;
  double confidence = 0.0;
  std::optional<double> appearance;
  double total = 0.0;
};

[[nodiscard]] double spatial_similarity(SpatialMetric metric, const Box& a, const Box& b);

/// EMA of appearance features, L2-normalised. Throws InputError on dimension mismatch.
[[nodiscard]] Embedding update_ema_embedding(const std::optional<Embedding>& track,
                                             std::span<const double> det, double momentum);

using TrackRefs = std::span<const Track* const>;
using DetectionRefs = std::span<const Detection* const>;

[[nodiscard]] CostBreakdown first_stage_cost(const Track& track, const Detection& det,
                                             const TrackerConfig& cfg,
                                             std::uint64_t* zero_norm_count = nullptr);
[[nodiscard]] CostBreakdown byte_stage_cost(const Track& track, const Detection& det,
                                            const TrackerConfig& cfg);

/// First association over predicted tracks and high-confidence detections.
[[nodiscard]] AssignmentResult stage1_associate(TrackRefs tracks, DetectionRefs dets,
                                                const TrackerConfig& cfg,
                                                std::uint64_t* zero_norm_count = nullptr);
/// BYTE association of first-stage leftovers with low-confidence detections.
[[nodiscard]] AssignmentResult stage2_byte(TrackRefs tracks, DetectionRefs dets,
                                           const TrackerConfig& cfg);
/// Recovery of still-unmatched tracks by plain IoU against their last observed box.
[[nodiscard]] AssignmentResult stage3_ocr(TrackRefs tracks, DetectionRefs dets,
                                          const TrackerConfig& cfg);

/// Matches made in the last call to Tracker::step, as (track id, source index) pairs.
struct StepReport {
  std::vector<std::pair<int, std::size_t>> first_stage;
  std::vector<std::pair<int, std::size_t>> byte_stage;
  std::vector<std::pair<int, std::size_t>> ocr_stage;
  std::vector<int> spawned;
  std::vector<int> retired;
};

class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg);

  /// Advances one frame. Frames must increase by exactly one between calls.
  /// Returns confirmed tracks matched in this frame, sorted by id.
  std::vector<TrackedObject> step(int frame, std::span<const Detection> detections);

  [[nodiscard]] const TrackerConfig& config() const { return cfg_; }
  [[nodiscard]] const std::vector<Track>& tracks() const { return tracks_; }
  [[nodiscard]] const StepReport& last_report() const { return report_; }
  [[nodiscard]] std::uint64_t zero_norm_embeddings() const { return zero_norm_embeddings_; }

 private:
  void validate_embeddings(int frame, std::span<const Detection> detections);
  void apply_match(Track& track, const Detection& det, int frame);

  TrackerConfig cfg_;
  std::vector<Track> tracks_;
  std::optional<int> last_frame_;
  std::optional<std::size_t> embedding_dim_;
  int next_id_ = 1;
  std::uint64_t zero_norm_embeddings_ = 0;
  StepReport report_;
};

[[nodiscard]] Tracker make_baseline(Variant variant);

}  // namespace hybridsort
