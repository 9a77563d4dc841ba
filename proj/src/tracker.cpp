#include "hybridsort/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hybridsort/errors.hpp"

namespace hybridsort {

namespace {

template <typename Enum, std::size_t N>
Enum parse_named(std::string_view name, const std::pair<std::string_view, Enum> (&table)[N],
                 std::string_view what) {
  for (const auto& [key, value] : table) {
    if (key == name) return value;
  }
  throw InputError("unknown " + std::string(what) + " '" + std::string(name) + "'");
}

template <typename Enum, std::size_t N>
std::string_view name_of(Enum e, const std::pair<std::string_view, Enum> (&table)[N]) {
  for (const auto& [key, value] : table) {
    if (value == e) return key;
  }
  return "?";
}

constexpr std::pair<std::string_view, Variant> kVariants[] = {
    {"hybrid_sort", Variant::kHybridSort},
    {"sort", Variant::kSort},
    {"byte_two_stage", Variant::kByteTwoStage},
};
constexpr std::pair<std::string_view, SpatialMetric> kMetrics[] = {
    {"iou", SpatialMetric::kIou},
    {"hmiou", SpatialMetric::kHmiou},
    {"wmiou", SpatialMetric::kWmiou},
};
constexpr std::pair<std::string_view, ConfidenceModel> kConfidenceModels[] = {
    {"kalman", ConfidenceModel::kKalman},
    {"linear", ConfidenceModel::kLinear},
};

bool passes_gate(double similarity, double gate) { return similarity > 0.0 && similarity >= gate; }

double stage_confidence(const Track& track, ConfidenceModel model) {
  return model == ConfidenceModel::kKalman ? track.prior.confidence : track.linear_confidence();
}

template <typename CostFn>
AssignmentResult associate(TrackRefs tracks, DetectionRefs dets, double gate, CostFn&& cost) {
  CostMatrix costs(tracks.size(), dets.size());
  for (std::size_t r = 0; r < tracks.size(); ++r) {
    for (std::size_t c = 0; c < dets.size(); ++c) {
      const auto [similarity, total] = cost(*tracks[r], *dets[c]);
      costs(r, c) = total;
      if (!passes_gate(similarity, gate)) {
        costs.gate(r, c);
      }
    }
  }
  return solve(costs);
}

}  // namespace

Variant parse_variant(std::string_view name) { return parse_named(name, kVariants, "tracker"); }
std::string_view to_string(Variant v) { return name_of(v, kVariants); }
SpatialMetric parse_spatial_metric(std::string_view name) {
  return parse_named(name, kMetrics, "spatial metric");
}
std::string_view to_string(SpatialMetric m) { return name_of(m, kMetrics); }
ConfidenceModel parse_confidence_model(std::string_view name) {
  return parse_named(name, kConfidenceModels, "confidence model");
}
std::string_view to_string(ConfidenceModel m) { return name_of(m, kConfidenceModels); }

void TrackerConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw InputError("tracker config: " + msg); };
  for (double w : {lambda_velocity, lambda_confidence_first, lambda_confidence_byte,
                   lambda_appearance}) {
    if (!std::isfinite(w) || w < 0.0) fail("weights must be finite and >= 0");
  }
  if (!(low_threshold >= 0.0 && low_threshold < high_threshold && high_threshold <= 1.0)) {
    fail("thresholds must satisfy 0 <= low < high <= 1");
  }
  if (!(gate >= 0.0 && gate <= 1.0)) fail("gate must lie in [0, 1]");
  if (min_hits < 1) fail("min_hits must be >= 1");
  if (max_age < 0) fail("max_age must be >= 0");
  if (!(ema_momentum >= 0.0 && ema_momentum <= 1.0)) fail("ema_momentum must lie in [0, 1]");
  noise.validate();
}

void TrackerConfig::set_toggle(std::string_view name, bool on) {
  if (name == "tcm") {
    tcm = on;
  } else if (name == "hmiou") {
    spatial = on ? SpatialMetric::kHmiou : SpatialMetric::kIou;
  } else if (name == "wmiou") {
    spatial = on ? SpatialMetric::kWmiou : SpatialMetric::kIou;
  } else if (name == "rocm") {
    rocm = on;
  } else if (name == "appearance") {
    appearance = on;
  } else if (name == "byte") {
    byte_stage = on;
  } else if (name == "ocr") {
    ocr_stage = on;
  } else {
    throw InputError("unknown toggle '" + std::string(name) + "'");
  }
}

bool TrackerConfig::uses_byte_stage() const { return variant != Variant::kSort && byte_stage; }
bool TrackerConfig::uses_ocr_stage() const { return variant == Variant::kHybridSort && ocr_stage; }
bool TrackerConfig::uses_rocm() const { return variant == Variant::kHybridSort && rocm; }
bool TrackerConfig::uses_appearance() const {
  return variant == Variant::kHybridSort && appearance;
}

TrackerConfig make_baseline_config(Variant variant) {
  TrackerConfig cfg;
  cfg.variant = variant;
  if (variant != Variant::kHybridSort) {
    cfg.tcm = false;
    cfg.rocm = false;
    cfg.appearance = false;
    cfg.ocr_stage = false;
    cfg.byte_stage = variant == Variant::kByteTwoStage;
    cfg.spatial = SpatialMetric::kIou;
  }
  return cfg;
}

TrackStatus Track::status(int min_hits) const {
  if (time_since_update > 0) return TrackStatus::kLost;
  return hits >= min_hits ? TrackStatus::kConfirmed : TrackStatus::kTentative;
}

double Track::linear_confidence() const {
  if (confidences.empty()) {
    return prior.confidence;
  }
  if (confidences.size() == 1) {
    return linear_confidence_prediction(confidences.back(), std::nullopt);
  }
  return linear_confidence_prediction(confidences.back(), confidences.front());
}

double spatial_similarity(SpatialMetric metric, const Box& a, const Box& b) {
  switch (metric) {
    case SpatialMetric::kIou:
      return iou(a, b);
    case SpatialMetric::kHmiou:
      return hmiou(a, b);
    case SpatialMetric::kWmiou:
      return wmiou(a, b);
  }
  return 0.0;
}

Embedding update_ema_embedding(const std::optional<Embedding>& track, std::span<const double> det,
                               double momentum) {
  Embedding out(det.begin(), det.end());
  if (track) {
    if (track->size() != det.size()) {
      throw InputError("embedding dimension mismatch: track " + std::to_string(track->size()) +
                       ", detection " + std::to_string(det.size()));
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = momentum * (*track)[i] + (1.0 - momentum) * det[i];
    }
  }
  double norm = 0.0;
  for (double x : out) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : out) x /= norm;
  }
  return out;
}

CostBreakdown first_stage_cost(const Track& track, const Detection& det, const TrackerConfig& cfg,
                               std::uint64_t* zero_norm_count) {
  CostBreakdown b;
  b.spatial = spatial_similarity(cfg.spatial, track.prior.box, det.box);
  b.total = -b.spatial;
  if (cfg.uses_rocm()) {
    b.velocity = rocm_cost(track.observations, det.box);
    b.total += cfg.lambda_velocity * b.velocity;
  }
  if (cfg.tcm) {
    b.confidence =
        confidence_cost(stage_confidence(track, cfg.first_stage_confidence), det.confidence);
    b.total += cfg.lambda_confidence_first * b.confidence;
  }
  if (cfg.uses_appearance() && track.ema_embedding && det.embedding) {
    b.appearance = cosine_appearance_cost(*track.ema_embedding, *det.embedding, zero_norm_count);
    b.total += cfg.lambda_appearance * *b.appearance;
  }
  return b;
}

CostBreakdown byte_stage_cost(const Track& track, const Detection& det, const TrackerConfig& cfg) {
  CostBreakdown b;
  b.spatial = spatial_similarity(cfg.spatial, track.prior.box, det.box);
  b.total = -b.spatial;
  if (cfg.tcm) {
    b.confidence =
        confidence_cost(stage_confidence(track, cfg.byte_stage_confidence), det.confidence);
    b.total += cfg.lambda_confidence_byte * b.confidence;
  }
  return b;
}

AssignmentResult stage1_associate(TrackRefs tracks, DetectionRefs dets, const TrackerConfig& cfg,
                                  std::uint64_t* zero_norm_count) {
  return associate(tracks, dets, cfg.gate, [&](const Track& t, const Detection& d) {
    const CostBreakdown b = first_stage_cost(t, d, cfg, zero_norm_count);
    return std::pair{b.spatial, b.total};
  });
}

AssignmentResult stage2_byte(TrackRefs tracks, DetectionRefs dets, const TrackerConfig& cfg) {
  return associate(tracks, dets, cfg.gate, [&](const Track& t, const Detection& d) {
    const CostBreakdown b = byte_stage_cost(t, d, cfg);
    return std::pair{b.spatial, b.total};
  });
}

AssignmentResult stage3_ocr(TrackRefs tracks, DetectionRefs dets, const TrackerConfig& cfg) {
  return associate(tracks, dets, cfg.gate, [](const Track& t, const Detection& d) {
    const double similarity = iou(t.last_observation.box, d.box);
    return std::pair{similarity, -similarity};
  });
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

void Tracker::validate_embeddings(int frame, std::span<const Detection> detections) {
  if (!cfg_.uses_appearance()) return;
  for (const Detection& d : detections) {
    if (!d.embedding) continue;
    if (!embedding_dim_) {
      embedding_dim_ = d.embedding->size();
    } else if (d.embedding->size() != *embedding_dim_) {
      throw InputError("frame " + std::to_string(frame) + ", detection " +
                       std::to_string(d.source_index) + ": embedding dimension " +
                       std::to_string(d.embedding->size()) + " differs from " +
                       std::to_string(*embedding_dim_));
    }
  }
}

void Tracker::apply_match(Track& track, const Detection& det, int frame) {
  try {
    track.kalman = update(track.kalman, Measurement::from_box(det.box, det.confidence), cfg_.noise);
  } catch (const NumericalError& e) {
    throw NumericalError("frame " + std::to_string(frame) + ", track " + std::to_string(track.id) +
                         ": " + e.what());
  }
  track.observations.push_back({frame, det.box});
  if (track.observations.size() > kObservationHistory) {
    track.observations.erase(track.observations.begin());
  }
  track.confidences.push_back(det.confidence);
  while (track.confidences.size() > 2) track.confidences.pop_front();
  if (cfg_.uses_appearance() && det.embedding) {
    track.ema_embedding = update_ema_embedding(track.ema_embedding, *det.embedding,
                                               cfg_.ema_momentum);
  }
  track.last_observation = {frame, det.box};
  track.time_since_update = 0;
  track.hits += 1;
}

std::vector<TrackedObject> Tracker::step(int frame, std::span<const Detection> detections) {
  if (last_frame_ && frame != *last_frame_ + 1) {
    throw InputError("frame " + std::to_string(frame) + " does not follow frame " +
                     std::to_string(*last_frame_));
  }
  for (const Detection& d : detections) {
    if (!d.box.is_valid() || !std::isfinite(d.confidence)) {
      throw InputError("frame " + std::to_string(frame) + ", detection " +
                       std::to_string(d.source_index) + " is not a valid box");
    }
  }
  validate_embeddings(frame, detections);
  last_frame_ = frame;
  report_ = {};

  for (Track& t : tracks_) {
    t.kalman = predict(t.kalman, cfg_.noise);
    t.prior = state_to_box(t.kalman);
    if (t.time_since_update > 0) t.hits = 0;
    t.time_since_update += 1;
  }

  std::vector<const Detection*> high;
  std::vector<const Detection*> low;
  for (const Detection& d : detections) {
    if (d.confidence >= cfg_.high_threshold) {
      high.push_back(&d);
    } else if (d.confidence >= cfg_.low_threshold) {
      low.push_back(&d);
    }
  }

  std::vector<Track*> pending;
  pending.reserve(tracks_.size());
  for (Track& t : tracks_) pending.push_back(&t);

  const auto run_stage = [&](auto&& stage_fn, std::vector<const Detection*>& dets,
                             std::vector<std::pair<int, std::size_t>>& log) {
    if (pending.empty() || dets.empty()) return;
    const std::vector<const Track*> view(pending.begin(), pending.end());
    const AssignmentResult res = stage_fn(view, dets);
    for (const Match& m : res.matches) {
      apply_match(*pending[m.row], *dets[m.col], frame);
      log.emplace_back(pending[m.row]->id, dets[m.col]->source_index);
    }
    std::vector<Track*> rest_tracks;
    for (std::size_t r : res.unmatched_rows) rest_tracks.push_back(pending[r]);
    std::vector<const Detection*> rest_dets;
    for (std::size_t c : res.unmatched_cols) rest_dets.push_back(dets[c]);
    pending = std::move(rest_tracks);
    dets = std::move(rest_dets);
  };

  run_stage(
      [&](TrackRefs t, DetectionRefs d) {
        return stage1_associate(t, d, cfg_, &zero_norm_embeddings_);
      },
      high, report_.first_stage);
  if (cfg_.uses_byte_stage()) {
    run_stage([&](TrackRefs t, DetectionRefs d) { return stage2_byte(t, d, cfg_); }, low,
              report_.byte_stage);
  }
  if (cfg_.uses_ocr_stage()) {
    run_stage([&](TrackRefs t, DetectionRefs d) { return stage3_ocr(t, d, cfg_); }, high,
              report_.ocr_stage);
  }

  for (const Detection* d : high) {
    if (d->box.width() <= 0.0 || d->box.height() <= 0.0) continue;
    Track t;
    t.id = next_id_++;
    t.kalman = init_from_detection(d->box, d->confidence, cfg_.noise);
    t.prior = state_to_box(t.kalman);
    t.observations.push_back({frame, d->box});
    t.confidences.push_back(d->confidence);
    if (cfg_.uses_appearance() && d->embedding) {
      t.ema_embedding = update_ema_embedding(std::nullopt, *d->embedding, cfg_.ema_momentum);
    }
    t.last_observation = {frame, d->box};
    t.hits = 1;
    report_.spawned.push_back(t.id);
    tracks_.push_back(std::move(t));
  }

  std::vector<TrackedObject> out;
  for (const Track& t : tracks_) {
    if (t.time_since_update == 0 && t.hits >= cfg_.min_hits) {
      const BoxEstimate est = state_to_box(t.kalman);
      out.push_back({t.id, est.box, t.confidences.back()});
    }
  }
  std::erase_if(tracks_, [&](const Track& t) {
    if (t.time_since_update > cfg_.max_age) {
      report_.retired.push_back(t.id);
      return true;
    }
    return false;
  });
  std::sort(out.begin(), out.end(),
            [](const TrackedObject& a, const TrackedObject& b) { return a.id < b.id; });
  return out;
}

Tracker make_baseline(Variant variant) { return Tracker(make_baseline_config(variant)); }

}  // namespace hybridsort
