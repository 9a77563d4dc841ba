#include "hybridsort/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "hybridsort/errors.hpp"
#include "hybridsort/io_mot.hpp"

namespace hybridsort {

namespace {

constexpr std::pair<std::string_view, MotionModel> kMotionModels[] = {
    {"linear", MotionModel::kLinear},
    {"weave", MotionModel::kWeave},
    {"crossing_pair", MotionModel::kCrossingPair},
};

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Folds x into [lo, hi] as if reflected at both ends.
double reflect(double x, double lo, double hi) {
  const double span = hi - lo;
  if (span <= 0.0) return lo;
  double t = std::fmod(x - lo, 2.0 * span);
  if (t < 0.0) t += 2.0 * span;
  return t <= span ? lo + t : lo + 2.0 * span - t;
}

// Kinematics of one object; evaluated per frame into (center x, bottom y).
struct Trajectory {
  MotionModel model = MotionModel::kLinear;
  double x0 = 0.0, y0 = 0.0;    // position at t = 0 (crossing: at t = t_cross)
  double vx = 0.0, vy = 0.0;    // px/frame
  double amplitude = 0.0;       // weave amplitude, px
  double period = 1.0;          // weave period, frames
  double phase = 0.0;
  double t_cross = 0.0;
  double height = 0.0;
  double width_period = 1.0;
  double width_phase = 0.0;
  double aspect = 0.0;
};

struct Extent {
  double width;
  double height;
};

Point position_at(const Trajectory& tr, double t, const Extent& ext) {
  switch (tr.model) {
    case MotionModel::kLinear: {
      return {reflect(tr.x0 + tr.vx * t, 0.0, ext.width),
              reflect(tr.y0 + tr.vy * t, tr.height, ext.height)};
    }
    case MotionModel::kWeave: {
      const double base_x = reflect(tr.x0 + tr.vx * t, 0.0, ext.width);
      const double base_y = reflect(tr.y0 + tr.vy * t, tr.height, ext.height);
      const double speed = std::hypot(tr.vx, tr.vy);
      const double nx = speed > 0.0 ? -tr.vy / speed : 0.0;
      const double ny = speed > 0.0 ? tr.vx / speed : 1.0;
      const double off = tr.amplitude * std::sin(kTwoPi * t / tr.period + tr.phase);
      return {base_x + nx * off, base_y + ny * off};
    }
    case MotionModel::kCrossingPair: {
      const double dt = t - tr.t_cross;
      const double off = tr.amplitude * std::sin(kTwoPi * dt / tr.period) * tr.phase;
      return {tr.x0 + tr.vx * dt + off, tr.y0};
    }
  }
  return {};
}

// Bottom edge of an object as a function of its height: nearer objects stand lower.
double ground_line(double base_y, double height, double mean_height) {
  return base_y + 0.3 * (height - mean_height);
}

double union_area(std::span<const Box> rects) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const Box& r : rects) {
    xs.push_back(r.x1);
    xs.push_back(r.x2);
    ys.push_back(r.y1);
    ys.push_back(r.y2);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      const double cx = 0.5 * (xs[i] + xs[i + 1]);
      const double cy = 0.5 * (ys[j] + ys[j + 1]);
      const bool covered = std::any_of(rects.begin(), rects.end(), [&](const Box& r) {
        return cx > r.x1 && cx < r.x2 && cy > r.y1 && cy < r.y2;
      });
      if (covered) area += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
    }
  }
  return area;
}

Box clamp_to(const Box& b, const Extent& ext) {
  return {std::clamp(b.x1, 0.0, ext.width), std::clamp(b.y1, 0.0, ext.height),
          std::clamp(b.x2, 0.0, ext.width), std::clamp(b.y2, 0.0, ext.height)};
}

std::vector<Trajectory> draw_trajectories(const ScenarioSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  const Extent ext{spec.image_width, spec.image_height};
  const double mean_h = 0.5 * (spec.min_height + spec.max_height);
  const double frames = static_cast<double>(spec.frame_count);

  std::vector<Trajectory> out(static_cast<std::size_t>(spec.object_count));
  const auto model_of = [&](std::size_t k) {
    return k < spec.motion_overrides.size() ? spec.motion_overrides[k] : spec.motion;
  };

  const auto draw_common = [&](Trajectory& tr, MotionModel model) {
    tr.model = model;
    tr.height = uniform(spec.min_height, spec.max_height);
    tr.width_period = spec.width_period * uniform(0.5, 1.5);
    tr.width_phase = uniform(0.0, kTwoPi);
    tr.period = spec.weave_period * uniform(0.75, 1.25);
    tr.amplitude = spec.weave_amplitude * uniform(0.5, 1.0);
    tr.aspect = spec.aspect * uniform(1.0 - spec.aspect_spread, 1.0 + spec.aspect_spread);
  };

  std::size_t k = 0;
  while (k < out.size()) {
    const bool pair = model_of(k) == MotionModel::kCrossingPair && k + 1 < out.size() &&
                      model_of(k + 1) == MotionModel::kCrossingPair;
    if (pair) {
      // Two objects walking towards each other; both centres meet at (x_cross, t_cross).
      const double t_cross = frames * uniform(0.35, 0.65);
      const double x_cross = ext.width * uniform(0.3, 0.7);
      const double base_y = ext.height * uniform(0.55, 0.85);
      for (std::size_t j = 0; j < 2; ++j) {
        Trajectory& tr = out[k + j];
        draw_common(tr, MotionModel::kCrossingPair);
        tr.t_cross = t_cross;
        tr.x0 = x_cross;
        tr.vx = (j == 0 ? 1.0 : -1.0) * spec.speed * uniform(0.7, 1.3);
        tr.amplitude *= 0.25;
        tr.phase = unit(rng) < 0.5 ? -1.0 : 1.0;
        tr.y0 = ground_line(base_y, tr.height, mean_h);
      }
      k += 2;
      continue;
    }
    Trajectory& tr = out[k];
    const MotionModel m = model_of(k) == MotionModel::kCrossingPair ? MotionModel::kLinear
                                                                   : model_of(k);
    draw_common(tr, m);
    tr.x0 = uniform(0.1, 0.9) * ext.width;
    tr.y0 = uniform(tr.height + 0.05 * ext.height, ext.height);
    const double heading = uniform(0.0, kTwoPi);
    const double speed = spec.speed * uniform(0.7, 1.3);
    tr.vx = speed * std::cos(heading);
    tr.vy = 0.3 * speed * std::sin(heading);
    tr.phase = uniform(0.0, kTwoPi);
    ++k;
  }
  return out;
}

}  // namespace

MotionModel parse_motion_model(std::string_view name) {
  for (const auto& [key, value] : kMotionModels) {
    if (key == name) return value;
  }
  throw InputError("unknown motion model '" + std::string(name) + "'");
}

std::string_view to_string(MotionModel m) {
  for (const auto& [key, value] : kMotionModels) {
    if (value == m) return key;
  }
  return "?";
}

void ScenarioSpec::validate() const {
  const auto fail = [](const std::string& msg) { throw InputError("scenario: " + msg); };
  if (object_count < 0) fail("object_count must be >= 0");
  if (frame_count < 1) fail("frame_count must be >= 1");
  if (!motion_overrides.empty() &&
      motion_overrides.size() != static_cast<std::size_t>(object_count)) {
    fail("motion_overrides must list one model per object");
  }
  if (!(image_width > 0.0 && image_height > 0.0)) fail("image extent must be positive");
  if (!(occlusion_iou > 0.0 && occlusion_iou < 1.0)) fail("occlusion_iou must lie in (0, 1)");
  if (!(min_height > 0.0 && min_height <= max_height && max_height < image_height)) {
    fail("heights must satisfy 0 < min_height <= max_height < image_height");
  }
  if (!(aspect > 0.0)) fail("aspect must be positive");
  if (!(width_variation >= 0.0 && width_variation < 1.0)) fail("width_variation in [0, 1)");
  if (!(aspect_spread >= 0.0 && aspect_spread < 1.0)) fail("aspect_spread in [0, 1)");
  if (!(width_period >= 2.0 && std::isfinite(width_period))) fail("width_period must be >= 2");
  if (!(weave_period > 0.0)) fail("weave_period must be positive");
  if (!(dropout_probability >= 0.0 && dropout_probability <= 1.0)) {
    fail("dropout_probability must lie in [0, 1]");
  }
  if (!(base_confidence >= 0.0 && base_confidence <= 1.0)) fail("base_confidence in [0, 1]");
  for (double x :
       {speed, weave_amplitude, confidence_slope, confidence_noise, jitter_std, limb_extent}) {
    if (!(std::isfinite(x) && x >= 0.0)) fail("rates and noise levels must be finite and >= 0");
  }
}

bool is_nearer(const GtObject& a, const GtObject& b) {
  if (a.box.height() != b.box.height()) return a.box.height() > b.box.height();
  if (a.box.y2 != b.box.y2) return a.box.y2 > b.box.y2;
  return a.id < b.id;
}

double visible_fraction(const Box& target, std::span<const Box> occluders) {
  const double area = target.area();
  if (area <= 0.0) return 0.0;
  std::vector<Box> clipped;
  for (const Box& o : occluders) {
    const Box c{std::max(target.x1, o.x1), std::max(target.y1, o.y1), std::min(target.x2, o.x2),
                std::min(target.y2, o.y2)};
    if (c.x2 > c.x1 && c.y2 > c.y1) clipped.push_back(c);
  }
  if (clipped.empty()) return 1.0;
  return std::clamp(1.0 - union_area(clipped) / area, 0.0, 1.0);
}

Scenario generate(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const Extent ext{spec.image_width, spec.image_height};
  const std::vector<Trajectory> trajectories = draw_trajectories(spec, rng);

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Scenario out;
  out.ground_truth.first_frame = 1;
  out.ground_truth.frames.resize(static_cast<std::size_t>(spec.frame_count));
  out.detections.resize(static_cast<std::size_t>(spec.frame_count));

  for (int frame = 1; frame <= spec.frame_count; ++frame) {
    const double t = static_cast<double>(frame - 1);
    auto& gt_objects = out.ground_truth.frames[static_cast<std::size_t>(frame - 1)];
    for (std::size_t k = 0; k < trajectories.size(); ++k) {
      const Trajectory& tr = trajectories[k];
      const Point p = position_at(tr, t, ext);
      const double h = tr.height;
      const double w = tr.aspect * h *
                       (1.0 + spec.width_variation *
                                  std::sin(kTwoPi * t / tr.width_period + tr.width_phase));
      const Box b = clamp_to(Box{p.u - w / 2.0, p.v - h, p.u + w / 2.0, p.v}, ext);
      if (b.width() <= 0.0 || b.height() <= 0.0) continue;
      gt_objects.push_back({static_cast<int>(k) + 1, b, 1.0});
    }

    FrameDetections& fd = out.detections[static_cast<std::size_t>(frame - 1)];
    fd.frame = frame;
    for (GtObject& g : gt_objects) {
      std::vector<Box> occluders;
      bool occluded = false;
      for (const GtObject& other : gt_objects) {
        if (other.id == g.id || !is_nearer(other, g)) continue;
        occluders.push_back(other.box);
        if (iou(other.box, g.box) > spec.occlusion_iou) occluded = true;
      }
      g.visibility = visible_fraction(g.box, occluders);

      // Fixed number of draws per object and frame keeps streams aligned across branches.
      const double conf_noise = normal(rng);
      const double drop_draw = unit(rng);
      std::array<double, 4> jitter{};
      for (double& j : jitter) j = normal(rng) * spec.jitter_std;
      const double limb_left = std::abs(normal(rng)) * spec.limb_extent * g.box.width();
      const double limb_right = std::abs(normal(rng)) * spec.limb_extent * g.box.width();

      double conf = 0.0;
      if (occluded) {
        conf = spec.base_confidence * (1.0 - spec.confidence_slope * (1.0 - g.visibility));
      } else {
        conf = spec.base_confidence + spec.confidence_noise * conf_noise;
      }
      conf = std::clamp(conf, 0.0, 1.0);
      if (occluded && drop_draw < spec.dropout_probability) continue;

      Box d{g.box.x1 - limb_left + jitter[0], g.box.y1 + jitter[1], g.box.x2 + limb_right + jitter[2],
            g.box.y2 + jitter[3]};
      if (d.x2 < d.x1) std::swap(d.x1, d.x2);
      if (d.y2 < d.y1) std::swap(d.y1, d.y2);
      d = clamp_to(d, ext);
      if (d.width() <= 0.0 || d.height() <= 0.0) continue;
      Detection det;
      det.box = d;
      det.confidence = conf;
      det.source_index = fd.detections.size();
      fd.detections.push_back(std::move(det));
    }
  }
  return out;
}

void export_scenario(const Scenario& scenario, const ScenarioSpec& spec,
                     const std::filesystem::path& dir, std::string_view name) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "gt", ec);
  std::filesystem::create_directories(dir / "det", ec);
  if (ec) throw InputError("cannot create '" + dir.string() + "': " + ec.message());
  write_ground_truth(dir / "gt" / "gt.txt", scenario.ground_truth);
  write_detections(dir / "det" / "det.txt", scenario.detections);
  write_seqinfo(dir / "seqinfo.ini", name, spec.frame_count, spec.image_width, spec.image_height);
}

}  // namespace hybridsort
