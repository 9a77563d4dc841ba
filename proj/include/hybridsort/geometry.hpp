#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hybridsort {

struct Point {
  double u = 0.0;
  double v = 0.0;
};

/// Four corners of a box: left-top, right-top, left-bottom, right-bottom.
struct CornerSet {
  Point lt, rt, lb, rb;

  [[nodiscard]] std::array<Point, 4> as_array() const { return {lt, rt, lb, rb}; }
};

/// Axis-aligned box in pixel coordinates, (x1, y1) top-left and (x2, y2) bottom-right.
struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  static Box from_tlwh(double left, double top, double width, double height) {
    return {left, top, left + width, top + height};
  }

  [[nodiscard]] double width() const { return x2 - x1; }
  [[nodiscard]] double height() const { return y2 - y1; }
  [[nodiscard]] double area() const { return width() * height(); }
  [[nodiscard]] Point center() const { return {(x1 + x2) / 2.0, (y1 + y2) / 2.0}; }
  [[nodiscard]] CornerSet corners() const {
    return {{x1, y1}, {x2, y1}, {x1, y2}, {x2, y2}};
  }
  /// Finite coordinates with x2 >= x1 and y2 >= y1. Zero-area boxes are valid.
  [[nodiscard]] bool is_valid() const;
  [[nodiscard]] Box translated(double du, double dv) const {
    return {x1 + du, y1 + dv, x2 + du, y2 + dv};
  }

  friend bool operator==(const Box&, const Box&) = default;
};

/// A box observed (not predicted) at a given frame.
struct Observation {
  int frame = 0;
  Box box;
};

// Similarity cues. All are symmetric, lie in [0, 1] and return 0 for degenerate input.
[[nodiscard]] double iou(const Box& a, const Box& b);
/// IoU of the vertical extents only; negative overlap is clamped to 0.
[[nodiscard]] double hiou(const Box& a, const Box& b);
/// IoU of the horizontal extents only; negative overlap is clamped to 0.
[[nodiscard]] double width_iou(const Box& a, const Box& b);
/// Height-modulated IoU: hiou * iou.
[[nodiscard]] double hmiou(const Box& a, const Box& b);
/// Width-modulated IoU: width_iou * iou. Only used to compare against hmiou.
[[nodiscard]] double wmiou(const Box& a, const Box& b);

/// |c_hat - c_det|.
[[nodiscard]] double confidence_cost(double c_hat, double c_det);

/// Extrapolates the next tracklet confidence from the last two observed values,
/// clamped to [0, 1]. With a single stored value the prediction is that value.
[[nodiscard]] double linear_confidence_prediction(double c_prev, std::optional<double> c_prev2);

/// Direction of travel from `from` to `to` in (-pi, pi], image axes (v points down).
/// Coincident points have no direction and yield std::nullopt.
[[nodiscard]] std::optional<double> velocity_direction(const Point& from, const Point& to);

/// Shortest-arc absolute difference between two angles, in [0, pi].
[[nodiscard]] double angle_difference(double theta_a, double theta_b);

/// Corner-based velocity-direction consistency between a tracklet's observation
/// history (oldest first, newest last) and a candidate detection box.
///
/// For each interval dt in {1, 2, 3} with an observation at `last.frame - dt`, the
/// tracklet direction of every corner runs from that observation to the last one,
/// and the tracklet-to-detection direction runs from the last observation to the
/// detection. The per-interval cost is the mean angle difference over the four
/// corners; undefined directions contribute 0. The result is the sum over available
/// intervals, so a history with a single observation costs 0.
[[nodiscard]] double rocm_cost(std::span<const Observation> history, const Box& det);

inline constexpr int kRocmMaxInterval = 3;

/// Cosine distance 1 - cos(a, b), in [0, 2]. A zero-norm input yields the neutral
/// cost 1 and increments `zero_norm_count` when it is provided.
[[nodiscard]] double cosine_appearance_cost(std::span<const double> a, std::span<const double> b,
                                            std::uint64_t* zero_norm_count = nullptr);

}  // namespace hybridsort
