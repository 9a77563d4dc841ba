#include "hybridsort/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hybridsort/errors.hpp"

namespace hybridsort {

namespace {

// Overlap of [lo1, hi1] and [lo2, hi2] over their joint extent, clamped below at 0.
double interval_iou(double lo1, double hi1, double lo2, double hi2) {
  const double overlap = std::min(hi1, hi2) - std::max(lo1, lo2);
  const double extent = std::max(hi1, hi2) - std::min(lo1, lo2);
  if (extent <= 0.0 || overlap <= 0.0) {
    return 0.0;
  }
  return overlap / extent;
}

}  // namespace

bool Box::is_valid() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) &&
         x2 >= x1 && y2 >= y1;
}

double iou(const Box& a, const Box& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) {
    return 0.0;
  }
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) {
    return 0.0;
  }
  return std::clamp(inter / uni, 0.0, 1.0);
}

double hiou(const Box& a, const Box& b) { return interval_iou(a.y1, a.y2, b.y1, b.y2); }

double width_iou(const Box& a, const Box& b) { return interval_iou(a.x1, a.x2, b.x1, b.x2); }

double hmiou(const Box& a, const Box& b) { return hiou(a, b) * iou(a, b); }

double wmiou(const Box& a, const Box& b) { return width_iou(a, b) * iou(a, b); }

double confidence_cost(double c_hat, double c_det) { return std::abs(c_hat - c_det); }

double linear_confidence_prediction(double c_prev, std::optional<double> c_prev2) {
  if (!c_prev2) {
    return std::clamp(c_prev, 0.0, 1.0);
  }
  return std::clamp(c_prev - (*c_prev2 - c_prev), 0.0, 1.0);
}

std::optional<double> velocity_direction(const Point& from, const Point& to) {
  const double du = to.u - from.u;
  const double dv = to.v - from.v;
  if (du == 0.0 && dv == 0.0) {
    return std::nullopt;
  }
  return std::atan2(dv, du);
}

double angle_difference(double theta_a, double theta_b) {
  // remainder() maps onto [-pi, pi] exactly for the reduction step.
  const double d = std::abs(std::remainder(theta_a - theta_b, 2.0 * std::numbers::pi));
  return std::min(d, std::numbers::pi);
}

double rocm_cost(std::span<const Observation> history, const Box& det) {
  if (history.size() < 2) {
    return 0.0;
  }
  const Observation& last = history.back();
  const auto last_corners = last.box.corners().as_array();
  const auto det_corners = det.corners().as_array();

  std::array<std::optional<double>, 4> det_dirs;
  for (std::size_t k = 0; k < 4; ++k) {
    det_dirs[k] = velocity_direction(last_corners[k], det_corners[k]);
  }

  double total = 0.0;
  for (int dt = 1; dt <= kRocmMaxInterval; ++dt) {
    const int wanted = last.frame - dt;
    const auto it = std::find_if(history.rbegin() + 1, history.rend(),
                                 [wanted](const Observation& o) { return o.frame == wanted; });
    if (it == history.rend()) {
      continue;
    }
    const auto old_corners = it->box.corners().as_array();
    double interval_cost = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const auto track_dir = velocity_direction(old_corners[k], last_corners[k]);
      if (track_dir && det_dirs[k]) {
        interval_cost += angle_difference(*track_dir, *det_dirs[k]);
      }
    }
    total += interval_cost / 4.0;
  }
  return total;
}

double cosine_appearance_cost(std::span<const double> a, std::span<const double> b,
                              std::uint64_t* zero_norm_count) {
  if (a.size() != b.size()) {
    throw InputError("embedding dimension mismatch: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) {
    if (zero_norm_count != nullptr) {
      ++*zero_norm_count;
    }
    return 1.0;
  }
  const double cosine = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
  return 1.0 - cosine;
}

}  // namespace hybridsort
