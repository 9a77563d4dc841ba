#pragma once

#include <array>

#include <Eigen/Core>

#include "hybridsort/geometry.hpp"

namespace hybridsort {

inline constexpr int kStateDim = 9;
inline constexpr int kMeasurementDim = 5;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using StateCovariance = Eigen::Matrix<double, kStateDim, kStateDim>;
using MeasurementVector = Eigen::Matrix<double, kMeasurementDim, 1>;

/// Index of each component in the state vector [u, v, s, c, r, du, dv, ds, dc].
enum StateIndex : int { kU = 0, kV, kS, kC, kR, kDu, kDv, kDs, kDc };

/// Observed part of the state: center, area, confidence and aspect ratio w/h.
struct Measurement {
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  double c = 0.0;
  double r = 0.0;

  /// Throws InputError for non-finite fields or a box without positive width and height.
  static Measurement from_box(const Box& box, double confidence);

  [[nodiscard]] MeasurementVector vector() const;
};

struct NoiseConfig {
  // Standard deviations in measurement order [u, v, s, c, r].
  std::array<double, kMeasurementDim> measurement_std{1.0, 1.0, 3.1622776601683795, 0.1,
                                                      3.1622776601683795};
  // Standard deviations in state order [u, v, s, c, r, du, dv, ds, dc].
  std::array<double, kStateDim> process_std{1.0, 1.0, 1.0, 0.01, 1.0, 0.1, 0.1, 0.01, 0.01};
  // Initial velocity variance = inflation * measurement variance of the matching component.
  double velocity_variance_inflation = 1.0e4;

  /// Throws InputError unless every entry is finite and strictly positive.
  void validate() const;

  friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

/// Mean and covariance of the constant-velocity filter. Treated as an immutable value.
struct KalmanState {
  StateVector mean = StateVector::Zero();
  StateCovariance covariance = StateCovariance::Identity();
};

/// Floor applied to a non-positive predicted area before converting to a box.
inline constexpr double kMinArea = 1e-6;

[[nodiscard]] KalmanState init_from_measurement(const Measurement& z, const NoiseConfig& cfg);
[[nodiscard]] KalmanState init_from_detection(const Box& box, double confidence,
                                              const NoiseConfig& cfg);

/// x' = F x, P' = F P F^T + Q. Velocities of u, v, s and c integrate into their
/// positions; the aspect ratio has no velocity.
[[nodiscard]] KalmanState predict(const KalmanState& state, const NoiseConfig& cfg);

/// Standard Kalman update observing [u, v, s, c, r]. The covariance update uses the
/// Joseph form and is symmetrised. Throws NumericalError when the innovation
/// covariance cannot be factorised or the posterior is not finite.
[[nodiscard]] KalmanState update(const KalmanState& state, const Measurement& z,
                                 const NoiseConfig& cfg);

struct BoxEstimate {
  Box box;
  double confidence = 0.0;  // clamped to [0, 1]
};

/// Converts the state to a centered box. Throws NumericalError when r <= 0 or the
/// mean is not finite. s == 0 gives a zero-area box at (u, v); s < 0 is floored.
[[nodiscard]] BoxEstimate state_to_box(const KalmanState& state);

/// The confidence component clamped to [0, 1] for use in association costs.
[[nodiscard]] double estimated_confidence(const KalmanState& state);

/// Matrices of the model, exposed for inspection and tests.
[[nodiscard]] Eigen::Matrix<double, kStateDim, kStateDim> transition_matrix();
[[nodiscard]] Eigen::Matrix<double, kMeasurementDim, kStateDim> observation_matrix();
[[nodiscard]] StateCovariance process_noise(const NoiseConfig& cfg);
[[nodiscard]] Eigen::Matrix<double, kMeasurementDim, kMeasurementDim> measurement_noise(
    const NoiseConfig& cfg);

}  // namespace hybridsort
