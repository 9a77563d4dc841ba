#include "hybridsort/kalman.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "hybridsort/errors.hpp"

namespace hybridsort {

namespace {

bool all_finite_positive(const auto& values) {
  return std::all_of(values.begin(), values.end(),
                     [](double x) { return std::isfinite(x) && x > 0.0; });
}

}  // namespace

Measurement Measurement::from_box(const Box& box, double confidence) {
  if (!box.is_valid() || !std::isfinite(confidence)) {
    throw InputError("detection has non-finite or inverted coordinates");
  }
  const double w = box.width();
  const double h = box.height();
  if (w <= 0.0 || h <= 0.0) {
    throw InputError("detection box has zero width or height; aspect ratio undefined");
  }
  const Point c = box.center();
  return {c.u, c.v, w * h, confidence, w / h};
}

MeasurementVector Measurement::vector() const {
  MeasurementVector z;
  z << u, v, s, c, r;
  return z;
}

void NoiseConfig::validate() const {
  if (!all_finite_positive(measurement_std) || !all_finite_positive(process_std) ||
      !(std::isfinite(velocity_variance_inflation) && velocity_variance_inflation > 0.0)) {
    throw InputError("noise configuration entries must be finite and strictly positive");
  }
}

Eigen::Matrix<double, kStateDim, kStateDim> transition_matrix() {
  StateCovariance f = StateCovariance::Identity();
  f(kU, kDu) = 1.0;
  f(kV, kDv) = 1.0;
  f(kS, kDs) = 1.0;
  f(kC, kDc) = 1.0;
  return f;
}

Eigen::Matrix<double, kMeasurementDim, kStateDim> observation_matrix() {
  Eigen::Matrix<double, kMeasurementDim, kStateDim> h =
      Eigen::Matrix<double, kMeasurementDim, kStateDim>::Zero();
  for (int i = 0; i < kMeasurementDim; ++i) {
    h(i, i) = 1.0;
  }
  return h;
}

StateCovariance process_noise(const NoiseConfig& cfg) {
  StateCovariance q = StateCovariance::Zero();
  for (int i = 0; i < kStateDim; ++i) {
    q(i, i) = cfg.process_std[i] * cfg.process_std[i];
  }
  return q;
}

Eigen::Matrix<double, kMeasurementDim, kMeasurementDim> measurement_noise(const NoiseConfig& cfg) {
  Eigen::Matrix<double, kMeasurementDim, kMeasurementDim> r =
      Eigen::Matrix<double, kMeasurementDim, kMeasurementDim>::Zero();
  for (int i = 0; i < kMeasurementDim; ++i) {
    r(i, i) = cfg.measurement_std[i] * cfg.measurement_std[i];
  }
  return r;
}

KalmanState init_from_measurement(const Measurement& z, const NoiseConfig& cfg) {
  KalmanState state;
  state.mean.setZero();
  state.mean.head<kMeasurementDim>() = z.vector();
  state.covariance.setZero();
  for (int i = 0; i < kMeasurementDim; ++i) {
    state.covariance(i, i) = cfg.measurement_std[i] * cfg.measurement_std[i];
  }
  // Velocity slots pair with u, v, s, c (indices 0..3).
  for (int i = 0; i < 4; ++i) {
    state.covariance(kDu + i, kDu + i) =
        cfg.velocity_variance_inflation * cfg.measurement_std[i] * cfg.measurement_std[i];
  }
  return state;
}

KalmanState init_from_detection(const Box& box, double confidence, const NoiseConfig& cfg) {
  return init_from_measurement(Measurement::from_box(box, confidence), cfg);
}

KalmanState predict(const KalmanState& state, const NoiseConfig& cfg) {
  const auto f = transition_matrix();
  KalmanState out;
  out.mean = f * state.mean;
  out.covariance = f * state.covariance * f.transpose() + process_noise(cfg);
  return out;
}

KalmanState update(const KalmanState& state, const Measurement& z, const NoiseConfig& cfg) {
  const auto h = observation_matrix();
  const auto r = measurement_noise(cfg);
  const MeasurementVector innovation = z.vector() - h * state.mean;
  const Eigen::Matrix<double, kMeasurementDim, kMeasurementDim> s =
      h * state.covariance * h.transpose() + r;

  const Eigen::LLT<Eigen::Matrix<double, kMeasurementDim, kMeasurementDim>> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("innovation covariance is not positive definite");
  }
  // K = P H^T S^-1, solved as S K^T = H P.
  const Eigen::Matrix<double, kStateDim, kMeasurementDim> gain =
      llt.solve(h * state.covariance).transpose();

  KalmanState out;
  out.mean = state.mean + gain * innovation;
  const StateCovariance i_kh = StateCovariance::Identity() - gain * h;
  const StateCovariance joseph =
      i_kh * state.covariance * i_kh.transpose() + gain * r * gain.transpose();
  out.covariance = 0.5 * (joseph + joseph.transpose());
  if (!out.mean.allFinite() || !out.covariance.allFinite()) {
    throw NumericalError("Kalman update produced a non-finite posterior");
  }
  return out;
}

BoxEstimate state_to_box(const KalmanState& state) {
  const double u = state.mean(kU);
  const double v = state.mean(kV);
  double s = state.mean(kS);
  const double r = state.mean(kR);
  if (!std::isfinite(u) || !std::isfinite(v) || !std::isfinite(s) || !std::isfinite(r)) {
    throw NumericalError("state mean is not finite");
  }
  if (r <= 0.0) {
    throw NumericalError("aspect ratio must be positive, got " + std::to_string(r));
  }
  if (s < 0.0) {
    s = kMinArea;
  }
  const double w = std::sqrt(s * r);
  const double h = w > 0.0 ? s / w : 0.0;
  return {Box{u - w / 2.0, v - h / 2.0, u + w / 2.0, v + h / 2.0}, estimated_confidence(state)};
}

double estimated_confidence(const KalmanState& state) {
  return std::clamp(state.mean(kC), 0.0, 1.0);
}

}  // namespace hybridsort
