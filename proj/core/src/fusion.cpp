#include "tripose/fusion.hpp"

#include <cmath>

#include "tripose/errors.hpp"

namespace tripose {

Mat9 kron_identity3(const Mat3& a) {
  Mat9 out = Mat9::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.block<3, 3>(3 * i, 3 * j) = a(i, j) * Mat3::Identity();
    }
  }
  return out;
}

namespace {

// a^x = a^T kron I3, the 3x9 block with (a^T kron I) vec(C) = C a.
Eigen::Matrix<double, 3, 9> kron_row(const Vec3& a) {
  Eigen::Matrix<double, 3, 9> out;
  out << a.x() * Mat3::Identity(), a.y() * Mat3::Identity(), a.z() * Mat3::Identity();
  return out;
}

Mat15 symmetrized(const Mat15& p) { return 0.5 * (p + p.transpose()); }

void add_orientation_jitter(Mat15& covariance, double jitter) {
  if (jitter > 0.0) {
    covariance.block<9, 9>(6, 6) += jitter * Mat9::Identity();
  }
}

}  // namespace

Mat15 state_transition(const Vec3& accel_free, const Vec3& omega, double dt) {
  const Mat3 omega_skew = skew(omega);
  const Eigen::Matrix<double, 3, 9> accel_kron = kron_row(accel_free);
  const Mat9 omega_kron = kron_identity3(omega_skew.transpose());
  const Mat9 omega_sq_kron = kron_identity3(omega_skew * omega_skew);

  Mat15 f = Mat15::Identity();
  f.block<3, 3>(0, 3) = dt * Mat3::Identity();
  f.block<3, 9>(0, 6) = 0.5 * dt * dt * accel_kron;
  f.block<3, 9>(3, 6) = dt * accel_kron + 0.5 * dt * dt * accel_kron * omega_kron;
  f.block<9, 9>(6, 6) =
      Mat9::Identity() + dt * omega_kron + 0.5 * dt * dt * omega_sq_kron;
  return f;
}

MeasurementMatrix measurement_matrix(const GeometryOffsets& offsets) {
  MeasurementMatrix h = MeasurementMatrix::Zero();
  for (int i = 0; i < 3; ++i) {
    h.block<3, 3>(3 * i, 0) = Mat3::Identity();
    h.block<3, 9>(3 * i, 6) = kron_row(offsets.offsets.col(i));
  }
  return h;
}

InputJacobian input_jacobian(const Vec3& accel_free, const Vec3& omega,
                             const Mat3& orientation, double dt) {
  const Mat3 omega_skew = skew(omega);
  const double wx = omega.x();
  const double wy = omega.y();
  const double wz = omega.z();

  // Partials of Omega^2 = w w^T - ||w||^2 I with respect to each rate.
  Mat3 dsq_x, dsq_y, dsq_z;
  dsq_x << 0.0, wy, wz,
           wy, -2.0 * wx, 0.0,
           wz, 0.0, -2.0 * wx;
  dsq_y << -2.0 * wy, wx, 0.0,
           wx, 0.0, wz,
           0.0, wz, -2.0 * wy;
  dsq_z << -2.0 * wz, 0.0, wx,
           0.0, -2.0 * wz, wy,
           wx, wy, 0.0;

  InputJacobian fu = InputJacobian::Zero();
  fu.block<3, 3>(0, 0) = 0.5 * dt * dt * orientation;
  fu.block<3, 3>(3, 0) = dt * orientation + 0.5 * dt * dt * orientation * omega_skew;
  // Xi_b^T = -skew(a_b), the derivative of Omega a_b in omega.
  fu.block<3, 3>(3, 3) = -0.5 * dt * dt * orientation * skew(accel_free);

  const Mat3* dsq[3] = {&dsq_x, &dsq_y, &dsq_z};
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 basis = Vec3::Zero();
    basis(axis) = 1.0;
    const Mat3 dorient = dt * orientation * skew(basis) +
                         0.5 * dt * dt * orientation * (*dsq[axis]);
    fu.block<9, 1>(6, 3 + axis) = Eigen::Map<const Vec9>(dorient.data());
  }
  return fu;
}

FilterState ekf_predict(const FilterState& state, const Vec3& accel_free,
                        const Vec3& omega, const Mat6& input_noise, double dt,
                        double orientation_jitter) {
  const Mat15 f = state_transition(accel_free, omega, dt);
  const InputJacobian fu = input_jacobian(accel_free, omega, state.orientation(), dt);

  FilterState out;
  out.x = f * state.x;
  out.covariance = symmetrized(f * state.covariance * f.transpose() +
                               fu * input_noise * fu.transpose());
  add_orientation_jitter(out.covariance, orientation_jitter);
  return out;
}

FilterState ekf_update(const FilterState& state, const Vec9& measured_vertices,
                       const MeasurementMatrix& h, const Mat9& measurement_noise) {
  const Mat9 innovation_cov = h * state.covariance * h.transpose() + measurement_noise;
  const Eigen::LDLT<Mat9> ldlt(innovation_cov);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SingularInnovation("innovation covariance is not positive definite");
  }
  // K = P H^T S^{-1}, computed as (S^{-1} H P)^T.
  const Eigen::Matrix<double, 15, 9> gain =
      ldlt.solve(h * state.covariance).transpose();

  FilterState out;
  out.x = state.x + gain * (measured_vertices - h * state.x);
  out.covariance =
      symmetrized((Mat15::Identity() - gain * h) * state.covariance);
  return out;
}

SigmaPoints ukf_sigma_points(const FilterState& state, const UkfParams& params) {
  Eigen::LLT<Mat15> llt(state.covariance);
  if (llt.info() != Eigen::Success) {
    llt.compute(state.covariance + 1e-12 * Mat15::Identity());
    if (llt.info() != Eigen::Success) {
      throw IndefiniteCovariance("covariance has no Cholesky factor");
    }
  }
  const Mat15 l = llt.matrixL();
  const double spread = std::sqrt(15.0 + params.kappa());

  SigmaPoints sigma;
  sigma.points.col(0) = state.x;
  for (int i = 0; i < 15; ++i) {
    sigma.points.col(1 + i) = state.x + spread * l.col(i);
    sigma.points.col(16 + i) = state.x - spread * l.col(i);
  }
  sigma.mean_weight0 = params.mean_weight0();
  sigma.cov_weight0 = params.cov_weight0();
  sigma.tail_weight = params.tail_weight();
  return sigma;
}

UkfPrediction ukf_predict(const FilterState& state, const Vec3& accel_free,
                          const Vec3& omega, const Mat6& input_noise, double dt,
                          const UkfParams& params, double orientation_jitter) {
  const SigmaPoints sigma = ukf_sigma_points(state, params);
  const Mat15 f = state_transition(accel_free, omega, dt);
  const InputJacobian fu = input_jacobian(accel_free, omega, state.orientation(), dt);

  UkfPrediction prediction;
  prediction.params = params;
  const Eigen::Matrix<double, 15, 31> propagated = f * sigma.points;

  Vec15 mean = sigma.mean_weight0 * propagated.col(0);
  for (int i = 1; i < 31; ++i) {
    mean += sigma.tail_weight * propagated.col(i);
  }

  Mat15 cov = Mat15::Zero();
  for (int i = 0; i < 31; ++i) {
    const double w = (i == 0) ? sigma.cov_weight0 : sigma.tail_weight;
    const Vec15 dev = propagated.col(i) - mean;
    cov += w * dev * dev.transpose();
  }
  cov += fu * input_noise * fu.transpose();

  prediction.state.x = mean;
  prediction.state.covariance = symmetrized(cov);
  add_orientation_jitter(prediction.state.covariance, orientation_jitter);
  // Re-draw so the retained set represents the noise-inflated density; the
  // update would otherwise miss the F_u Q F_u^T term entirely.
  prediction.propagated = ukf_sigma_points(prediction.state, params).points;
  return prediction;
}

FilterState ukf_update(const UkfPrediction& prediction, const Vec9& measured_vertices,
                       const MeasurementMatrix& h, const Mat9& measurement_noise) {
  const UkfParams& params = prediction.params;
  const double w0m = params.mean_weight0();
  const double w0c = params.cov_weight0();
  const double wt = params.tail_weight();

  const Eigen::Matrix<double, 9, 31> predicted = h * prediction.propagated;
  Vec9 mean_meas = w0m * predicted.col(0);
  for (int i = 1; i < 31; ++i) {
    mean_meas += wt * predicted.col(i);
  }

  Mat9 meas_cov = measurement_noise;
  Eigen::Matrix<double, 15, 9> cross_cov = Eigen::Matrix<double, 15, 9>::Zero();
  for (int i = 0; i < 31; ++i) {
    const double w = (i == 0) ? w0c : wt;
    const Vec9 dev_meas = predicted.col(i) - mean_meas;
    const Vec15 dev_state = prediction.propagated.col(i) - prediction.state.x;
    meas_cov += w * dev_meas * dev_meas.transpose();
    cross_cov += w * dev_state * dev_meas.transpose();
  }

  const Eigen::LDLT<Mat9> ldlt(meas_cov);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SingularInnovation("predicted measurement covariance is not positive definite");
  }
  const Eigen::Matrix<double, 15, 9> gain =
      ldlt.solve(cross_cov.transpose()).transpose();

  FilterState out;
  out.x = prediction.state.x + gain * (measured_vertices - mean_meas);
  out.covariance = symmetrized(prediction.state.covariance -
                               gain * meas_cov * gain.transpose());
  return out;
}

FilterState project_state(const FilterState& state, const GeometryOffsets& offsets,
                          const ManifoldParams& params) {
  const MeasurementMatrix h = measurement_matrix(offsets);
  const Vec9 stacked = h * state.x;
  const VertexSet vertices = Eigen::Map<const Mat3>(stacked.data());
  const VertexSet projected = retract_nearest(vertices, params);
  const Pose pose = centroid_orientation(projected);

  FilterState out = state;
  out.set_position(pose.position);
  out.set_orientation(pose.orientation);
  return out;
}

PoseFilter::PoseFilter(FilterKind kind, const FilterState& init,
                       const GeometryOffsets& offsets, const ManifoldParams& manifold,
                       const PoseFilterOptions& opts)
    : kind_(kind),
      state_(init),
      offsets_(offsets),
      manifold_(manifold),
      opts_(opts),
      h_(measurement_matrix(offsets)) {}

void PoseFilter::predict(const ImuSample& sample) {
  Vec3 accel = sample.accel_body;
  if (!sample.is_free_acceleration) {
    // Remove gravity in the body frame with the current orientation estimate.
    accel -= state_.orientation().transpose() * Vec3(0.0, 0.0, opts_.gravity);
  }
  if (kind_ == FilterKind::Ekf) {
    state_ = ekf_predict(state_, accel, sample.gyro, opts_.input_noise, opts_.dt,
                         opts_.orientation_jitter);
  } else {
    last_prediction_ = ukf_predict(state_, accel, sample.gyro, opts_.input_noise,
                                   opts_.dt, opts_.ukf, opts_.orientation_jitter);
    state_ = last_prediction_->state;
  }
}

void PoseFilter::update(const Vec9& measured_vertices) {
  if (kind_ == FilterKind::Ekf || !last_prediction_.has_value()) {
    // The measurement map is linear, so the sigma-point update and the KF
    // update coincide; the KF form also covers an update before any predict.
    state_ = ekf_update(state_, measured_vertices, h_, opts_.measurement_noise);
  } else {
    state_ = ukf_update(*last_prediction_, measured_vertices, h_,
                        opts_.measurement_noise);
    last_prediction_.reset();
  }
}

void PoseFilter::project() {
  state_ = project_state(state_, offsets_, manifold_);
}

CentroidKalman::CentroidKalman(const Vec3& position, const Vec3& velocity,
                               const Mat3& orientation, const Mat6& init_covariance,
                               const Vec3& accel_sigma, double gravity)
    : covariance_(init_covariance),
      orientation_(orientation),
      accel_sigma_(accel_sigma),
      gravity_(gravity) {
  x_.segment<3>(0) = position;
  x_.segment<3>(3) = velocity;
}

void CentroidKalman::predict(const ImuSample& sample, double dt) {
  const Vec3 accel_nav =
      sample.is_free_acceleration
          ? Vec3(orientation_ * sample.accel_body)
          : gravity_compensate(orientation_, sample.accel_body, gravity_);

  Mat6 f = Mat6::Identity();
  f.block<3, 3>(0, 3) = dt * Mat3::Identity();
  x_.segment<3>(0) += dt * x_.segment<3>(3) + 0.5 * dt * dt * accel_nav;
  x_.segment<3>(3) += dt * accel_nav;

  // Accelerometer noise mapped through the kinematics.
  Eigen::Matrix<double, 6, 3> gu;
  gu << 0.5 * dt * dt * orientation_, dt * orientation_;
  const Mat3 q = accel_sigma_.cwiseProduct(accel_sigma_).asDiagonal();
  covariance_ = f * covariance_ * f.transpose() + gu * q * gu.transpose();
  covariance_ = 0.5 * (covariance_ + covariance_.transpose());

  orientation_ = orientation_step(orientation_, sample.gyro, dt);
}

void CentroidKalman::update(const Vec3& measured_position, const Mat3& position_noise) {
  Eigen::Matrix<double, 3, 6> h = Eigen::Matrix<double, 3, 6>::Zero();
  h.block<3, 3>(0, 0) = Mat3::Identity();

  const Mat3 innovation_cov = h * covariance_ * h.transpose() + position_noise;
  const Eigen::LDLT<Mat3> ldlt(innovation_cov);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SingularInnovation("position innovation covariance is not positive definite");
  }
  const Eigen::Matrix<double, 6, 3> gain = ldlt.solve(h * covariance_).transpose();
  x_ += gain * (measured_position - h * x_);
  covariance_ = (Mat6::Identity() - gain * h) * covariance_;
  covariance_ = 0.5 * (covariance_ + covariance_.transpose());
}

}  // namespace tripose
