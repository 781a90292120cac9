#pragma once

#include <optional>

#include "tripose/localization.hpp"
#include "tripose/manifold.hpp"
#include "tripose/strapdown.hpp"
#include "tripose/types.hpp"

namespace tripose {

/// 15-dimensional filter state [p_c; v_c; vec(C)] with its covariance.
/// vec() stacks C column-major; that convention makes (d^T kron I) vec(C)
/// equal C d, which both the process and measurement matrices rely on.
struct FilterState {
  Vec15 x{Vec15::Zero()};
  Mat15 covariance{Mat15::Identity()};

  FilterState() { Eigen::Map<Mat3>(x.data() + 6) = Mat3::Identity(); }

  Vec3 position() const { return x.segment<3>(0); }
  Vec3 velocity() const { return x.segment<3>(3); }
  Mat3 orientation() const {
    return Eigen::Map<const Mat3>(x.data() + 6);
  }
  void set_position(const Vec3& p) { x.segment<3>(0) = p; }
  void set_velocity(const Vec3& v) { x.segment<3>(3) = v; }
  void set_orientation(const Mat3& c) {
    Eigen::Map<Mat3>(x.data() + 6) = c;
  }
};

/// Body-frame centroid-to-vertex offsets d_i (columns). They sum to zero and
/// are pairwise d apart for the canonical equilateral layout.
struct GeometryOffsets {
  Mat3 offsets{Mat3::Zero()};

  static GeometryOffsets regular(const ManifoldParams& params) {
    return {body_offsets(params)};
  }
};

using MeasurementMatrix = Eigen::Matrix<double, 9, 15>;
using InputJacobian = Eigen::Matrix<double, 15, 6>;

/// A kron I3 for a 3x3 block argument.
Mat9 kron_identity3(const Mat3& a);

/// The one-step process matrix F(a_b, Omega). a_b must be free acceleration.
Mat15 state_transition(const Vec3& accel_free, const Vec3& omega, double dt);

/// Measurement matrix mapping the state to the three stacked vertex
/// positions: H x = [p_c + C d_1; p_c + C d_2; p_c + C d_3].
MeasurementMatrix measurement_matrix(const GeometryOffsets& offsets);

/// Analytic Jacobian of the one-step propagation with respect to the inputs
/// (a_b, omega), evaluated at the orientation estimate C.
InputJacobian input_jacobian(const Vec3& accel_free, const Vec3& omega,
                             const Mat3& orientation, double dt);

/// EKF prediction: x = F x, P = F P F^T + F_u Q F_u^T (+ orientation jitter).
FilterState ekf_predict(const FilterState& state, const Vec3& accel_free,
                        const Vec3& omega, const Mat6& input_noise, double dt,
                        double orientation_jitter = 1e-12);

/// EKF correction. Throws SingularInnovation on a numerically singular
/// innovation covariance.
FilterState ekf_update(const FilterState& state, const Vec9& measured_vertices,
                       const MeasurementMatrix& h, const Mat9& measurement_noise);

struct UkfParams {
  double alpha_spread{1.0};
  double kappa() const { return (alpha_spread * alpha_spread - 1.0) * 15.0; }
  double mean_weight0() const { return kappa() / (kappa() + 15.0); }
  double cov_weight0() const {
    return mean_weight0() + 3.0 - alpha_spread * alpha_spread;
  }
  double tail_weight() const { return 0.5 / (kappa() + 15.0); }
};

struct SigmaPoints {
  Eigen::Matrix<double, 15, 31> points;
  double mean_weight0;
  double cov_weight0;
  double tail_weight;
};

/// Deterministic sigma-point set from the Cholesky factor of the covariance.
/// A single 1e-12 jitter retry is attempted before IndefiniteCovariance.
SigmaPoints ukf_sigma_points(const FilterState& state, const UkfParams& params);

struct UkfPrediction {
  FilterState state;
  // Sigma representation of the predicted density (noise included), the set
  // the measurement update consumes.
  Eigen::Matrix<double, 15, 31> propagated;
  UkfParams params;
};

/// Unscented prediction through F. The input-noise contribution enters as
/// F_u Q F_u^T, the same linearized map the EKF uses, keeping both filters on
/// one noise model. The retained sigma points are re-drawn from the
/// noise-inflated predicted density so the measurement update sees the full
/// covariance.
UkfPrediction ukf_predict(const FilterState& state, const Vec3& accel_free,
                          const Vec3& omega, const Mat6& input_noise, double dt,
                          const UkfParams& params, double orientation_jitter = 1e-12);

/// Unscented correction using the sigma points propagated by the preceding
/// prediction. R is added to the predicted measurement covariance before
/// inversion.
FilterState ukf_update(const UkfPrediction& prediction, const Vec9& measured_vertices,
                       const MeasurementMatrix& h, const Mat9& measurement_noise);

/// Projects the filter output onto the triangle manifold: vertices from the
/// state, nearest retraction, centroid/orientation extraction, and write-back
/// of position and orientation. Velocity and covariance are untouched.
FilterState project_state(const FilterState& state, const GeometryOffsets& offsets,
                          const ManifoldParams& params);

enum class FilterKind { Ekf, Ukf };

struct PoseFilterOptions {
  Mat6 input_noise{Mat6::Zero()};         // Q
  Mat9 measurement_noise{Mat9::Identity()};  // R
  double dt{0.01};
  double gravity{9.80665};
  UkfParams ukf{};
  double orientation_jitter{1e-12};
};

/// Orientation-state filter driving the op-level pieces: predict on every IMU
/// sample, update and project at acoustic epochs.
class PoseFilter {
 public:
  PoseFilter(FilterKind kind, const FilterState& init, const GeometryOffsets& offsets,
             const ManifoldParams& manifold, const PoseFilterOptions& opts);

  /// Specific-force samples are converted to free acceleration with the
  /// current orientation estimate.
  void predict(const ImuSample& sample);
  void update(const Vec9& measured_vertices);
  void project();

  const FilterState& state() const { return state_; }
  const MeasurementMatrix& measurement() const { return h_; }
  Vec9 predicted_vertices() const { return h_ * state_.x; }

 private:
  FilterKind kind_;
  FilterState state_;
  GeometryOffsets offsets_;
  ManifoldParams manifold_;
  PoseFilterOptions opts_;
  MeasurementMatrix h_;
  std::optional<UkfPrediction> last_prediction_;
};

/// Position/velocity linear KF used by the centroid-only baselines. The
/// orientation is propagated purely by strapdown integration and is used only
/// to rotate accelerations (and, for metrics, to place the vertices).
class CentroidKalman {
 public:
  CentroidKalman(const Vec3& position, const Vec3& velocity, const Mat3& orientation,
                 const Mat6& init_covariance, const Vec3& accel_sigma, double gravity);

  void predict(const ImuSample& sample, double dt);
  void update(const Vec3& measured_position, const Mat3& position_noise);

  Vec3 position() const { return x_.segment<3>(0); }
  Vec3 velocity() const { return x_.segment<3>(3); }
  const Mat3& ins_orientation() const { return orientation_; }

 private:
  Vec6 x_;
  Mat6 covariance_;
  Mat3 orientation_;
  Vec3 accel_sigma_;
  double gravity_;
};

}  // namespace tripose
