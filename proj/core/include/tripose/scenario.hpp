#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tripose/fusion.hpp"
#include "tripose/localization.hpp"
#include "tripose/strapdown.hpp"
#include "tripose/types.hpp"

namespace tripose {

struct TrajectorySample {
  double t{0.0};
  Pose pose;
  Vec3 velocity{Vec3::Zero()};
  Vec3 accel_nav{Vec3::Zero()};
  Vec3 omega_body{Vec3::Zero()};
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double dt{0.01};
};

/// Sinusoidal yaw/pitch/roll schedule so the emulated walk rotates about all
/// three axes. Angles in radians, periods in seconds.
struct OrientationProfile {
  double yaw_amplitude{0.8};
  double yaw_period{12.0};
  double pitch_amplitude{0.25};
  double pitch_period{7.0};
  double roll_amplitude{0.25};
  double roll_period{9.0};
  double phase_yaw{0.0};
  double phase_pitch{1.0};
  double phase_roll{2.0};
};

/// C^2 position spline through the waypoints (periodic when the list closes on
/// itself, so any duration can be covered by cycling), with analytic velocity
/// and acceleration, plus the orientation profile's analytic body rates.
Trajectory generate_trajectory(const std::vector<Vec3>& waypoints, double speed,
                               double imu_rate, double duration,
                               const OrientationProfile& profile = {});

struct NoiseSpec {
  double sigma_a{0.0};      // m/s^2 per axis
  double sigma_omega{0.0};  // rad/s per axis
  double sigma_d{0.0};      // m
  std::uint64_t seed{1};
};

struct NlosSpec {
  int beacon_index{0};
  double t_start{0.0};
  double duration{3.0};
  double range_low{0.5};
  double range_high{11.6};
};

std::vector<ImuSample> synthesize_imu(const Trajectory& traj, const NoiseSpec& noise,
                                      bool free_acceleration, double gravity = 9.80665);

struct RangeEpoch {
  double t{0.0};
  std::size_t sample_index{0};
  RangeSet ranges;
};

/// Range measurements at the acoustic rate (which must divide the IMU rate).
/// Inside an NLOS window the affected beacon's rows are uniform draws and its
/// los flag is false; the flags are the scenario oracle's ground truth.
std::vector<RangeEpoch> synthesize_ranges(const Trajectory& traj,
                                          const BeaconMatrix& beacons,
                                          const ManifoldParams& params,
                                          const NoiseSpec& noise,
                                          const std::optional<NlosSpec>& nlos,
                                          double acoustic_rate);

enum class Algorithm {
  LkfGn,
  LkfRtr,
  OneRx,
  PcGn,
  PcRsd,
  PcRtr,
  EkfGn,
  EkfRsd,
  EkfRtr,
  UkfGn,
  UkfRsd,
  UkfRtr,
};

/// Roster names as they appear in configs and output tables.
std::string algorithm_name(Algorithm alg);
Algorithm parse_algorithm(const std::string& name);  // throws ConfigError

enum class GatingMode { None, Oracle };

struct PipelineConfig {
  BeaconMatrix beacons{BeaconMatrix::Zero()};
  ManifoldParams manifold{};
  double imu_dt{0.01};
  double gravity{9.80665};
  GatingMode gating{GatingMode::None};
  Mat6 input_noise{Mat6::Zero()};  // filter Q
  double sigma_p{0.025};           // vertex measurement std per coordinate
  Vec3 init_sigma{0.01, 0.1, 0.01};  // P(0) stds for position/velocity/orientation
  NavState init_state{};
};

struct TrackSample {
  double t{0.0};
  Vec3 position{Vec3::Zero()};
  Vec3 velocity{Vec3::Zero()};
  Mat3 orientation{Mat3::Identity()};
};

using Track = std::vector<TrackSample>;

/// Runs one algorithm over the measurement streams: localization at every
/// acoustic epoch, filter predict every IMU sample, update (and manifold
/// projection for the Riemannian filter variants) at epochs. Oracle gating
/// drops flagged beacons; epochs with fewer than three line-of-sight beacons
/// are predict-only.
Track run_pipeline(const Trajectory& traj, const std::vector<ImuSample>& imu,
                   const std::vector<RangeEpoch>& epochs, Algorithm algorithm,
                   const PipelineConfig& config);

/// Z-Y-X (yaw, pitch, roll) Euler extraction in degrees; pitch in [-90, 90],
/// gimbal-lock fallback puts the free angle into yaw.
Vec3 rotation_to_euler_deg(const Mat3& orientation);
Mat3 euler_deg_to_rotation(const Vec3& yaw_pitch_roll_deg);

struct MetricsReport {
  Vec3 vertex_rmse{Vec3::Zero()};  // per-vertex position RMSE, meters
  double rmse_avg{0.0};
  double yaw_rmse_deg{0.0};
  double pitch_rmse_deg{0.0};
  double roll_rmse_deg{0.0};
  std::vector<double> epoch_mean_errors_sorted;  // per-sample mean vertex error
  std::vector<double> pooled_errors_sorted;      // all per-vertex errors

  /// Empirical CDF of the per-sample mean vertex error.
  double cdf_at(double error_m) const;
  /// Empirical CDF of the pooled per-vertex errors.
  double cdf_pooled_at(double error_m) const;
};

MetricsReport compute_metrics(const Trajectory& truth, const Track& estimate,
                              const GeometryOffsets& offsets);

/// Averaged vertex RMSE restricted to t in [t_begin, t_end).
double vertex_rmse_between(const Trajectory& truth, const Track& estimate,
                           const GeometryOffsets& offsets, double t_begin,
                           double t_end);

}  // namespace tripose
