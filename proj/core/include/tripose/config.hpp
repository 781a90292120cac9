#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tripose/scenario.hpp"
#include "tripose/types.hpp"

namespace tripose {

enum class SweepAxis { SigmaA, SigmaOmega, SigmaD, AcousticRate };

std::string sweep_axis_name(SweepAxis axis);
SweepAxis parse_sweep_axis(const std::string& name);

struct SweepSpec {
  SweepAxis axis{SweepAxis::SigmaA};
  std::vector<double> values;
};

/// Beacons near the four upper corners of the default 10 x 5 x 3 room, on
/// two mounting heights so the set is not exactly coplanar.
BeaconMatrix default_beacons();

/// A closed walking loop inside the default room with mild height variation.
std::vector<Vec3> default_waypoints();

struct TrajectoryConfig {
  std::vector<Vec3> waypoints{default_waypoints()};
  double speed{1.3};  // m/s, inside the walking band
  OrientationProfile profile{};
};

struct InitConfig {
  double sigma_p0{0.01};   // P(0) std, position (m)
  double sigma_v0{0.1};    // P(0) std, velocity (m/s)
  double sigma_c0{0.01};   // P(0) std, orientation entries
  double perturb_position{0.0};   // filter init error std (m)
  double perturb_velocity{0.0};   // filter init error std (m/s)
  double perturb_angle_deg{0.0};  // filter init attitude error std (deg)
};

/// Full experiment description; this is exactly what the JSON config file
/// carries (units: meters, seconds, rad/s, m/s^2 throughout).
struct ExperimentConfig {
  std::array<double, 3> room_size{10.0, 5.0, 3.0};
  BeaconMatrix beacons{default_beacons()};

  double triangle_side{0.2};
  double imu_rate{100.0};
  double acoustic_rate{10.0};
  double duration{30.0};
  double gravity{9.80665};
  // The fusion process model takes free acceleration; the emulation feeds it
  // directly (matching the motion-capture-derived accelerations it mimics).
  // Specific-force streams remain available for the strapdown path and real
  // IMU ingestion.
  bool free_acceleration{true};
  TrajectoryConfig trajectory{};
  NoiseSpec noise{};
  double sigma_p{-1.0};  // <= 0 means derived: max(sigma_d, 1e-7)
  InitConfig init{};
  std::optional<NlosSpec> nlos;
  std::vector<Algorithm> algorithms{Algorithm::EkfRtr};
  GatingMode gating{GatingMode::None};
  int seeds{1};
  std::optional<SweepSpec> sweep;

  double effective_sigma_p() const {
    return sigma_p > 0.0 ? sigma_p : std::max(noise.sigma_d, 1e-7);
  }
};

/// Parses and validates a config file (strict: unknown keys are rejected).
/// Accepts either a bare config or a run manifest (which wraps the config).
ExperimentConfig load_config(const std::string& path);

/// Normalized JSON text of a config; load(save(c)) == c.
std::string config_to_json_text(const ExperimentConfig& config);

ExperimentConfig config_from_json_text(const std::string& text);

/// Manifest written next to run outputs; re-running from it reproduces the
/// metrics byte for byte.
std::string manifest_text(const ExperimentConfig& config, int seed_offset);

}  // namespace tripose
