#pragma once

#include <span>
#include <vector>

#include "tripose/types.hpp"

namespace tripose {

struct ImuSample {
  double t{0.0};                     // seconds
  Vec3 accel_body{Vec3::Zero()};     // m/s^2, specific force or free acceleration
  Vec3 gyro{Vec3::Zero()};           // rad/s, body turn rate
  bool is_free_acceleration{true};   // gravity already removed when true
};

struct NavState {
  Vec3 position{Vec3::Zero()};
  Vec3 velocity{Vec3::Zero()};
  Mat3 orientation{Mat3::Identity()};  // body to navigation
};

struct InsParams {
  double gravity{9.80665};  // m/s^2
  double dt{0.01};          // sampling period, seconds
};

/// First-order orientation update C + dt * C * skew(omega). Deliberately not
/// the exponential map: the fusion process matrix is derived from exactly this
/// discretization.
Mat3 orientation_step(const Mat3& orientation, const Vec3& omega, double dt);

/// Rotates a specific-force measurement to the navigation frame and removes
/// gravity: C a_b - (0, 0, g).
Vec3 gravity_compensate(const Mat3& orientation, const Vec3& accel_body, double gravity);

/// Velocity/position update with the pre-update velocity:
///   v <- v + dt a_n;  p <- p + dt v_old + dt^2/2 a_n.
NavState kinematic_step(const NavState& state, const Vec3& accel_nav, double dt);

/// Full mechanization over a sample stream. Output k is the state at
/// samples[k].t; output 0 is the initial state. The final sample's
/// measurements are used only if a later timestamp existed, so streams meant
/// for chaining should overlap by one sample.
std::vector<NavState> dead_reckon(std::span<const ImuSample> samples,
                                  const NavState& init, const InsParams& params);

/// Gram-Schmidt re-orthonormalization of the columns. Never called implicitly
/// by dead_reckon; drift handling is the caller's policy.
Mat3 orthonormalize_columns(const Mat3& m);

}  // namespace tripose
