#include "tripose/strapdown.hpp"

#include "tripose/errors.hpp"
#include "tripose/manifold.hpp"

namespace tripose {

Mat3 orientation_step(const Mat3& orientation, const Vec3& omega, double dt) {
  return orientation + dt * orientation * skew(omega);
}

Vec3 gravity_compensate(const Mat3& orientation, const Vec3& accel_body, double gravity) {
  Vec3 accel_nav = orientation * accel_body;
  accel_nav.z() -= gravity;
  return accel_nav;
}

NavState kinematic_step(const NavState& state, const Vec3& accel_nav, double dt) {
  NavState next = state;
  next.position = state.position + dt * state.velocity + 0.5 * dt * dt * accel_nav;
  next.velocity = state.velocity + dt * accel_nav;
  return next;
}

std::vector<NavState> dead_reckon(std::span<const ImuSample> samples,
                                  const NavState& init, const InsParams& params) {
  std::vector<NavState> states;
  states.reserve(samples.size());
  if (samples.empty()) return states;

  NavState state = init;
  states.push_back(state);
  for (size_t k = 1; k < samples.size(); ++k) {
    const ImuSample& prev = samples[k - 1];
    const double dt = samples[k].t - prev.t;
    if (!(dt > 0.0)) {
      throw NonMonotonicTimestamps("IMU timestamps must be strictly increasing");
    }
    const Vec3 accel_nav =
        prev.is_free_acceleration
            ? Vec3(state.orientation * prev.accel_body)
            : gravity_compensate(state.orientation, prev.accel_body, params.gravity);
    NavState next = kinematic_step(state, accel_nav, dt);
    next.orientation = orientation_step(state.orientation, prev.gyro, dt);
    state = next;
    states.push_back(state);
  }
  return states;
}

Mat3 orthonormalize_columns(const Mat3& m) {
  Mat3 q;
  q.col(0) = m.col(0).normalized();
  q.col(1) = (m.col(1) - m.col(1).dot(q.col(0)) * q.col(0)).normalized();
  q.col(2) = q.col(0).cross(q.col(1));
  return q;
}

}  // namespace tripose
