#include "tripose/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tripose/errors.hpp"

namespace tripose {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

constexpr std::uint64_t kImuStream = 0x1a6e;
constexpr std::uint64_t kRangeStream = 0x2b7f;
constexpr std::uint64_t kNlosStream = 0x3c90;

// Natural or periodic cubic spline through (time, value) knots, one scalar
// coordinate per instance. Periodic splines assume value.front() == value.back().
class CubicSpline {
 public:
  CubicSpline(std::vector<double> times, std::vector<double> values, bool periodic)
      : t_(std::move(times)), y_(std::move(values)), periodic_(periodic) {
    const int n = static_cast<int>(t_.size());
    m_.assign(n, 0.0);
    if (n < 3) return;  // two knots: linear segment, zero curvature

    if (!periodic_) {
      const int interior = n - 2;
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(interior, interior);
      Eigen::VectorXd b(interior);
      for (int i = 1; i <= interior; ++i) {
        const double h0 = t_[i] - t_[i - 1];
        const double h1 = t_[i + 1] - t_[i];
        const int r = i - 1;
        if (r > 0) a(r, r - 1) = h0 / 6.0;
        a(r, r) = (h0 + h1) / 3.0;
        if (r < interior - 1) a(r, r + 1) = h1 / 6.0;
        b(r) = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
      }
      const Eigen::VectorXd sol = a.partialPivLu().solve(b);
      for (int i = 0; i < interior; ++i) m_[i + 1] = sol(i);
    } else {
      // Unknowns m_0..m_{n-2}; m_{n-1} = m_0 by periodicity.
      const int dim = n - 1;
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
      Eigen::VectorXd b(dim);
      auto h = [&](int i) { return t_[i + 1] - t_[i]; };
      auto slope = [&](int i) { return (y_[i + 1] - y_[i]) / h(i); };
      for (int i = 0; i < dim; ++i) {
        const int prev = (i + dim - 1) % dim;
        const double hp = h(prev);
        const double hi = h(i);
        a(i, prev) += hp / 6.0;
        a(i, i) += (hp + hi) / 3.0;
        a(i, (i + 1) % dim) += hi / 6.0;
        b(i) = slope(i) - slope(prev);
      }
      const Eigen::VectorXd sol = a.partialPivLu().solve(b);
      for (int i = 0; i < dim; ++i) m_[i] = sol(i);
      m_[n - 1] = m_[0];
    }
  }

  double duration() const { return t_.back() - t_.front(); }

  void eval(double t, double* value, double* deriv, double* second) const {
    if (periodic_) {
      const double span = duration();
      t = t_.front() + std::fmod(t - t_.front(), span);
      if (t < t_.front()) t += span;
    } else {
      t = std::clamp(t, t_.front(), t_.back());
    }
    const auto upper = std::upper_bound(t_.begin(), t_.end(), t);
    int i = static_cast<int>(std::distance(t_.begin(), upper)) - 1;
    i = std::clamp(i, 0, static_cast<int>(t_.size()) - 2);

    const double hseg = t_[i + 1] - t_[i];
    const double a = (t_[i + 1] - t) / hseg;
    const double b = (t - t_[i]) / hseg;
    *value = a * y_[i] + b * y_[i + 1] +
             ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * hseg * hseg / 6.0;
    *deriv = (y_[i + 1] - y_[i]) / hseg -
             (3.0 * a * a - 1.0) * hseg * m_[i] / 6.0 +
             (3.0 * b * b - 1.0) * hseg * m_[i + 1] / 6.0;
    *second = a * m_[i] + b * m_[i + 1];
  }

 private:
  std::vector<double> t_;
  std::vector<double> y_;
  bool periodic_;
  std::vector<double> m_;  // second derivatives at knots
};

struct EulerState {
  Vec3 angles;  // yaw, pitch, roll (rad)
  Vec3 rates;
};

EulerState profile_angles(const OrientationProfile& profile, double t) {
  auto wave = [](double amplitude, double period, double phase, double time,
                 double* rate) {
    const double w = 2.0 * M_PI / period;
    *rate = amplitude * w * std::cos(w * time + phase);
    return amplitude * std::sin(w * time + phase);
  };
  EulerState s;
  Vec3 r;
  s.angles(0) = wave(profile.yaw_amplitude, profile.yaw_period, profile.phase_yaw, t, &r(0));
  s.angles(1) =
      wave(profile.pitch_amplitude, profile.pitch_period, profile.phase_pitch, t, &r(1));
  s.angles(2) =
      wave(profile.roll_amplitude, profile.roll_period, profile.phase_roll, t, &r(2));
  s.rates = r;
  return s;
}

Mat3 rotation_zyx(const Vec3& ypr) {
  return (Eigen::AngleAxisd(ypr(0), Vec3::UnitZ()) *
          Eigen::AngleAxisd(ypr(1), Vec3::UnitY()) *
          Eigen::AngleAxisd(ypr(2), Vec3::UnitX()))
      .toRotationMatrix();
}

// Body angular velocity from Z-Y-X Euler angles and their rates.
Vec3 body_rates(const Vec3& ypr, const Vec3& ypr_rates) {
  const double pitch = ypr(1);
  const double roll = ypr(2);
  const double yaw_dot = ypr_rates(0);
  const double pitch_dot = ypr_rates(1);
  const double roll_dot = ypr_rates(2);
  return {roll_dot - yaw_dot * std::sin(pitch),
          pitch_dot * std::cos(roll) + yaw_dot * std::cos(pitch) * std::sin(roll),
          -pitch_dot * std::sin(roll) + yaw_dot * std::cos(pitch) * std::cos(roll)};
}

}  // namespace

Trajectory generate_trajectory(const std::vector<Vec3>& waypoints, double speed,
                               double imu_rate, double duration,
                               const OrientationProfile& profile) {
  if (waypoints.size() < 2) {
    throw InvalidWaypoints("need at least two waypoints");
  }
  if (!(speed >= 0.5 && speed <= 3.0)) {
    throw InvalidWaypoints("speed outside the [0.5, 3] m/s band");
  }
  if (!(imu_rate > 0.0) || !(duration > 0.0)) {
    throw InvalidWaypoints("rate and duration must be positive");
  }

  const bool closed = (waypoints.front() - waypoints.back()).norm() < 1e-12;
  std::vector<double> times(waypoints.size(), 0.0);
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const double dist = (waypoints[i] - waypoints[i - 1]).norm();
    if (dist <= 0.0) {
      throw InvalidWaypoints("consecutive waypoints coincide");
    }
    times[i] = times[i - 1] + dist / speed;
  }

  std::vector<double> xs, ys, zs;
  for (const Vec3& w : waypoints) {
    xs.push_back(w.x());
    ys.push_back(w.y());
    zs.push_back(w.z());
  }
  const CubicSpline sx(times, xs, closed);
  const CubicSpline sy(times, ys, closed);
  const CubicSpline sz(times, zs, closed);

  const double horizon = closed ? duration : std::min(duration, times.back());
  const double dt = 1.0 / imu_rate;
  const auto count = static_cast<std::size_t>(std::floor(horizon * imu_rate)) + 1;

  Trajectory traj;
  traj.dt = dt;
  traj.samples.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) * dt;
    TrajectorySample s;
    s.t = t;
    Vec3 p, v, a;
    sx.eval(t, &p.x(), &v.x(), &a.x());
    sy.eval(t, &p.y(), &v.y(), &a.y());
    sz.eval(t, &p.z(), &v.z(), &a.z());
    const EulerState euler = profile_angles(profile, t);
    s.pose.position = p;
    s.pose.orientation = rotation_zyx(euler.angles);
    s.velocity = v;
    s.accel_nav = a;
    s.omega_body = body_rates(euler.angles, euler.rates);
    traj.samples.push_back(s);
  }
  return traj;
}

std::vector<ImuSample> synthesize_imu(const Trajectory& traj, const NoiseSpec& noise,
                                      bool free_acceleration, double gravity) {
  std::mt19937_64 rng = stream_rng(noise.seed, kImuStream);
  std::normal_distribution<double> unit;

  std::vector<ImuSample> samples;
  samples.reserve(traj.samples.size());
  for (const TrajectorySample& s : traj.samples) {
    ImuSample imu;
    imu.t = s.t;
    imu.is_free_acceleration = free_acceleration;
    Vec3 accel_nav = s.accel_nav;
    if (!free_acceleration) {
      accel_nav.z() += gravity;  // specific force includes -gravity reaction
    }
    imu.accel_body = s.pose.orientation.transpose() * accel_nav;
    imu.gyro = s.omega_body;
    for (int i = 0; i < 3; ++i) {
      imu.accel_body(i) += noise.sigma_a * unit(rng);
      imu.gyro(i) += noise.sigma_omega * unit(rng);
    }
    samples.push_back(imu);
  }
  return samples;
}

std::vector<RangeEpoch> synthesize_ranges(const Trajectory& traj,
                                          const BeaconMatrix& beacons,
                                          const ManifoldParams& params,
                                          const NoiseSpec& noise,
                                          const std::optional<NlosSpec>& nlos,
                                          double acoustic_rate) {
  const double imu_rate = 1.0 / traj.dt;
  const double ratio = imu_rate / acoustic_rate;
  const auto stride = static_cast<std::size_t>(std::lround(ratio));
  if (stride == 0 || std::abs(ratio - static_cast<double>(stride)) > 1e-9) {
    throw ConfigError("acoustic rate must divide the IMU rate");
  }

  std::mt19937_64 range_rng = stream_rng(noise.seed, kRangeStream);
  std::mt19937_64 nlos_rng = stream_rng(noise.seed, kNlosStream);
  std::normal_distribution<double> unit;

  std::vector<RangeEpoch> epochs;
  epochs.reserve(traj.samples.size() / stride + 1);
  for (std::size_t k = 0; k < traj.samples.size(); k += stride) {
    const TrajectorySample& s = traj.samples[k];
    RangeEpoch epoch;
    epoch.t = s.t;
    epoch.sample_index = k;

    const VertexSet vertices = vertices_from_pose(s.pose, params);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 4; ++j) {
        epoch.ranges.r(i, j) =
            (vertices.col(i) - beacons.row(j).transpose()).norm() +
            noise.sigma_d * unit(range_rng);
      }
    }
    if (nlos.has_value() && s.t >= nlos->t_start &&
        s.t < nlos->t_start + nlos->duration) {
      std::uniform_real_distribution<double> corrupt(nlos->range_low, nlos->range_high);
      const int j = nlos->beacon_index;
      for (int i = 0; i < 3; ++i) {
        epoch.ranges.r(i, j) = corrupt(nlos_rng);
      }
      epoch.ranges.los[static_cast<std::size_t>(j)] = false;
    }
    epochs.push_back(epoch);
  }
  return epochs;
}

std::string algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::LkfGn: return "lkf-gn";
    case Algorithm::LkfRtr: return "lkf-rtr";
    case Algorithm::OneRx: return "1rx";
    case Algorithm::PcGn: return "pc-gn";
    case Algorithm::PcRsd: return "pc-rsd";
    case Algorithm::PcRtr: return "pc-rtr";
    case Algorithm::EkfGn: return "ekf-gn";
    case Algorithm::EkfRsd: return "ekf-rsd";
    case Algorithm::EkfRtr: return "ekf-rtr";
    case Algorithm::UkfGn: return "ukf-gn";
    case Algorithm::UkfRsd: return "ukf-rsd";
    case Algorithm::UkfRtr: return "ukf-rtr";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm alg :
       {Algorithm::LkfGn, Algorithm::LkfRtr, Algorithm::OneRx, Algorithm::PcGn,
        Algorithm::PcRsd, Algorithm::PcRtr, Algorithm::EkfGn, Algorithm::EkfRsd,
        Algorithm::EkfRtr, Algorithm::UkfGn, Algorithm::UkfRsd, Algorithm::UkfRtr}) {
    if (algorithm_name(alg) == name) return alg;
  }
  throw ConfigError("unknown algorithm name: " + name);
}

namespace {

enum class LocalSolver { Gn, Rsd, Rtr, SingleRx };

struct AlgorithmTraits {
  bool orientation_filter;  // 15-state EKF/UKF vs centroid LKF
  FilterKind kind;
  LocalSolver solver;
  bool project;
};

AlgorithmTraits traits_of(Algorithm alg) {
  switch (alg) {
    case Algorithm::LkfGn: return {false, FilterKind::Ekf, LocalSolver::Gn, false};
    case Algorithm::LkfRtr: return {false, FilterKind::Ekf, LocalSolver::Rtr, false};
    case Algorithm::OneRx: return {false, FilterKind::Ekf, LocalSolver::SingleRx, false};
    case Algorithm::PcGn: return {false, FilterKind::Ekf, LocalSolver::Gn, false};
    case Algorithm::PcRsd: return {false, FilterKind::Ekf, LocalSolver::Rsd, false};
    case Algorithm::PcRtr: return {false, FilterKind::Ekf, LocalSolver::Rtr, false};
    // The manifold projection is the final step of the proposed (Riemannian)
    // variants; the GN benchmarks run the same orientation-state filter
    // without it.
    case Algorithm::EkfGn: return {true, FilterKind::Ekf, LocalSolver::Gn, false};
    case Algorithm::EkfRsd: return {true, FilterKind::Ekf, LocalSolver::Rsd, true};
    case Algorithm::EkfRtr: return {true, FilterKind::Ekf, LocalSolver::Rtr, true};
    case Algorithm::UkfGn: return {true, FilterKind::Ukf, LocalSolver::Gn, false};
    case Algorithm::UkfRsd: return {true, FilterKind::Ukf, LocalSolver::Rsd, true};
    case Algorithm::UkfRtr: return {true, FilterKind::Ukf, LocalSolver::Rtr, true};
  }
  throw ConfigError("unhandled algorithm");
}

std::array<bool, 4> active_beacons(const RangeSet& ranges, GatingMode gating) {
  if (gating == GatingMode::Oracle) return ranges.los;
  return {true, true, true, true};
}

int count_active(const std::array<bool, 4>& active) {
  int n = 0;
  for (bool a : active) n += a ? 1 : 0;
  return n;
}

VertexSet solve_vertices(LocalSolver solver, const BeaconMatrix& beacons,
                         const RangeSet& ranges, const VertexSet& warm_start,
                         const ManifoldParams& manifold,
                         const std::array<bool, 4>& active) {
  SolverOptions opts;
  opts.active = active;
  if (solver == LocalSolver::Gn) {
    return gn_solve(beacons, ranges, warm_start, opts).vertices;
  }
  if (solver == LocalSolver::SingleRx) {
    throw Error("single-receiver solver has no vertex solve");
  }

  auto riemannian = [&](const VertexSet& start) {
    return solver == LocalSolver::Rsd
               ? rsd_solve(beacons, ranges, start, manifold, opts)
               : rtr_solve(beacons, ranges, start, manifold, opts);
  };
  SolverReport report = riemannian(retract_nearest(warm_start, manifold));

  // Tracking solves are local; after a stretch of corrupted data the warm
  // start can sit in a spurious basin. The cold-start recipe (unconstrained
  // solve projected onto the manifold) re-acquires whenever it wins on cost.
  const TargetMatrix targets = linearize_targets(beacons, ranges);
  const VertexSet cold_start = retract_nearest(
      gn_solve(beacons, ranges, warm_start, opts).vertices, manifold);
  if (localization_cost(cold_start, beacons, targets, active) < report.final_cost) {
    const SolverReport reacquired = riemannian(cold_start);
    if (reacquired.final_cost < report.final_cost) {
      report = reacquired;
    }
  }
  return report.vertices;
}

Track run_orientation_filter(const Trajectory& traj, const std::vector<ImuSample>& imu,
                             const std::vector<RangeEpoch>& epochs,
                             const AlgorithmTraits& traits, const PipelineConfig& cfg) {
  const GeometryOffsets offsets = GeometryOffsets::regular(cfg.manifold);

  FilterState init;
  init.set_position(cfg.init_state.position);
  init.set_velocity(cfg.init_state.velocity);
  init.set_orientation(cfg.init_state.orientation);
  Mat15 p0 = Mat15::Identity();
  p0.block<3, 3>(0, 0) *= cfg.init_sigma(0) * cfg.init_sigma(0);
  p0.block<3, 3>(3, 3) *= cfg.init_sigma(1) * cfg.init_sigma(1);
  p0.block<9, 9>(6, 6) *= cfg.init_sigma(2) * cfg.init_sigma(2);
  init.covariance = p0;

  PoseFilterOptions opts;
  opts.input_noise = cfg.input_noise;
  opts.measurement_noise = cfg.sigma_p * cfg.sigma_p * Mat9::Identity();
  opts.dt = cfg.imu_dt;
  opts.gravity = cfg.gravity;
  PoseFilter filter(traits.kind, init, offsets, cfg.manifold, opts);

  // The localization stage runs as a standalone tracker: each solve starts
  // from the previous acoustic solution, never from the filter prediction.
  Pose start_pose;
  start_pose.position = cfg.init_state.position;
  start_pose.orientation = cfg.init_state.orientation;
  VertexSet acoustic_track = vertices_from_pose(start_pose, cfg.manifold);

  Track track;
  track.reserve(traj.samples.size());
  auto epoch_it = epochs.begin();
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    if (epoch_it != epochs.end() && epoch_it->sample_index == k) {
      const std::array<bool, 4> active = active_beacons(epoch_it->ranges, cfg.gating);
      if (count_active(active) >= 3) {
        const VertexSet solved = solve_vertices(traits.solver, cfg.beacons,
                                                epoch_it->ranges, acoustic_track,
                                                cfg.manifold, active);
        acoustic_track = solved;
        filter.update(Eigen::Map<const Vec9>(solved.data()));
        if (traits.project) filter.project();
      }
      ++epoch_it;
    }
    track.push_back({traj.samples[k].t, filter.state().position(),
                     filter.state().velocity(), filter.state().orientation()});
    if (k + 1 < traj.samples.size()) filter.predict(imu[k]);
  }
  return track;
}

Track run_centroid_filter(const Trajectory& traj, const std::vector<ImuSample>& imu,
                          const std::vector<RangeEpoch>& epochs,
                          const AlgorithmTraits& traits, const PipelineConfig& cfg) {
  const GeometryOffsets offsets = GeometryOffsets::regular(cfg.manifold);
  const bool single_rx = traits.solver == LocalSolver::SingleRx;
  const Vec3 rx1_offset = offsets.offsets.col(0);

  Mat6 p0 = Mat6::Identity();
  p0.block<3, 3>(0, 0) *= cfg.init_sigma(0) * cfg.init_sigma(0);
  p0.block<3, 3>(3, 3) *= cfg.init_sigma(1) * cfg.init_sigma(1);

  const Vec3 accel_sigma = Vec3::Constant(std::sqrt(cfg.input_noise(0, 0)));
  Vec3 init_position = cfg.init_state.position;
  if (single_rx) {
    init_position += cfg.init_state.orientation * rx1_offset;
  }
  CentroidKalman filter(init_position, cfg.init_state.velocity,
                        cfg.init_state.orientation, p0, accel_sigma, cfg.gravity);

  const double var_centroid = cfg.sigma_p * cfg.sigma_p / 3.0;
  const Mat3 r_centroid = var_centroid * Mat3::Identity();
  const Mat3 r_single = cfg.sigma_p * cfg.sigma_p * Mat3::Identity();

  // Standalone acoustic tracker state, as for the orientation filters.
  Pose start_pose;
  start_pose.position = cfg.init_state.position;
  start_pose.orientation = cfg.init_state.orientation;
  VertexSet acoustic_track = vertices_from_pose(start_pose, cfg.manifold);
  Vec3 point_track = start_pose.position + start_pose.orientation * rx1_offset;

  Track track;
  track.reserve(traj.samples.size());
  auto epoch_it = epochs.begin();
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    if (epoch_it != epochs.end() && epoch_it->sample_index == k) {
      const std::array<bool, 4> active = active_beacons(epoch_it->ranges, cfg.gating);
      if (count_active(active) >= 3) {
        if (single_rx) {
          const Vec3 solved = gn_solve_point(
              cfg.beacons, epoch_it->ranges.r.row(0).transpose(), point_track, active);
          point_track = solved;
          filter.update(solved, r_single);
        } else {
          const VertexSet solved = solve_vertices(traits.solver, cfg.beacons,
                                                  epoch_it->ranges, acoustic_track,
                                                  cfg.manifold, active);
          acoustic_track = solved;
          filter.update(solved.rowwise().mean(), r_centroid);
        }
      }
      ++epoch_it;
    }
    const Vec3 centroid =
        single_rx ? Vec3(filter.position() - filter.ins_orientation() * rx1_offset)
                  : filter.position();
    track.push_back({traj.samples[k].t, centroid, filter.velocity(),
                     filter.ins_orientation()});
    if (k + 1 < traj.samples.size()) filter.predict(imu[k], cfg.imu_dt);
  }
  return track;
}

}  // namespace

Track run_pipeline(const Trajectory& traj, const std::vector<ImuSample>& imu,
                   const std::vector<RangeEpoch>& epochs, Algorithm algorithm,
                   const PipelineConfig& config) {
  if (imu.size() != traj.samples.size()) {
    throw MisalignedTracks("IMU stream does not match the trajectory sampling");
  }
  const AlgorithmTraits traits = traits_of(algorithm);
  if (traits.orientation_filter) {
    return run_orientation_filter(traj, imu, epochs, traits, config);
  }
  return run_centroid_filter(traj, imu, epochs, traits, config);
}

Vec3 rotation_to_euler_deg(const Mat3& c) {
  const double rad2deg = 180.0 / M_PI;
  const double sin_pitch = -c(2, 0);
  if (std::abs(sin_pitch) >= 1.0 - 1e-12) {
    // Gimbal lock: roll folded into yaw.
    const double pitch = (sin_pitch > 0.0 ? 90.0 : -90.0);
    const double yaw = std::atan2(-c(0, 1), c(1, 1)) * rad2deg;
    return {yaw, pitch, 0.0};
  }
  return {std::atan2(c(1, 0), c(0, 0)) * rad2deg,
          std::asin(sin_pitch) * rad2deg,
          std::atan2(c(2, 1), c(2, 2)) * rad2deg};
}

Mat3 euler_deg_to_rotation(const Vec3& ypr_deg) {
  const double deg2rad = M_PI / 180.0;
  return (Eigen::AngleAxisd(ypr_deg(0) * deg2rad, Vec3::UnitZ()) *
          Eigen::AngleAxisd(ypr_deg(1) * deg2rad, Vec3::UnitY()) *
          Eigen::AngleAxisd(ypr_deg(2) * deg2rad, Vec3::UnitX()))
      .toRotationMatrix();
}

namespace {

double wrap_deg(double angle) {
  angle = std::fmod(angle + 180.0, 360.0);
  if (angle < 0.0) angle += 360.0;
  return angle - 180.0;
}

}  // namespace

double MetricsReport::cdf_at(double error_m) const {
  if (epoch_mean_errors_sorted.empty()) return 0.0;
  const auto upper = std::upper_bound(epoch_mean_errors_sorted.begin(),
                                      epoch_mean_errors_sorted.end(), error_m);
  return static_cast<double>(std::distance(epoch_mean_errors_sorted.begin(), upper)) /
         static_cast<double>(epoch_mean_errors_sorted.size());
}

double MetricsReport::cdf_pooled_at(double error_m) const {
  if (pooled_errors_sorted.empty()) return 0.0;
  const auto upper = std::upper_bound(pooled_errors_sorted.begin(),
                                      pooled_errors_sorted.end(), error_m);
  return static_cast<double>(std::distance(pooled_errors_sorted.begin(), upper)) /
         static_cast<double>(pooled_errors_sorted.size());
}

MetricsReport compute_metrics(const Trajectory& truth, const Track& estimate,
                              const GeometryOffsets& offsets) {
  if (truth.samples.size() != estimate.size()) {
    throw MisalignedTracks("track length differs from the truth trajectory");
  }

  MetricsReport report;
  const std::size_t n = estimate.size();
  Vec3 sq_sum = Vec3::Zero();
  Vec3 euler_sq_sum = Vec3::Zero();
  report.epoch_mean_errors_sorted.reserve(n);
  report.pooled_errors_sorted.reserve(3 * n);

  for (std::size_t k = 0; k < n; ++k) {
    const TrajectorySample& ts = truth.samples[k];
    const TrackSample& es = estimate[k];
    if (std::abs(ts.t - es.t) > 1e-9) {
      throw MisalignedTracks("timestamps differ between truth and estimate");
    }
    double mean_err = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Vec3 true_vertex =
          ts.pose.position + ts.pose.orientation * offsets.offsets.col(i);
      const Vec3 est_vertex = es.position + es.orientation * offsets.offsets.col(i);
      const double err = (est_vertex - true_vertex).norm();
      sq_sum(i) += err * err;
      mean_err += err / 3.0;
      report.pooled_errors_sorted.push_back(err);
    }
    report.epoch_mean_errors_sorted.push_back(mean_err);

    const Vec3 true_euler = rotation_to_euler_deg(ts.pose.orientation);
    const Vec3 est_euler = rotation_to_euler_deg(es.orientation);
    for (int i = 0; i < 3; ++i) {
      const double delta = wrap_deg(est_euler(i) - true_euler(i));
      euler_sq_sum(i) += delta * delta;
    }
  }

  report.vertex_rmse = (sq_sum / static_cast<double>(n)).cwiseSqrt();
  report.rmse_avg = report.vertex_rmse.mean();
  report.yaw_rmse_deg = std::sqrt(euler_sq_sum(0) / static_cast<double>(n));
  report.pitch_rmse_deg = std::sqrt(euler_sq_sum(1) / static_cast<double>(n));
  report.roll_rmse_deg = std::sqrt(euler_sq_sum(2) / static_cast<double>(n));
  std::sort(report.epoch_mean_errors_sorted.begin(),
            report.epoch_mean_errors_sorted.end());
  std::sort(report.pooled_errors_sorted.begin(), report.pooled_errors_sorted.end());
  return report;
}

double vertex_rmse_between(const Trajectory& truth, const Track& estimate,
                           const GeometryOffsets& offsets, double t_begin,
                           double t_end) {
  if (truth.samples.size() != estimate.size()) {
    throw MisalignedTracks("track length differs from the truth trajectory");
  }
  double sq_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < estimate.size(); ++k) {
    const double t = truth.samples[k].t;
    if (t < t_begin || t >= t_end) continue;
    for (int i = 0; i < 3; ++i) {
      const Vec3 true_vertex = truth.samples[k].pose.position +
                               truth.samples[k].pose.orientation * offsets.offsets.col(i);
      const Vec3 est_vertex =
          estimate[k].position + estimate[k].orientation * offsets.offsets.col(i);
      sq_sum += (est_vertex - true_vertex).squaredNorm();
    }
    ++count;
  }
  if (count == 0) return 0.0;
  return std::sqrt(sq_sum / (3.0 * static_cast<double>(count)));
}

}  // namespace tripose
