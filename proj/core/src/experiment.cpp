#include "tripose/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "tripose/errors.hpp"

namespace tripose {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kInitStream = 0x4da1;

NavState perturbed_init(const ExperimentConfig& config, const Trajectory& truth,
                        std::uint64_t seed) {
  NavState init;
  const TrajectorySample& first = truth.samples.front();
  init.position = first.pose.position;
  init.velocity = first.velocity;
  init.orientation = first.pose.orientation;

  const InitConfig& ic = config.init;
  if (ic.perturb_position > 0.0 || ic.perturb_velocity > 0.0 ||
      ic.perturb_angle_deg > 0.0) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(kInitStream)));
    std::normal_distribution<double> unit;
    for (int i = 0; i < 3; ++i) init.position(i) += ic.perturb_position * unit(rng);
    for (int i = 0; i < 3; ++i) init.velocity(i) += ic.perturb_velocity * unit(rng);
    if (ic.perturb_angle_deg > 0.0) {
      Vec3 axis_angle;
      const double scale = ic.perturb_angle_deg * M_PI / 180.0;
      for (int i = 0; i < 3; ++i) axis_angle(i) = scale * unit(rng);
      const double angle = axis_angle.norm();
      if (angle > 0.0) {
        init.orientation =
            init.orientation *
            Eigen::AngleAxisd(angle, axis_angle / angle).toRotationMatrix();
      }
    }
  }
  return init;
}

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(i) for i in [0, count) across a bounded worker pool. Exceptions are
// rethrown on the caller thread after all workers join.
template <typename Fn>
void parallel_for(int count, int workers, Fn&& fn) {
  workers = std::min(resolve_workers(workers), std::max(count, 1));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          fn(i);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

SeedOutcome run_one_seed(const ExperimentConfig& config, const Trajectory& truth,
                         std::uint64_t seed, bool keep_tracks) {
  SeedOutcome outcome;
  outcome.seed = seed;

  const std::vector<ImuSample> imu = build_imu(config, truth, seed);
  const std::vector<RangeEpoch> ranges = build_ranges(config, truth, seed);
  const PipelineConfig pipeline = build_pipeline_config(config, truth, seed);
  const GeometryOffsets offsets = GeometryOffsets::regular(pipeline.manifold);

  for (Algorithm alg : config.algorithms) {
    Track track = run_pipeline(truth, imu, ranges, alg, pipeline);
    outcome.metrics.emplace_back(alg, compute_metrics(truth, track, offsets));
    if (keep_tracks) outcome.tracks.emplace(alg, std::move(track));
  }
  return outcome;
}

std::vector<CdfRow> cdf_rows_for(const std::string& label,
                                 const std::vector<double>& sorted_errors) {
  std::vector<CdfRow> rows;
  const std::size_t n = sorted_errors.size();
  if (n == 0) return rows;
  const std::size_t stride = std::max<std::size_t>(1, n / 400);
  for (std::size_t i = stride - 1; i < n; i += stride) {
    rows.push_back({label, sorted_errors[i],
                    static_cast<double>(i + 1) / static_cast<double>(n)});
  }
  if (rows.back().fraction < 1.0) {
    rows.push_back({label, sorted_errors[n - 1], 1.0});
  }
  return rows;
}

}  // namespace

Trajectory build_truth(const ExperimentConfig& config) {
  return generate_trajectory(config.trajectory.waypoints, config.trajectory.speed,
                             config.imu_rate, config.duration,
                             config.trajectory.profile);
}

PipelineConfig build_pipeline_config(const ExperimentConfig& config,
                                     const Trajectory& truth, std::uint64_t seed) {
  PipelineConfig pipeline;
  pipeline.beacons = config.beacons;
  pipeline.manifold.side = config.triangle_side;
  pipeline.imu_dt = 1.0 / config.imu_rate;
  pipeline.gravity = config.gravity;
  pipeline.gating = config.gating;
  // The filter's assumed input noise gets a tiny floor: with Q exactly zero
  // the gains decay harmonically and unmodeled discretization error then
  // accumulates without correction.
  const double sigma_a_eff = std::max(config.noise.sigma_a, 1e-4);
  const double sigma_omega_eff = std::max(config.noise.sigma_omega, 1e-4);
  Vec6 q_diag;
  q_diag << Vec3::Constant(sigma_a_eff * sigma_a_eff),
      Vec3::Constant(sigma_omega_eff * sigma_omega_eff);
  pipeline.input_noise = q_diag.asDiagonal();
  pipeline.sigma_p = config.effective_sigma_p();
  pipeline.init_sigma =
      Vec3(config.init.sigma_p0, config.init.sigma_v0, config.init.sigma_c0);
  pipeline.init_state = perturbed_init(config, truth, seed);
  return pipeline;
}

std::vector<ImuSample> build_imu(const ExperimentConfig& config,
                                 const Trajectory& truth, std::uint64_t seed) {
  NoiseSpec noise = config.noise;
  noise.seed = seed;
  return synthesize_imu(truth, noise, config.free_acceleration, config.gravity);
}

std::vector<RangeEpoch> build_ranges(const ExperimentConfig& config,
                                     const Trajectory& truth, std::uint64_t seed) {
  NoiseSpec noise = config.noise;
  noise.seed = seed;
  ManifoldParams params;
  params.side = config.triangle_side;
  return synthesize_ranges(truth, config.beacons, params, noise, config.nlos,
                           config.acoustic_rate);
}

RunOutput execute_runs(const ExperimentConfig& config, int workers, int seed_offset,
                       bool keep_first_seed_tracks) {
  RunOutput output;
  output.truth = build_truth(config);
  output.seeds.resize(static_cast<std::size_t>(config.seeds));

  parallel_for(config.seeds, workers, [&](int i) {
    const std::uint64_t seed =
        config.noise.seed + static_cast<std::uint64_t>(seed_offset + i);
    output.seeds[static_cast<std::size_t>(i)] =
        run_one_seed(config, output.truth, seed, keep_first_seed_tracks && i == 0);
  });
  return output;
}

void write_run_artifacts(const ExperimentConfig& config, const RunOutput& output,
                         const std::string& out_dir, int seed_offset) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  {
    std::ofstream manifest(dir / "manifest.json");
    if (!manifest) throw Error("cannot write manifest in " + out_dir);
    manifest << manifest_text(config, seed_offset);
  }

  Track truth_track;
  truth_track.reserve(output.truth.samples.size());
  for (const TrajectorySample& s : output.truth.samples) {
    truth_track.push_back({s.t, s.pose.position, s.velocity, s.pose.orientation});
  }
  write_track_csv((dir / "truth_track.csv").string(), truth_track);

  if (!output.seeds.empty()) {
    for (const auto& [alg, track] : output.seeds.front().tracks) {
      write_track_csv((dir / ("track_" + algorithm_name(alg) + ".csv")).string(),
                      track);
    }
  }

  std::vector<MetricsRow> metric_rows;
  for (Algorithm alg : config.algorithms) {
    for (const SeedOutcome& seed : output.seeds) {
      for (const auto& [a, report] : seed.metrics) {
        if (a == alg) {
          metric_rows.push_back({algorithm_name(alg), seed.seed, report});
        }
      }
    }
  }
  write_metrics_csv((dir / "metrics.csv").string(), metric_rows);

  // Per-sample mean-vertex-error CDF plus the pooled per-vertex variant,
  // both merged across seeds; pooled rows carry a ":pooled" suffix.
  std::vector<CdfRow> cdf_rows;
  for (Algorithm alg : config.algorithms) {
    std::vector<double> mean_errors;
    std::vector<double> pooled_errors;
    for (const SeedOutcome& seed : output.seeds) {
      for (const auto& [a, report] : seed.metrics) {
        if (a == alg) {
          mean_errors.insert(mean_errors.end(), report.epoch_mean_errors_sorted.begin(),
                             report.epoch_mean_errors_sorted.end());
          pooled_errors.insert(pooled_errors.end(), report.pooled_errors_sorted.begin(),
                               report.pooled_errors_sorted.end());
        }
      }
    }
    std::sort(mean_errors.begin(), mean_errors.end());
    std::sort(pooled_errors.begin(), pooled_errors.end());
    const std::string name = algorithm_name(alg);
    for (const CdfRow& row : cdf_rows_for(name, mean_errors)) cdf_rows.push_back(row);
    for (const CdfRow& row : cdf_rows_for(name + ":pooled", pooled_errors)) {
      cdf_rows.push_back(row);
    }
  }
  write_cdf_csv((dir / "cdf.csv").string(), cdf_rows);
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& config, SweepAxis axis,
                                   double value) {
  ExperimentConfig out = config;
  out.sweep.reset();
  switch (axis) {
    case SweepAxis::SigmaA:
      out.noise.sigma_a = value;
      break;
    case SweepAxis::SigmaOmega:
      out.noise.sigma_omega = value;
      break;
    case SweepAxis::SigmaD:
      out.noise.sigma_d = value;
      break;
    case SweepAxis::AcousticRate:
      out.acoustic_rate = value;
      break;
  }
  return out;
}

SweepOutput execute_sweep(const ExperimentConfig& config, int workers, int seed_offset) {
  if (!config.sweep) throw ConfigError("config has no sweep block");
  const SweepSpec& sweep = *config.sweep;

  const Trajectory truth = build_truth(config);
  const int points = static_cast<int>(sweep.values.size());
  const int tasks = points * config.seeds;

  SweepOutput output;
  output.rows.resize(static_cast<std::size_t>(tasks) * config.algorithms.size());

  parallel_for(tasks, workers, [&](int task) {
    const int point = task / config.seeds;
    const int seed_index = task % config.seeds;
    const ExperimentConfig point_config =
        apply_sweep_value(config, sweep.axis, sweep.values[static_cast<std::size_t>(point)]);
    const std::uint64_t seed =
        config.noise.seed + static_cast<std::uint64_t>(seed_offset + seed_index);
    const SeedOutcome outcome = run_one_seed(point_config, truth, seed, false);

    std::size_t slot = static_cast<std::size_t>(task) * config.algorithms.size();
    for (const auto& [alg, report] : outcome.metrics) {
      output.rows[slot++] = {sweep_axis_name(sweep.axis),
                             sweep.values[static_cast<std::size_t>(point)],
                             algorithm_name(alg), seed, report.rmse_avg};
    }
  });
  return output;
}

void write_sweep_artifacts(const ExperimentConfig& config, const SweepOutput& output,
                           const std::string& out_dir, int seed_offset) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  {
    std::ofstream manifest(dir / "manifest.json");
    if (!manifest) throw Error("cannot write manifest in " + out_dir);
    manifest << manifest_text(config, seed_offset);
  }
  write_sweep_csv((dir / "sweep.csv").string(), output.rows);
}

}  // namespace tripose
