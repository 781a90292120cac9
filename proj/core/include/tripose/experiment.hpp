#pragma once

#include <map>
#include <string>
#include <vector>

#include "tripose/config.hpp"
#include "tripose/csv.hpp"
#include "tripose/scenario.hpp"

namespace tripose {

struct SeedOutcome {
  std::uint64_t seed{0};
  std::vector<std::pair<Algorithm, MetricsReport>> metrics;
  std::map<Algorithm, Track> tracks;  // retained only when requested
};

struct RunOutput {
  Trajectory truth;
  std::vector<SeedOutcome> seeds;
};

/// Runs every (algorithm, seed) combination of the config. Seeds execute in up
/// to `workers` threads; results are merged in seed order so worker count
/// never affects the output.
RunOutput execute_runs(const ExperimentConfig& config, int workers, int seed_offset,
                       bool keep_first_seed_tracks);

/// Writes manifest, truth track, the first seed's estimate tracks, the metrics
/// table, and the CDF table into out_dir.
void write_run_artifacts(const ExperimentConfig& config, const RunOutput& output,
                         const std::string& out_dir, int seed_offset);

struct SweepOutput {
  std::vector<SweepRow> rows;
};

/// One run per (sweep value, seed); emits the long-format RMSE table.
SweepOutput execute_sweep(const ExperimentConfig& config, int workers, int seed_offset);

void write_sweep_artifacts(const ExperimentConfig& config, const SweepOutput& output,
                           const std::string& out_dir, int seed_offset);

/// Applies one sweep-axis value to a copy of the config.
ExperimentConfig apply_sweep_value(const ExperimentConfig& config, SweepAxis axis,
                                   double value);

/// Builds the trajectory and per-seed measurement streams + pipeline config
/// the runner uses; exposed so tests and the acceptance suite share one code
/// path with the CLI.
Trajectory build_truth(const ExperimentConfig& config);
PipelineConfig build_pipeline_config(const ExperimentConfig& config,
                                     const Trajectory& truth, std::uint64_t seed);
std::vector<ImuSample> build_imu(const ExperimentConfig& config,
                                 const Trajectory& truth, std::uint64_t seed);
std::vector<RangeEpoch> build_ranges(const ExperimentConfig& config,
                                     const Trajectory& truth, std::uint64_t seed);

}  // namespace tripose
