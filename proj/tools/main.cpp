#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "tripose/config.hpp"
#include "tripose/csv.hpp"
#include "tripose/errors.hpp"
#include "tripose/experiment.hpp"
#include "tripose/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

int do_run(const std::string& config_path, const std::string& out_dir, int workers,
           int seed_offset) {
  const tripose::ExperimentConfig config = tripose::load_config(config_path);
  if (config.sweep) {
    throw tripose::ConfigError("config contains a sweep block; use the sweep subcommand");
  }
  const tripose::RunOutput output =
      tripose::execute_runs(config, workers, seed_offset, /*keep_first_seed_tracks=*/true);
  tripose::write_run_artifacts(config, output, out_dir, seed_offset);
  std::printf("run: %d algorithm(s) x %d seed(s) -> %s\n",
              static_cast<int>(config.algorithms.size()), config.seeds,
              out_dir.c_str());
  return kExitOk;
}

int do_sweep(const std::string& config_path, const std::string& out_dir, int workers,
             int seed_offset) {
  const tripose::ExperimentConfig config = tripose::load_config(config_path);
  if (!config.sweep) {
    throw tripose::ConfigError("config has no sweep block; use the run subcommand");
  }
  const tripose::SweepOutput output =
      tripose::execute_sweep(config, workers, seed_offset);
  tripose::write_sweep_artifacts(config, output, out_dir, seed_offset);
  std::printf("sweep: %zu point(s) x %d seed(s) -> %s\n",
              config.sweep->values.size(), config.seeds, out_dir.c_str());
  return kExitOk;
}

int do_ingest_check(const std::string& path) {
  const auto samples = tripose::ingest_imu_csv(path);
  std::printf("ok: %zu samples, t in [%s, %s] s\n", samples.size(),
              samples.empty() ? "-" : tripose::format_sig9(samples.front().t).c_str(),
              samples.empty() ? "-" : tripose::format_sig9(samples.back().t).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acoustic/inertial pose tracking simulator and benchmark harness"};
  app.set_version_flag("--version", tripose::kVersionString);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string ingest_path;
  int workers = 0;  // 0: hardware concurrency
  int seed_offset = 0;

  CLI::App* run = app.add_subcommand("run", "Run one experiment configuration");
  run->add_option("--config", config_path, "JSON config or manifest")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--workers", workers, "Worker threads (0 = auto)");
  run->add_option("--seed-offset", seed_offset, "Offset added to every seed");

  CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("--config", config_path, "JSON config with a sweep block")
      ->required();
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--workers", workers, "Worker threads (0 = auto)");
  sweep->add_option("--seed-offset", seed_offset, "Offset added to every seed");

  CLI::App* ingest = app.add_subcommand("ingest-check", "Validate an IMU CSV file");
  ingest->add_option("file", ingest_path, "IMU CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(config_path, out_dir, workers, seed_offset);
    if (sweep->parsed()) return do_sweep(config_path, out_dir, workers, seed_offset);
    if (ingest->parsed()) return do_ingest_check(ingest_path);
  } catch (const tripose::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const tripose::ParseError& e) {
    std::fprintf(stderr, "parse error (line %ld): %s\n", e.line, e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
