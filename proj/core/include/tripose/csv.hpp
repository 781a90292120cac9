#pragma once

#include <string>
#include <vector>

#include "tripose/localization.hpp"
#include "tripose/scenario.hpp"
#include "tripose/strapdown.hpp"
#include "tripose/types.hpp"

namespace tripose {

/// Decimal formatting used for every CSV cell: 9 significant digits, '.'
/// separator, locale-independent.
std::string format_sig9(double value);

void write_imu_csv(const std::string& path, const std::vector<ImuSample>& samples);

/// Strict reader for the IMU stream format (t, ax, ay, az, wx, wy, wz,
/// free_flag). Throws ParseError with the offending line number and
/// NonMonotonicTimestamps on out-of-order rows.
std::vector<ImuSample> ingest_imu_csv(const std::string& path);

void write_range_csv(const std::string& path, const std::vector<RangeEpoch>& epochs);
std::vector<RangeEpoch> ingest_range_csv(const std::string& path);

void write_track_csv(const std::string& path, const Track& track);
Track ingest_track_csv(const std::string& path);

struct MetricsRow {
  std::string algorithm;
  std::uint64_t seed{0};
  MetricsReport report;
};

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);

struct CdfRow {
  std::string algorithm;
  double error_m{0.0};
  double fraction{0.0};
};

void write_cdf_csv(const std::string& path, const std::vector<CdfRow>& rows);

struct SweepRow {
  std::string axis;
  double value{0.0};
  std::string algorithm;
  std::uint64_t seed{0};
  double rmse_avg{0.0};
};

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace tripose
