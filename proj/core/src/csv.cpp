#include "tripose/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tripose/errors.hpp"

namespace tripose {

std::string format_sig9(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open for reading: " + path);
  return in;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& field, long line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw ParseError("cannot parse number '" + field + "'", line_no);
  }
}

void expect_header(std::ifstream& in, const std::string& expected,
                   const std::string& path) {
  std::string header;
  if (!std::getline(in, header)) {
    throw ParseError("missing header in " + path, 1);
  }
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != expected) {
    throw ParseError("unexpected header '" + header + "', expected '" + expected + "'",
                     1);
  }
}

constexpr const char* kImuHeader = "t,ax,ay,az,wx,wy,wz,free_flag";
constexpr const char* kRangeHeader =
    "t,r11,r12,r13,r14,r21,r22,r23,r24,r31,r32,r33,r34,los1,los2,los3,los4";
constexpr const char* kTrackHeader =
    "t,px,py,pz,vx,vy,vz,c11,c12,c13,c21,c22,c23,c31,c32,c33";

}  // namespace

void write_imu_csv(const std::string& path, const std::vector<ImuSample>& samples) {
  std::ofstream out = open_out(path);
  out << kImuHeader << '\n';
  for (const ImuSample& s : samples) {
    out << format_sig9(s.t);
    for (int i = 0; i < 3; ++i) out << ',' << format_sig9(s.accel_body(i));
    for (int i = 0; i < 3; ++i) out << ',' << format_sig9(s.gyro(i));
    out << ',' << (s.is_free_acceleration ? 1 : 0) << '\n';
  }
}

std::vector<ImuSample> ingest_imu_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_header(in, kImuHeader, path);

  std::vector<ImuSample> samples;
  std::string line;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 8) {
      throw ParseError("expected 8 fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    ImuSample s;
    s.t = parse_double(fields[0], line_no);
    for (int i = 0; i < 3; ++i) s.accel_body(i) = parse_double(fields[1 + i], line_no);
    for (int i = 0; i < 3; ++i) s.gyro(i) = parse_double(fields[4 + i], line_no);
    const std::string& flag = fields[7];
    if (flag != "0" && flag != "1") {
      throw ParseError("free_flag must be 0 or 1, got '" + flag + "'", line_no);
    }
    s.is_free_acceleration = flag == "1";
    if (!samples.empty() && !(s.t > samples.back().t)) {
      throw NonMonotonicTimestamps("non-increasing timestamp at line " +
                                   std::to_string(line_no));
    }
    samples.push_back(s);
  }
  return samples;
}

void write_range_csv(const std::string& path, const std::vector<RangeEpoch>& epochs) {
  std::ofstream out = open_out(path);
  out << kRangeHeader << '\n';
  for (const RangeEpoch& e : epochs) {
    out << format_sig9(e.t);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 4; ++j) out << ',' << format_sig9(e.ranges.r(i, j));
    }
    for (int j = 0; j < 4; ++j) {
      out << ',' << (e.ranges.los[static_cast<std::size_t>(j)] ? 1 : 0);
    }
    out << '\n';
  }
}

std::vector<RangeEpoch> ingest_range_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_header(in, kRangeHeader, path);

  std::vector<RangeEpoch> epochs;
  std::string line;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 17) {
      throw ParseError("expected 17 fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    RangeEpoch e;
    e.t = parse_double(fields[0], line_no);
    int f = 1;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 4; ++j) e.ranges.r(i, j) = parse_double(fields[f++], line_no);
    }
    for (int j = 0; j < 4; ++j) {
      const std::string& flag = fields[f++];
      if (flag != "0" && flag != "1") {
        throw ParseError("los flag must be 0 or 1, got '" + flag + "'", line_no);
      }
      e.ranges.los[static_cast<std::size_t>(j)] = flag == "1";
    }
    if (!epochs.empty() && !(e.t > epochs.back().t)) {
      throw NonMonotonicTimestamps("non-increasing timestamp at line " +
                                   std::to_string(line_no));
    }
    epochs.push_back(e);
  }
  return epochs;
}

void write_track_csv(const std::string& path, const Track& track) {
  std::ofstream out = open_out(path);
  out << kTrackHeader << '\n';
  for (const TrackSample& s : track) {
    out << format_sig9(s.t);
    for (int i = 0; i < 3; ++i) out << ',' << format_sig9(s.position(i));
    for (int i = 0; i < 3; ++i) out << ',' << format_sig9(s.velocity(i));
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) out << ',' << format_sig9(s.orientation(r, c));
    }
    out << '\n';
  }
}

Track ingest_track_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_header(in, kTrackHeader, path);

  Track track;
  std::string line;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 16) {
      throw ParseError("expected 16 fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    TrackSample s;
    s.t = parse_double(fields[0], line_no);
    for (int i = 0; i < 3; ++i) s.position(i) = parse_double(fields[1 + i], line_no);
    for (int i = 0; i < 3; ++i) s.velocity(i) = parse_double(fields[4 + i], line_no);
    int f = 7;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) s.orientation(r, c) = parse_double(fields[f++], line_no);
    }
    if (!track.empty() && !(s.t > track.back().t)) {
      throw NonMonotonicTimestamps("non-increasing timestamp at line " +
                                   std::to_string(line_no));
    }
    track.push_back(s);
  }
  return track;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out = open_out(path);
  out << "algorithm,seed,rmse_v1,rmse_v2,rmse_v3,rmse_avg,yaw_rmse,pitch_rmse,roll_rmse\n";
  for (const MetricsRow& row : rows) {
    out << row.algorithm << ',' << row.seed;
    for (int i = 0; i < 3; ++i) out << ',' << format_sig9(row.report.vertex_rmse(i));
    out << ',' << format_sig9(row.report.rmse_avg)
        << ',' << format_sig9(row.report.yaw_rmse_deg)
        << ',' << format_sig9(row.report.pitch_rmse_deg)
        << ',' << format_sig9(row.report.roll_rmse_deg) << '\n';
  }
}

void write_cdf_csv(const std::string& path, const std::vector<CdfRow>& rows) {
  std::ofstream out = open_out(path);
  out << "algorithm,error_m,fraction\n";
  for (const CdfRow& row : rows) {
    out << row.algorithm << ',' << format_sig9(row.error_m) << ','
        << format_sig9(row.fraction) << '\n';
  }
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out = open_out(path);
  out << "axis,value,algorithm,seed,rmse_avg\n";
  for (const SweepRow& row : rows) {
    out << row.axis << ',' << format_sig9(row.value) << ',' << row.algorithm << ','
        << row.seed << ',' << format_sig9(row.rmse_avg) << '\n';
  }
}

}  // namespace tripose
