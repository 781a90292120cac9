#include "tripose/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "tripose/errors.hpp"
#include "tripose/version.hpp"

namespace tripose {

using nlohmann::json;

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::SigmaA: return "sigma_a";
    case SweepAxis::SigmaOmega: return "sigma_omega";
    case SweepAxis::SigmaD: return "sigma_d";
    case SweepAxis::AcousticRate: return "acoustic_rate";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(const std::string& name) {
  for (SweepAxis axis : {SweepAxis::SigmaA, SweepAxis::SigmaOmega, SweepAxis::SigmaD,
                         SweepAxis::AcousticRate}) {
    if (sweep_axis_name(axis) == name) return axis;
  }
  throw ConfigError("unknown sweep axis: " + name);
}

BeaconMatrix default_beacons() {
  // Ceiling mounts at the four upper corners of the 10 x 5 x 3 room. The set
  // is coplanar, so unconstrained per-vertex trilateration carries an exact
  // mirror ambiguity through the ceiling plane; the triangle constraint is
  // what suppresses it.
  BeaconMatrix b;
  b << 0.1, 0.1, 3.0,
       9.9, 0.1, 3.0,
       9.9, 4.9, 3.0,
       0.1, 4.9, 3.0;
  return b;
}

std::vector<Vec3> default_waypoints() {
  // Elliptical walking loop with a gentle height swing. The ellipse keeps the
  // path curvature continuous, so the spline's jerk stays walking-like
  // everywhere on the loop.
  std::vector<Vec3> loop;
  const int count = 20;
  for (int i = 0; i < count; ++i) {
    const double theta = 2.0 * M_PI * static_cast<double>(i) / count;
    loop.push_back({5.0 + 3.2 * std::cos(theta), 2.5 + 2.0 * std::sin(theta),
                    1.15 + 0.12 * std::sin(2.0 * theta + 0.7)});
  }
  loop.push_back(loop.front());
  return loop;
}

namespace {

[[noreturn]] void fail(const std::string& context, const std::string& message) {
  throw ConfigError(context.empty() ? message : context + ": " + message);
}

void check_keys(const json& node, const std::set<std::string>& allowed,
                const std::string& context) {
  if (!node.is_object()) fail(context, "expected an object");
  for (const auto& item : node.items()) {
    if (!allowed.count(item.key())) {
      fail(context, "unknown key '" + item.key() + "'");
    }
  }
}

double get_number(const json& node, const std::string& key, double fallback,
                  const std::string& context) {
  if (!node.contains(key)) return fallback;
  if (!node[key].is_number()) fail(context, "'" + key + "' must be a number");
  return node[key].get<double>();
}

bool get_bool(const json& node, const std::string& key, bool fallback,
              const std::string& context) {
  if (!node.contains(key)) return fallback;
  if (!node[key].is_boolean()) fail(context, "'" + key + "' must be a boolean");
  return node[key].get<bool>();
}

Vec3 get_vec3(const json& node, const std::string& context) {
  if (!node.is_array() || node.size() != 3) fail(context, "expected [x, y, z]");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!node[static_cast<std::size_t>(i)].is_number()) {
      fail(context, "expected numeric coordinates");
    }
    v(i) = node[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

json vec3_to_json(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

ExperimentConfig parse_config_object(const json& root) {
  check_keys(root,
             {"room", "triangle_side", "imu_rate", "acoustic_rate", "duration",
              "gravity", "free_acceleration", "trajectory", "noise", "measurement",
              "init", "nlos", "algorithms", "gating", "seeds", "sweep"},
             "config");

  ExperimentConfig cfg;

  if (root.contains("room")) {
    const json& room = root["room"];
    check_keys(room, {"size", "beacons"}, "room");
    if (room.contains("size")) {
      const Vec3 size = get_vec3(room["size"], "room.size");
      for (int i = 0; i < 3; ++i) {
        if (!(size(i) > 0.0)) fail("room.size", "dimensions must be positive");
        cfg.room_size[static_cast<std::size_t>(i)] = size(i);
      }
    }
    if (room.contains("beacons")) {
      const json& beacons = room["beacons"];
      if (!beacons.is_array() || beacons.size() != 4) {
        fail("room.beacons", "exactly 4 beacons required");
      }
      for (int j = 0; j < 4; ++j) {
        cfg.beacons.row(j) =
            get_vec3(beacons[static_cast<std::size_t>(j)], "room.beacons").transpose();
      }
    }
  }

  cfg.triangle_side = get_number(root, "triangle_side", cfg.triangle_side, "config");
  if (!(cfg.triangle_side > 0.0)) fail("triangle_side", "must be positive");
  cfg.imu_rate = get_number(root, "imu_rate", cfg.imu_rate, "config");
  cfg.acoustic_rate = get_number(root, "acoustic_rate", cfg.acoustic_rate, "config");
  cfg.duration = get_number(root, "duration", cfg.duration, "config");
  cfg.gravity = get_number(root, "gravity", cfg.gravity, "config");
  cfg.free_acceleration =
      get_bool(root, "free_acceleration", cfg.free_acceleration, "config");
  if (!(cfg.imu_rate > 0.0) || !(cfg.acoustic_rate > 0.0)) {
    fail("config", "rates must be positive");
  }
  if (cfg.acoustic_rate > cfg.imu_rate) {
    fail("config", "acoustic_rate must not exceed imu_rate");
  }
  const double ratio = cfg.imu_rate / cfg.acoustic_rate;
  if (std::abs(ratio - std::round(ratio)) > 1e-9) {
    fail("config", "acoustic_rate must divide imu_rate");
  }
  if (!(cfg.duration > 0.0)) fail("duration", "must be positive");

  if (root.contains("trajectory")) {
    const json& traj = root["trajectory"];
    check_keys(traj,
               {"waypoints", "speed", "yaw_amplitude", "yaw_period", "pitch_amplitude",
                "pitch_period", "roll_amplitude", "roll_period", "phase_yaw",
                "phase_pitch", "phase_roll"},
               "trajectory");
    if (traj.contains("waypoints")) {
      const json& wps = traj["waypoints"];
      if (!wps.is_array() || wps.size() < 2) {
        fail("trajectory.waypoints", "need at least two waypoints");
      }
      cfg.trajectory.waypoints.clear();
      for (const json& wp : wps) {
        cfg.trajectory.waypoints.push_back(get_vec3(wp, "trajectory.waypoints"));
      }
    }
    cfg.trajectory.speed = get_number(traj, "speed", cfg.trajectory.speed, "trajectory");
    OrientationProfile& p = cfg.trajectory.profile;
    p.yaw_amplitude = get_number(traj, "yaw_amplitude", p.yaw_amplitude, "trajectory");
    p.yaw_period = get_number(traj, "yaw_period", p.yaw_period, "trajectory");
    p.pitch_amplitude =
        get_number(traj, "pitch_amplitude", p.pitch_amplitude, "trajectory");
    p.pitch_period = get_number(traj, "pitch_period", p.pitch_period, "trajectory");
    p.roll_amplitude = get_number(traj, "roll_amplitude", p.roll_amplitude, "trajectory");
    p.roll_period = get_number(traj, "roll_period", p.roll_period, "trajectory");
    p.phase_yaw = get_number(traj, "phase_yaw", p.phase_yaw, "trajectory");
    p.phase_pitch = get_number(traj, "phase_pitch", p.phase_pitch, "trajectory");
    p.phase_roll = get_number(traj, "phase_roll", p.phase_roll, "trajectory");
  }
  if (!(cfg.trajectory.speed >= 0.5 && cfg.trajectory.speed <= 3.0)) {
    fail("trajectory.speed", "must lie in [0.5, 3] m/s");
  }

  if (root.contains("noise")) {
    const json& noise = root["noise"];
    check_keys(noise, {"sigma_a", "sigma_omega", "sigma_d", "seed"}, "noise");
    cfg.noise.sigma_a = get_number(noise, "sigma_a", cfg.noise.sigma_a, "noise");
    cfg.noise.sigma_omega =
        get_number(noise, "sigma_omega", cfg.noise.sigma_omega, "noise");
    cfg.noise.sigma_d = get_number(noise, "sigma_d", cfg.noise.sigma_d, "noise");
    if (noise.contains("seed")) {
      if (!noise["seed"].is_number_unsigned()) fail("noise.seed", "must be unsigned");
      cfg.noise.seed = noise["seed"].get<std::uint64_t>();
    }
    if (cfg.noise.sigma_a < 0.0 || cfg.noise.sigma_omega < 0.0 ||
        cfg.noise.sigma_d < 0.0) {
      fail("noise", "sigmas must be nonnegative");
    }
  }

  if (root.contains("measurement")) {
    const json& meas = root["measurement"];
    check_keys(meas, {"sigma_p"}, "measurement");
    cfg.sigma_p = get_number(meas, "sigma_p", cfg.sigma_p, "measurement");
  }

  if (root.contains("init")) {
    const json& init = root["init"];
    check_keys(init,
               {"sigma_p0", "sigma_v0", "sigma_c0", "perturb_position",
                "perturb_velocity", "perturb_angle_deg"},
               "init");
    cfg.init.sigma_p0 = get_number(init, "sigma_p0", cfg.init.sigma_p0, "init");
    cfg.init.sigma_v0 = get_number(init, "sigma_v0", cfg.init.sigma_v0, "init");
    cfg.init.sigma_c0 = get_number(init, "sigma_c0", cfg.init.sigma_c0, "init");
    cfg.init.perturb_position =
        get_number(init, "perturb_position", cfg.init.perturb_position, "init");
    cfg.init.perturb_velocity =
        get_number(init, "perturb_velocity", cfg.init.perturb_velocity, "init");
    cfg.init.perturb_angle_deg =
        get_number(init, "perturb_angle_deg", cfg.init.perturb_angle_deg, "init");
  }

  if (root.contains("nlos") && !root["nlos"].is_null()) {
    const json& nlos = root["nlos"];
    check_keys(nlos, {"beacon_index", "t_start", "duration", "range_low", "range_high"},
               "nlos");
    NlosSpec spec;
    if (nlos.contains("beacon_index")) {
      if (!nlos["beacon_index"].is_number_integer()) {
        fail("nlos.beacon_index", "must be an integer");
      }
      spec.beacon_index = nlos["beacon_index"].get<int>();
    }
    if (spec.beacon_index < 0 || spec.beacon_index > 3) {
      fail("nlos.beacon_index", "must be 0..3");
    }
    spec.t_start = get_number(nlos, "t_start", spec.t_start, "nlos");
    spec.duration = get_number(nlos, "duration", spec.duration, "nlos");
    spec.range_low = get_number(nlos, "range_low", spec.range_low, "nlos");
    spec.range_high = get_number(nlos, "range_high", spec.range_high, "nlos");
    if (!(spec.duration > 0.0) || spec.t_start < 0.0) {
      fail("nlos", "window must be within the trajectory span");
    }
    if (!(spec.range_high > spec.range_low)) {
      fail("nlos", "range_high must exceed range_low");
    }
    cfg.nlos = spec;
  }
  if (cfg.nlos && cfg.nlos->t_start + cfg.nlos->duration > cfg.duration) {
    fail("nlos", "window must be within the trajectory span");
  }

  if (root.contains("algorithms")) {
    const json& algs = root["algorithms"];
    if (!algs.is_array() || algs.empty()) {
      fail("algorithms", "need a non-empty list");
    }
    cfg.algorithms.clear();
    for (const json& a : algs) {
      if (!a.is_string()) fail("algorithms", "entries must be strings");
      cfg.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    }
  }

  if (root.contains("gating")) {
    const std::string gating = root["gating"].is_string()
                                   ? root["gating"].get<std::string>()
                                   : std::string();
    if (gating == "none") {
      cfg.gating = GatingMode::None;
    } else if (gating == "oracle") {
      cfg.gating = GatingMode::Oracle;
    } else {
      fail("gating", "must be 'none' or 'oracle'");
    }
  }

  if (root.contains("seeds")) {
    if (!root["seeds"].is_number_integer()) fail("seeds", "must be an integer");
    cfg.seeds = root["seeds"].get<int>();
    if (cfg.seeds < 1) fail("seeds", "must be at least 1");
  }

  if (root.contains("sweep") && !root["sweep"].is_null()) {
    const json& sweep = root["sweep"];
    check_keys(sweep, {"axis", "values"}, "sweep");
    if (!sweep.contains("axis") || !sweep["axis"].is_string()) {
      fail("sweep", "axis is required");
    }
    SweepSpec spec;
    spec.axis = parse_sweep_axis(sweep["axis"].get<std::string>());
    if (!sweep.contains("values") || !sweep["values"].is_array() ||
        sweep["values"].empty()) {
      fail("sweep.values", "need a non-empty value list");
    }
    for (const json& v : sweep["values"]) {
      if (!v.is_number()) fail("sweep.values", "entries must be numbers");
      spec.values.push_back(v.get<double>());
    }
    cfg.sweep = spec;
  }

  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json root;
  json room;
  room["size"] = json::array({cfg.room_size[0], cfg.room_size[1], cfg.room_size[2]});
  json beacons = json::array();
  for (int j = 0; j < 4; ++j) {
    beacons.push_back(vec3_to_json(cfg.beacons.row(j).transpose()));
  }
  room["beacons"] = beacons;
  root["room"] = room;

  root["triangle_side"] = cfg.triangle_side;
  root["imu_rate"] = cfg.imu_rate;
  root["acoustic_rate"] = cfg.acoustic_rate;
  root["duration"] = cfg.duration;
  root["gravity"] = cfg.gravity;
  root["free_acceleration"] = cfg.free_acceleration;

  json traj;
  json wps = json::array();
  for (const Vec3& wp : cfg.trajectory.waypoints) wps.push_back(vec3_to_json(wp));
  traj["waypoints"] = wps;
  traj["speed"] = cfg.trajectory.speed;
  const OrientationProfile& p = cfg.trajectory.profile;
  traj["yaw_amplitude"] = p.yaw_amplitude;
  traj["yaw_period"] = p.yaw_period;
  traj["pitch_amplitude"] = p.pitch_amplitude;
  traj["pitch_period"] = p.pitch_period;
  traj["roll_amplitude"] = p.roll_amplitude;
  traj["roll_period"] = p.roll_period;
  traj["phase_yaw"] = p.phase_yaw;
  traj["phase_pitch"] = p.phase_pitch;
  traj["phase_roll"] = p.phase_roll;
  root["trajectory"] = traj;

  json noise;
  noise["sigma_a"] = cfg.noise.sigma_a;
  noise["sigma_omega"] = cfg.noise.sigma_omega;
  noise["sigma_d"] = cfg.noise.sigma_d;
  noise["seed"] = cfg.noise.seed;
  root["noise"] = noise;

  root["measurement"] = json{{"sigma_p", cfg.sigma_p}};

  json init;
  init["sigma_p0"] = cfg.init.sigma_p0;
  init["sigma_v0"] = cfg.init.sigma_v0;
  init["sigma_c0"] = cfg.init.sigma_c0;
  init["perturb_position"] = cfg.init.perturb_position;
  init["perturb_velocity"] = cfg.init.perturb_velocity;
  init["perturb_angle_deg"] = cfg.init.perturb_angle_deg;
  root["init"] = init;

  if (cfg.nlos) {
    json nlos;
    nlos["beacon_index"] = cfg.nlos->beacon_index;
    nlos["t_start"] = cfg.nlos->t_start;
    nlos["duration"] = cfg.nlos->duration;
    nlos["range_low"] = cfg.nlos->range_low;
    nlos["range_high"] = cfg.nlos->range_high;
    root["nlos"] = nlos;
  }

  json algs = json::array();
  for (Algorithm a : cfg.algorithms) algs.push_back(algorithm_name(a));
  root["algorithms"] = algs;
  root["gating"] = cfg.gating == GatingMode::Oracle ? "oracle" : "none";
  root["seeds"] = cfg.seeds;

  if (cfg.sweep) {
    json sweep;
    sweep["axis"] = sweep_axis_name(cfg.sweep->axis);
    sweep["values"] = cfg.sweep->values;
    root["sweep"] = sweep;
  }
  return root;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  // A manifest wraps the config it was produced from.
  if (root.is_object() && root.contains("config")) {
    check_keys(root, {"config", "code_version", "seed_offset"}, "manifest");
    return parse_config_object(root["config"]);
  }
  return parse_config_object(root);
}

std::string config_to_json_text(const ExperimentConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (root.is_object() && root.contains("config")) {
    return parse_config_object(root["config"]);
  }
  return parse_config_object(root);
}

std::string manifest_text(const ExperimentConfig& config, int seed_offset) {
  json manifest;
  manifest["code_version"] = kVersionString;
  manifest["seed_offset"] = seed_offset;
  manifest["config"] = config_to_json(config);
  return manifest.dump(2) + "\n";
}

}  // namespace tripose
