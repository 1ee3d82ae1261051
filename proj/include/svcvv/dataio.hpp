#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "svcvv/vec3.hpp"

// Ingestion and synchronization of IMU + frame recordings. A trial on disk
// is a `trial.json` manifest next to an IMU CSV and a directory of
// `frame_%06d.png` images; all paths are relative to the manifest.
namespace svcvv::dataio {

struct ImuSample {
  double t = 0.0;  // s
  Vec3 a;          // gravito-inertial acceleration, m/s^2
  Vec3 w;          // angular velocity, rad/s
};

struct ImuSeries {
  std::vector<ImuSample> samples;
  double rate = 0.0;  // Hz, 0 when not uniformly sampled

  double duration() const {
    if (samples.empty()) return 0.0;
    if (rate > 0.0) return static_cast<double>(samples.size()) / rate;
    return samples.back().t - samples.front().t;
  }
};

struct FrameManifest {
  std::vector<double> t;
  std::vector<std::string> paths;
  int width = 640;
  int height = 360;
};

struct TrialBundle {
  ImuSeries imu;
  FrameManifest frames;
};

inline constexpr const char* kImuHeader = "t,ax,ay,az,wx,wy,wz";

namespace detail {
inline std::string fmt_g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}
}  // namespace detail

inline ImuSeries parse_imu_csv(std::istream& in, const std::string& name = "<stream>") {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(name + ": empty IMU CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kImuHeader) {
    throw std::runtime_error(name + ":1: expected header '" + kImuHeader + "', got '" + line + "'");
  }

  ImuSeries series;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    double vals[7];
    for (int k = 0; k < 7; ++k) {
      if (!std::getline(ss, field, ',') || field.empty()) {
        throw std::runtime_error(name + ":" + std::to_string(lineno) + ": expected 7 fields");
      }
      try {
        std::size_t used = 0;
        vals[k] = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw std::runtime_error(name + ":" + std::to_string(lineno) + ": bad number '" + field +
                                 "'");
      }
    }
    if (std::getline(ss, field, ',')) {
      throw std::runtime_error(name + ":" + std::to_string(lineno) + ": expected 7 fields");
    }
    ImuSample s{vals[0], {vals[1], vals[2], vals[3]}, {vals[4], vals[5], vals[6]}};
    if (!series.samples.empty() && s.t <= series.samples.back().t) {
      throw std::runtime_error(name + ":" + std::to_string(lineno) +
                               ": timestamps must be strictly increasing");
    }
    series.samples.push_back(s);
  }
  return series;
}

inline ImuSeries parse_imu_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open IMU CSV: " + path.string());
  return parse_imu_csv(in, path.string());
}

inline void write_imu_csv(std::ostream& out, const ImuSeries& series) {
  out << kImuHeader << "\n";
  for (const auto& s : series.samples) {
    out << detail::fmt_g9(s.t) << ',' << detail::fmt_g9(s.a.x) << ',' << detail::fmt_g9(s.a.y)
        << ',' << detail::fmt_g9(s.a.z) << ',' << detail::fmt_g9(s.w.x) << ','
        << detail::fmt_g9(s.w.y) << ',' << detail::fmt_g9(s.w.z) << "\n";
  }
}

inline void write_imu_csv(const std::filesystem::path& path, const ImuSeries& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot create IMU CSV: " + path.string());
  write_imu_csv(out, series);
}

inline std::string frame_filename(long index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06ld.png", index);
  return buf;
}

inline TrialBundle load_trial(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(manifest_path.string() + ": invalid JSON: " + e.what());
  }
  for (const char* key : {"imu", "frames_dir", "frame_times"}) {
    if (!j.contains(key)) {
      throw std::runtime_error(manifest_path.string() + ": missing key '" + key + "'");
    }
  }
  const auto base = manifest_path.parent_path();

  TrialBundle trial;
  trial.imu = parse_imu_csv(base / j["imu"].get<std::string>());
  if (j.contains("rate_hz")) trial.imu.rate = j["rate_hz"].get<double>();

  const auto frames_dir = base / j["frames_dir"].get<std::string>();
  trial.frames.t = j["frame_times"].get<std::vector<double>>();
  trial.frames.width = j.value("width", 640);
  trial.frames.height = j.value("height", 360);
  for (std::size_t i = 0; i < trial.frames.t.size(); ++i) {
    if (i > 0 && trial.frames.t[i] <= trial.frames.t[i - 1]) {
      throw std::runtime_error(manifest_path.string() + ": frame_times must be increasing");
    }
    trial.frames.paths.push_back((frames_dir / frame_filename(static_cast<long>(i))).string());
  }
  if (trial.frames.t.empty()) {
    throw std::runtime_error(manifest_path.string() + ": no frames listed");
  }
  return trial;
}

inline void write_trial_manifest(const std::filesystem::path& dir,
                                 const std::vector<double>& frame_times, double rate_hz,
                                 int width, int height) {
  nlohmann::json j;
  j["imu"] = "imu.csv";
  j["frames_dir"] = "frames";
  j["frame_times"] = frame_times;
  j["rate_hz"] = rate_hz;
  j["width"] = width;
  j["height"] = height;
  std::ofstream out(dir / "trial.json");
  if (!out) throw std::runtime_error("cannot create manifest in " + dir.string());
  out << j.dump(2) << "\n";
}

// Resamples both streams onto a shared uniform grid over their time
// overlap. IMU channels are interpolated linearly; each grid tick takes
// the latest frame at or before it.
inline std::pair<ImuSeries, FrameManifest> resample_sync(const ImuSeries& imu,
                                                         const FrameManifest& frames,
                                                         double rate = 60.0) {
  if (imu.samples.size() < 2) throw std::runtime_error("resample_sync: need >= 2 IMU samples");
  if (frames.t.empty()) throw std::runtime_error("resample_sync: no frames");
  const double start = std::max(imu.samples.front().t, frames.t.front());
  const double end = std::min(imu.samples.back().t, frames.t.back());
  if (end < start) throw std::runtime_error("resample_sync: streams do not overlap in time");

  ImuSeries out_imu;
  out_imu.rate = rate;
  FrameManifest out_frames;
  out_frames.width = frames.width;
  out_frames.height = frames.height;

  std::size_t imu_idx = 0;
  std::size_t frame_idx = 0;
  const double dt = 1.0 / rate;
  // half-tick slop so rounded stream timestamps cannot drop the last tick
  for (long k = 0;; ++k) {
    const double t = start + static_cast<double>(k) * dt;
    if (t > end + 0.5 * dt) break;
    while (imu_idx + 2 < imu.samples.size() && imu.samples[imu_idx + 1].t <= t) ++imu_idx;
    const auto& s0 = imu.samples[imu_idx];
    const auto& s1 = imu.samples[imu_idx + 1];
    const double a = std::clamp((t - s0.t) / (s1.t - s0.t), 0.0, 1.0);
    out_imu.samples.push_back({t, s0.a * (1.0 - a) + s1.a * a, s0.w * (1.0 - a) + s1.w * a});
    while (frame_idx + 1 < frames.t.size() && frames.t[frame_idx + 1] <= t + 1e-9) ++frame_idx;
    out_frames.t.push_back(t);
    out_frames.paths.push_back(frames.paths[frame_idx]);
  }
  return {std::move(out_imu), std::move(out_frames)};
}

// Concatenates n copies back to back with continuous timestamps; the time
// offset per copy is the trial duration (sample count / rate for uniform
// series).
inline ImuSeries duplicate_trial(const ImuSeries& series, int n = 10) {
  if (n < 1) throw std::invalid_argument("duplicate_trial: n must be >= 1");
  if (series.samples.empty()) return series;
  const double period = series.duration() == 0.0 ? 0.0 : series.duration();
  ImuSeries out;
  out.rate = series.rate;
  out.samples.reserve(series.samples.size() * static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    const double offset = static_cast<double>(c) * period;
    for (const auto& s : series.samples) {
      out.samples.push_back({s.t + offset, s.a, s.w});
    }
  }
  return out;
}

// Same duplication for any per-tick payload series sharing the IMU grid.
template <typename T>
std::vector<T> tile(const std::vector<T>& v, int n) {
  if (n < 1) throw std::invalid_argument("tile: n must be >= 1");
  std::vector<T> out;
  out.reserve(v.size() * static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) out.insert(out.end(), v.begin(), v.end());
  return out;
}

// Zero-order hold: value of the latest frame at or before t.
template <typename T>
const T& zoh(const std::vector<double>& times, const std::vector<T>& values, double t) {
  if (times.empty() || times.size() != values.size()) {
    throw std::invalid_argument("zoh: malformed series");
  }
  if (t < times.front() - 1e-12) {
    throw std::out_of_range("zoh: query before first sample");
  }
  const auto it = std::upper_bound(times.begin(), times.end(), t + 1e-12);
  const auto idx = static_cast<std::size_t>(std::distance(times.begin(), it));
  return values[idx == 0 ? 0 : idx - 1];
}

}  // namespace svcvv::dataio
