#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "svcvv/dataio.hpp"
#include "svcvv/parallel.hpp"
#include "svcvv/png_io.hpp"
#include "svcvv/svc_model.hpp"
#include "svcvv/synth.hpp"
#include "svcvv/vv_estimator.hpp"

// Frame-stream drivers: the per-frame histogram analysis runs in parallel,
// the previous-frame smoothing is a single ordered pass.
namespace svcvv::pipeline {

struct VvSeries {
  std::vector<double> t;
  std::vector<double> theta;  // deg
  std::vector<Vec3> vv;       // m/s^2
};

inline std::vector<FrameAngle> analyze_frames(
    std::size_t n, const std::function<ColorImage(std::size_t)>& frame_at,
    unsigned threads = 0) {
  std::vector<FrameAngle> raw(n);
  parallel_for(n, [&](std::size_t i) { raw[i] = analyze_frame(frame_at(i)); }, threads);
  return raw;
}

inline VvSeries smooth_series(const std::vector<FrameAngle>& raw, const std::vector<double>& t) {
  VvSeries out;
  out.t = t;
  out.theta.reserve(raw.size());
  out.vv.reserve(raw.size());
  VvEstimatorState state;
  for (const auto& frame : raw) {
    const double theta = update_theta(frame, state);
    out.theta.push_back(theta);
    out.vv.push_back(vv_vector(theta));
  }
  return out;
}

inline VvSeries estimate_from_manifest(const dataio::FrameManifest& frames,
                                       unsigned threads = 0) {
  const auto raw = analyze_frames(
      frames.paths.size(), [&](std::size_t i) { return pngio::read_png(frames.paths[i]); },
      threads);
  return smooth_series(raw, frames.t);
}

inline VvSeries estimate_from_scenes(const std::vector<synth::SceneSpec>& scenes,
                                     const std::vector<double>& t, unsigned threads = 0) {
  const auto raw = analyze_frames(
      scenes.size(), [&](std::size_t i) { return synth::render_scene(scenes[i]); }, threads);
  return smooth_series(raw, t);
}

// Assembles the model input series from a synchronized IMU grid and a VV
// series (zero-order held onto the grid).
inline SvcInputSeries make_inputs(const dataio::ImuSeries& imu, const VvSeries& vv) {
  SvcInputSeries in;
  in.t.reserve(imu.samples.size());
  in.u.reserve(imu.samples.size());
  for (const auto& s : imu.samples) {
    in.t.push_back(s.t);
    in.u.push_back({s.a, s.w, dataio::zoh(vv.t, vv.vv, s.t)});
  }
  return in;
}

// Duplicated-trial inputs: raw per-frame angles are tiled n times, the
// smoothing pass runs over the full duplicated stream, and the IMU grid is
// concatenated with continuous timestamps.
inline SvcInputSeries make_duplicated_inputs(const dataio::ImuSeries& imu,
                                             const std::vector<FrameAngle>& raw, int n) {
  const dataio::ImuSeries imu_dup = dataio::duplicate_trial(imu, n);
  std::vector<double> t_dup(imu_dup.samples.size());
  for (std::size_t i = 0; i < t_dup.size(); ++i) t_dup[i] = imu_dup.samples[i].t;
  const VvSeries vv = smooth_series(dataio::tile(raw, n), t_dup);
  return make_inputs(imu_dup, vv);
}

inline void write_vv_csv(std::ostream& out, const VvSeries& vv) {
  out << "frame_index,timestamp_s,theta_vv_deg,vv_x,vv_y,vv_z\n";
  for (std::size_t i = 0; i < vv.t.size(); ++i) {
    out << i << ',' << dataio::detail::fmt_g9(vv.t[i]) << ','
        << dataio::detail::fmt_g9(vv.theta[i]) << ',' << dataio::detail::fmt_g9(vv.vv[i].x) << ','
        << dataio::detail::fmt_g9(vv.vv[i].y) << ',' << dataio::detail::fmt_g9(vv.vv[i].z)
        << "\n";
  }
}

inline void write_msi_csv(std::ostream& out, const MsiTrace& trace) {
  out << "t_s,msi_pct,dv_norm,dvv_norm,ghat_x,ghat_y,ghat_z,vs_x,vs_y,vs_z\n";
  for (const auto& s : trace) {
    out << dataio::detail::fmt_g9(s.t) << ',' << dataio::detail::fmt_g9(s.msi) << ','
        << dataio::detail::fmt_g9(s.dv_norm) << ',' << dataio::detail::fmt_g9(s.dvv_norm) << ','
        << dataio::detail::fmt_g9(s.g_hat.x) << ',' << dataio::detail::fmt_g9(s.g_hat.y) << ','
        << dataio::detail::fmt_g9(s.g_hat.z) << ',' << dataio::detail::fmt_g9(s.v_s.x) << ','
        << dataio::detail::fmt_g9(s.v_s.y) << ',' << dataio::detail::fmt_g9(s.v_s.z) << "\n";
  }
}

}  // namespace svcvv::pipeline
