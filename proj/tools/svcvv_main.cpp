// svcvv: batch pipeline from synchronized IMU + camera recordings to
// visual-vertical estimates and motion-sickness-incidence traces, plus a
// synthetic trial generator.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "svcvv/dataio.hpp"
#include "svcvv/metrics.hpp"
#include "svcvv/parallel.hpp"
#include "svcvv/pipeline.hpp"
#include "svcvv/png_io.hpp"
#include "svcvv/svc_model.hpp"
#include "svcvv/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace svcvv;

namespace {

constexpr double kRate = 60.0;

struct CommonOpts {
  std::string manifest;
  std::string out_dir = ".";
  unsigned threads = 0;
};

fs::path ensure_out_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

// Frames repeated on the synchronized grid are analyzed once per distinct
// image, then mapped back to ticks.
std::vector<FrameAngle> analyze_manifest_frames(const dataio::FrameManifest& frames,
                                                unsigned threads) {
  std::vector<std::string> unique_paths;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::size_t> tick_to_unique(frames.paths.size());
  for (std::size_t i = 0; i < frames.paths.size(); ++i) {
    const auto [it, inserted] = index.try_emplace(frames.paths[i], unique_paths.size());
    if (inserted) unique_paths.push_back(frames.paths[i]);
    tick_to_unique[i] = it->second;
  }
  std::vector<FrameAngle> unique_raw(unique_paths.size());
  parallel_for(unique_paths.size(),
               [&](std::size_t i) { unique_raw[i] = analyze_frame(pngio::read_png(unique_paths[i])); },
               threads);
  std::vector<FrameAngle> raw(frames.paths.size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = unique_raw[tick_to_unique[i]];
  return raw;
}

synth::SceneSpec parse_scene(const json& j) {
  synth::SceneSpec scene;
  if (j.contains("kind")) scene.kind = synth::scene_kind_from_string(j["kind"].get<std::string>());
  scene.roll_deg = j.value("roll_deg", scene.roll_deg);
  scene.line_spacing = j.value("line_spacing", scene.line_spacing);
  scene.line_width = j.value("line_width", scene.line_width);
  scene.noise_std = j.value("noise_std", scene.noise_std);
  scene.width = j.value("width", scene.width);
  scene.height = j.value("height", scene.height);
  return scene;
}

synth::TrajectorySpec parse_trajectory(const json& j) {
  synth::TrajectorySpec t;
  t.pylon_spacing = j.value("pylon_spacing", t.pylon_spacing);
  t.speed = j.value("speed", t.speed);
  t.max_lat_acc = j.value("max_lat_acc", t.max_lat_acc);
  t.n_pylons = j.value("n_pylons", t.n_pylons);
  t.head_roll_gain = j.value("head_roll_gain", t.head_roll_gain);
  t.slalom_amp = j.value("slalom_amp", t.slalom_amp);
  t.turn_acc = j.value("turn_acc", t.turn_acc);
  t.rest_s = j.value("rest_s", t.rest_s);
  return t;
}

void write_frames(const fs::path& dir, const std::vector<synth::SceneSpec>& scenes,
                  unsigned threads) {
  fs::create_directories(dir);
  parallel_for(scenes.size(), [&](std::size_t i) {
    pngio::write_png((dir / dataio::frame_filename(static_cast<long>(i))).string(),
                     synth::render_scene(scenes[i]));
  }, threads);
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir, long seed_override,
              unsigned threads) {
  std::ifstream in(spec_path);
  if (!in) throw std::runtime_error("cannot open spec file: " + spec_path);
  json spec;
  in >> spec;

  const std::string kind = spec.value("kind", "slalom");
  synth::SceneSpec scene = parse_scene(spec.value("scene", json::object()));
  scene.seed = seed_override >= 0 ? static_cast<std::uint64_t>(seed_override)
                                  : spec.value("seed", 1ULL);

  const fs::path out = ensure_out_dir(out_dir);
  dataio::ImuSeries imu;
  std::vector<synth::SceneSpec> frame_scenes;

  if (kind == "slalom") {
    const auto traj = parse_trajectory(spec.value("trajectory", json::object()));
    const synth::SlalomTrial trial = synth::slalom_trajectory(traj, 1.0 / kRate);
    imu = trial.imu;
    frame_scenes = synth::slalom_scenes(trial, scene);
  } else if (kind == "static_suite") {
    std::vector<double> angles{-50, -40, -30, -20, -10, 0, 10, 20, 30, 40, 50};
    if (spec.contains("angles")) angles = spec["angles"].get<std::vector<double>>();
    const double hold_s = spec.value("hold_s", 3.0);
    const synth::StaticSuite suite = synth::static_pose_suite(angles, scene, hold_s, kRate);
    imu = suite.imu;
    frame_scenes = suite.frame_scenes;
  } else {
    throw std::runtime_error("unknown synth kind: " + kind + " (expected slalom|static_suite)");
  }

  dataio::write_imu_csv(out / "imu.csv", imu);
  write_frames(out / "frames", frame_scenes, threads);
  std::vector<double> frame_times(imu.samples.size());
  for (std::size_t i = 0; i < frame_times.size(); ++i) frame_times[i] = imu.samples[i].t;
  dataio::write_trial_manifest(out, frame_times, kRate, scene.width, scene.height);
  std::cout << "wrote " << frame_scenes.size() << " frames (" << imu.duration()
            << " s at " << kRate << " Hz) to " << out.string() << "\n";
  return 0;
}

int cmd_vv(const CommonOpts& opts) {
  const dataio::TrialBundle trial = dataio::load_trial(opts.manifest);
  const auto [imu, frames] = dataio::resample_sync(trial.imu, trial.frames, kRate);
  const auto raw = analyze_manifest_frames(frames, opts.threads);
  const pipeline::VvSeries vv = pipeline::smooth_series(raw, frames.t);

  const fs::path out = ensure_out_dir(opts.out_dir);
  std::ofstream csv(out / "vv.csv");
  pipeline::write_vv_csv(csv, vv);
  std::cout << "wrote " << vv.t.size() << " VV rows to " << (out / "vv.csv").string() << "\n";
  return 0;
}

int cmd_msi(const CommonOpts& opts, const std::string& model, const std::string& params_file,
            double dt, int dup) {
  ModelParams params = ModelParams::named(model);
  if (!params_file.empty()) params.apply_overrides(params_file);
  if (dup < 1) throw std::runtime_error("--dup must be >= 1");

  const dataio::TrialBundle trial = dataio::load_trial(opts.manifest);
  const auto [imu, frames] = dataio::resample_sync(trial.imu, trial.frames, kRate);
  const auto raw = analyze_manifest_frames(frames, opts.threads);

  // Direction statistics on the single (un-duplicated) trial.
  const pipeline::VvSeries vv_single = pipeline::smooth_series(raw, frames.t);
  std::vector<double> t_grid, theta_g_series;
  std::vector<Vec3> omega_series;
  for (const auto& s : imu.samples) {
    t_grid.push_back(s.t);
    omega_series.push_back(s.w);
  }
  const auto g_series = gravity_track(t_grid, omega_series, imu.samples.front().a);
  for (const auto& g : g_series) theta_g_series.push_back(theta_g(g));

  const SvcInputSeries inputs = pipeline::make_duplicated_inputs(imu, raw, dup);
  const MsiTrace trace = simulate(inputs, params, dt);

  const fs::path out = ensure_out_dir(opts.out_dir);
  {
    std::ofstream csv(out / "msi.csv");
    pipeline::write_msi_csv(csv, trace);
  }

  json report;
  report["model"] = model;
  report["duplicates"] = dup;
  report["dt_s"] = dt;
  report["trial_duration_s"] = imu.duration();
  report["final_msi_pct"] = trace.back().msi;
  report["vv_mad_deg"] = metrics::mad(vv_single.theta, theta_g_series);
  report["vv_sd_deg"] = metrics::std_dev(vv_single.theta);
  report["theta_g_sd_deg"] = metrics::std_dev(theta_g_series);
  {
    std::ofstream js(out / "metrics.json");
    js << report.dump(2) << "\n";
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_static_eval(const CommonOpts& opts) {
  const dataio::TrialBundle trial = dataio::load_trial(opts.manifest);
  const auto [imu, frames] = dataio::resample_sync(trial.imu, trial.frames, kRate);
  const auto raw = analyze_manifest_frames(frames, opts.threads);
  const pipeline::VvSeries vv = pipeline::smooth_series(raw, frames.t);

  // Static head: the measured GIA is the gravitational acceleration.
  std::vector<double> theta_gravity;
  theta_gravity.reserve(imu.samples.size());
  for (const auto& s : imu.samples) theta_gravity.push_back(theta_g(s.a));

  const auto reg = metrics::linear_regression(vv.theta, theta_gravity);
  const double mad = metrics::mad(vv.theta, theta_gravity);

  json report;
  report["frames"] = vv.t.size();
  report["slope"] = reg.slope;
  report["intercept_deg"] = reg.intercept;
  report["r_squared"] = reg.r_squared;
  report["mad_deg"] = mad;
  const fs::path out = ensure_out_dir(opts.out_dir);
  {
    std::ofstream js(out / "static_eval.json");
    js << report.dump(2) << "\n";
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"6-DoF SVC motion-sickness model with image-based visual vertical"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string model = "svc_vv";
  std::string params_file;
  std::string spec_file;
  double dt = 1.0 / 60.0;
  int dup = 10;
  long seed = -1;

  auto add_common = [&](CLI::App* cmd, bool needs_manifest) {
    if (needs_manifest) {
      cmd->add_option("--manifest", opts.manifest, "trial.json path")->required();
    }
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--threads", opts.threads, "worker threads (0 = all cores)");
  };

  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic trial bundle");
  synth_cmd->add_option("--spec", spec_file, "synthesis spec JSON")->required();
  synth_cmd->add_option("--seed", seed, "override the spec seed");
  add_common(synth_cmd, false);

  CLI::App* vv_cmd = app.add_subcommand("vv", "estimate per-frame visual vertical");
  add_common(vv_cmd, true);

  CLI::App* msi_cmd = app.add_subcommand("msi", "run the full model on a trial");
  add_common(msi_cmd, true);
  msi_cmd->add_option("--model", model, "conventional|svc_vv");
  msi_cmd->add_option("--params", params_file, "key=value parameter overrides");
  msi_cmd->add_option("--dt", dt, "integration step, s");
  msi_cmd->add_option("--dup", dup, "trial duplication count");

  CLI::App* static_cmd = app.add_subcommand("static-eval", "regression + MAD on a static suite");
  add_common(static_cmd, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth_cmd->parsed()) return cmd_synth(spec_file, opts.out_dir, seed, opts.threads);
    if (vv_cmd->parsed()) return cmd_vv(opts);
    if (msi_cmd->parsed()) return cmd_msi(opts, model, params_file, dt, dup);
    if (static_cmd->parsed()) return cmd_static_eval(opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
