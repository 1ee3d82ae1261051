#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "svcvv/dataio.hpp"
#include "svcvv/png_io.hpp"
#include "svcvv/synth.hpp"

using namespace svcvv;
using namespace svcvv::dataio;
using Catch::Approx;

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("svcvv_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("parse_imu_csv accepts well-formed input") {
  std::istringstream in(
      "t,ax,ay,az,wx,wy,wz\n"
      "0,0,9.81,0,0,0,0\n"
      "0.0166667,0.1,9.8,0,0,0,0.01\n"
      "0.0333333,0.2,9.79,0,0,0,0.02\n");
  const ImuSeries s = parse_imu_csv(in);
  REQUIRE(s.samples.size() == 3);
  CHECK(s.samples[1].a.x == Approx(0.1));
  CHECK(s.samples[2].w.z == Approx(0.02));
}

TEST_CASE("parse_imu_csv rejects malformed input") {
  std::istringstream dup(
      "t,ax,ay,az,wx,wy,wz\n"
      "0,0,9.81,0,0,0,0\n"
      "0,0,9.81,0,0,0,0\n");
  CHECK_THROWS_WITH(parse_imu_csv(dup), Catch::Matchers::ContainsSubstring("increasing"));

  std::istringstream missing(
      "t,ax,ay,az,wx,wy,wz\n"
      "0,9.81,0,0,0,0\n");
  CHECK_THROWS_WITH(parse_imu_csv(missing), Catch::Matchers::ContainsSubstring(":2:"));

  std::istringstream bad_header("time,ax,ay,az,wx,wy,wz\n0,0,9.81,0,0,0,0\n");
  CHECK_THROWS_WITH(parse_imu_csv(bad_header), Catch::Matchers::ContainsSubstring("header"));

  std::istringstream bad_number(
      "t,ax,ay,az,wx,wy,wz\n"
      "0,zero,9.81,0,0,0,0\n");
  CHECK_THROWS_WITH(parse_imu_csv(bad_number), Catch::Matchers::ContainsSubstring("bad number"));
}

TEST_CASE("IMU CSV round-trips at 9 significant digits") {
  ImuSeries s;
  s.rate = 60.0;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  for (int k = 0; k < 50; ++k) {
    s.samples.push_back({k / 60.0,
                         {dist(rng), dist(rng), dist(rng)},
                         {dist(rng), dist(rng), dist(rng)}});
  }
  std::stringstream buf;
  write_imu_csv(buf, s);
  const ImuSeries back = parse_imu_csv(buf);
  REQUIRE(back.samples.size() == s.samples.size());
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    CHECK(back.samples[i].t == Approx(s.samples[i].t).epsilon(1e-8));
    CHECK((back.samples[i].a - s.samples[i].a).norm() == Approx(0.0).margin(1e-6));
    CHECK((back.samples[i].w - s.samples[i].w).norm() == Approx(0.0).margin(1e-6));
  }
}

TEST_CASE("resample_sync aligns both streams on one grid") {
  ImuSeries imu;
  for (int k = 0; k <= 1000; ++k) {
    imu.samples.push_back({k / 100.0, {k / 100.0, 9.81, 0.0}, {}});
  }
  FrameManifest frames;
  for (int k = 0; k < 300; ++k) {
    frames.t.push_back(k / 30.0);
    frames.paths.push_back("frame_" + std::to_string(k));
  }
  const auto [imu_s, frames_s] = resample_sync(imu, frames, 60.0);
  CHECK(imu_s.samples.size() == frames_s.t.size());
  CHECK(imu_s.samples.size() >= 598);
  CHECK(imu_s.samples.size() <= 601);
  for (std::size_t i = 0; i < imu_s.samples.size(); ++i) {
    CHECK(imu_s.samples[i].t == Approx(frames_s.t[i]));
    // linear interpolation of a_x = t
    CHECK(imu_s.samples[i].a.x == Approx(imu_s.samples[i].t).margin(1e-9));
    // latest frame at-or-before the tick
    const int frame_idx = std::stoi(frames_s.paths[i].substr(6));
    CHECK(frame_idx / 30.0 <= imu_s.samples[i].t + 1e-6);
    CHECK((frame_idx + 1) / 30.0 > imu_s.samples[i].t - 1e-6);
  }
}

TEST_CASE("resample_sync is idempotent on matching grids") {
  ImuSeries imu;
  FrameManifest frames;
  for (int k = 0; k < 120; ++k) {
    imu.samples.push_back({k / 60.0, {0.5, 9.8, 0.0}, {0.0, 0.0, 0.1}});
    frames.t.push_back(k / 60.0);
    frames.paths.push_back("f" + std::to_string(k));
  }
  const auto [imu_s, frames_s] = resample_sync(imu, frames, 60.0);
  REQUIRE(imu_s.samples.size() == 120);
  for (int k = 0; k < 120; ++k) {
    CHECK(imu_s.samples[k].t == Approx(k / 60.0).margin(1e-9));
    CHECK(frames_s.paths[k] == frames.paths[k]);
  }
}

TEST_CASE("resample_sync requires overlapping streams") {
  ImuSeries imu;
  imu.samples.push_back({0.0, {}, {}});
  imu.samples.push_back({1.0, {}, {}});
  FrameManifest frames;
  frames.t = {5.0, 6.0};
  frames.paths = {"a", "b"};
  CHECK_THROWS_WITH(resample_sync(imu, frames), Catch::Matchers::ContainsSubstring("overlap"));
}

TEST_CASE("duplicate_trial concatenates with continuous time") {
  ImuSeries s;
  s.rate = 60.0;
  for (int k = 0; k < 2217; ++k) s.samples.push_back({k / 60.0, {1, 2, 3}, {4, 5, 6}});
  CHECK(s.duration() == Approx(36.95));

  const ImuSeries ten = duplicate_trial(s, 10);
  CHECK(ten.samples.size() == 22170);
  CHECK(ten.duration() == Approx(369.5));
  // copies are bit-exact and contiguous
  for (int c = 0; c < 10; ++c) {
    const auto& first_of_copy = ten.samples[static_cast<std::size_t>(c) * 2217];
    CHECK(first_of_copy.t == Approx(c * 36.95));
    CHECK(first_of_copy.a == Vec3{1, 2, 3});
  }
  for (std::size_t i = 1; i < ten.samples.size(); ++i) {
    CHECK(ten.samples[i].t - ten.samples[i - 1].t == Approx(1.0 / 60.0).margin(1e-9));
  }

  const ImuSeries same = duplicate_trial(s, 1);
  CHECK(same.samples.size() == s.samples.size());
  CHECK_THROWS_AS(duplicate_trial(s, 0), std::invalid_argument);
}

TEST_CASE("zero-order hold picks the latest frame at or before t") {
  const std::vector<double> times{0.0, 1.0 / 60.0};
  const std::vector<Vec3> values{{1, 0, 0}, {2, 0, 0}};
  CHECK(zoh(times, values, 0.01).x == 1.0);
  CHECK(zoh(times, values, 1.0 / 60.0).x == 2.0);
  CHECK(zoh(times, values, 1.0 / 120.0).x == 1.0);
  CHECK(zoh(times, values, 5.0).x == 2.0);
  CHECK_THROWS_AS(zoh(times, values, -0.5), std::out_of_range);
}

TEST_CASE("PNG round-trip preserves 8-bit RGB exactly") {
  TempDir tmp;
  synth::SceneSpec spec;
  spec.width = 64;
  spec.height = 48;
  spec.seed = 9;
  const ColorImage img = synth::render_scene(spec);
  const auto path = (tmp.path / "t.png").string();
  pngio::write_png(path, img);
  const ColorImage back = pngio::read_png(path);
  REQUIRE(back.height == img.height);
  REQUIRE(back.width == img.width);
  CHECK(back.data == img.data);
}

TEST_CASE("trial manifest round-trip") {
  TempDir tmp;
  fs::create_directories(tmp.path / "frames");

  ImuSeries imu;
  imu.rate = 60.0;
  for (int k = 0; k < 6; ++k) imu.samples.push_back({k / 60.0, {0, 9.81, 0}, {}});
  write_imu_csv(tmp.path / "imu.csv", imu);

  std::vector<double> frame_times;
  synth::SceneSpec spec;
  spec.width = 32;
  spec.height = 24;
  for (int k = 0; k < 6; ++k) {
    frame_times.push_back(k / 60.0);
    spec.seed = static_cast<std::uint64_t>(k);
    pngio::write_png((tmp.path / "frames" / frame_filename(k)).string(),
                     synth::render_scene(spec));
  }
  write_trial_manifest(tmp.path, frame_times, 60.0, 32, 24);

  const TrialBundle trial = load_trial(tmp.path / "trial.json");
  CHECK(trial.imu.samples.size() == 6);
  CHECK(trial.imu.rate == 60.0);
  REQUIRE(trial.frames.paths.size() == 6);
  CHECK(trial.frames.width == 32);
  const ColorImage f3 = pngio::read_png(trial.frames.paths[3]);
  CHECK(f3.width == 32);
  CHECK(f3.height == 24);

  CHECK_THROWS_AS(load_trial(tmp.path / "nope.json"), std::runtime_error);
}
