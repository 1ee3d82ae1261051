#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "svcvv/dataio.hpp"
#include "svcvv/image.hpp"
#include "svcvv/vec3.hpp"

// Ground-truth-labeled synthetic scenes and head trajectories standing in
// for recorded camera + IMU data.
namespace svcvv::synth {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMaxSpeed = 6.0 / 3.6;  // m/s
inline constexpr double kMaxLatAcc = 1.7;       // m/s^2

enum class SceneKind { grid, horizon, book_occluder };

inline SceneKind scene_kind_from_string(const std::string& s) {
  if (s == "grid") return SceneKind::grid;
  if (s == "horizon") return SceneKind::horizon;
  if (s == "book_occluder") return SceneKind::book_occluder;
  throw std::invalid_argument("unknown scene kind: " + s);
}

// roll_deg is the scene rotation relative to the head: a head roll of +r
// shows the world rotated by -r, so the gravity truth is 90 - roll_deg.
struct SceneSpec {
  SceneKind kind = SceneKind::grid;
  double roll_deg = 0.0;
  int line_spacing = 40;  // px, dominant (world-horizontal) family
  int line_width = 3;     // px
  double noise_std = 3.0;
  int width = 640;
  int height = 360;
  std::uint64_t seed = 1;

  void validate() const {
    if (roll_deg < -60.0 || roll_deg > 60.0) {
      throw std::invalid_argument("SceneSpec: roll_deg must be within [-60, 60]");
    }
    if (line_width < 1 || line_spacing <= line_width) {
      throw std::invalid_argument("SceneSpec: need spacing > width >= 1");
    }
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic per-line angle jitter in [-1.2, 1.2] degrees; spreads each
// family's gradient mass over a few adjacent histogram bins.
inline double line_jitter(std::uint64_t seed, int family, long line_index) {
  const std::uint64_t h = splitmix64(seed ^ (static_cast<std::uint64_t>(family) << 32) ^
                                     static_cast<std::uint64_t>(line_index + (1L << 20)));
  return (static_cast<double>(h >> 11) / static_cast<double>(1ULL << 53) - 0.5) * 2.4;
}

// Coverage of a line of half-width hw at distance d from its center, with
// a 1-pixel soft edge.
inline double line_coverage(double d, double hw) {
  return std::clamp(hw + 0.5 - d, 0.0, 1.0);
}

// Parallel line family at base angle alpha_deg through the image center.
// The jittered orientation of each line is computed once and reused for
// every pixel the line touches.
class LineFamily {
 public:
  LineFamily(double alpha_deg, double spacing, double halfwidth, std::uint64_t seed, int family,
             double radius)
      : alpha_deg_(alpha_deg),
        spacing_(spacing),
        hw_(halfwidth),
        seed_(seed),
        family_(family),
        s0_(std::sin(alpha_deg * kPi / 180.0)),
        c0_(std::cos(alpha_deg * kPi / 180.0)),
        lmax_(std::lround(radius / spacing) + 2),
        sin_(static_cast<std::size_t>(2 * lmax_ + 1)),
        cos_(static_cast<std::size_t>(2 * lmax_ + 1)),
        filled_(static_cast<std::size_t>(2 * lmax_ + 1), 0) {}

  double coverage(double xc, double yc) {
    const double p0 = -xc * s0_ + yc * c0_;
    const long line = std::lround(p0 / spacing_);
    if (line < -lmax_ || line > lmax_) return 0.0;
    const auto idx = static_cast<std::size_t>(line + lmax_);
    if (!filled_[idx]) {
      const double a = (alpha_deg_ + line_jitter(seed_, family_, line)) * kPi / 180.0;
      sin_[idx] = std::sin(a);
      cos_[idx] = std::cos(a);
      filled_[idx] = 1;
    }
    const double p = -xc * sin_[idx] + yc * cos_[idx];
    const double d = std::abs(p - static_cast<double>(line) * spacing_);
    return line_coverage(d, hw_);
  }

 private:
  double alpha_deg_, spacing_, hw_;
  std::uint64_t seed_;
  int family_;
  double s0_, c0_;
  long lmax_;
  std::vector<double> sin_, cos_;
  std::vector<char> filled_;
};

}  // namespace detail

inline ColorImage render_scene(const SceneSpec& spec) {
  spec.validate();
  const int h = spec.height;
  const int w = spec.width;
  ColorImage img(h, w);
  std::vector<double> lum(static_cast<std::size_t>(h) * w);

  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  const double hw = spec.line_width / 2.0;

  // Head-frame angles of the two line families: the world-horizontal
  // family sits at -roll (its gradients point along 90 - roll, the
  // gravity direction), the world-vertical family at 90 - roll.
  const double a_horizontal = -spec.roll_deg;
  const double a_vertical = 90.0 - spec.roll_deg;
  const double radius = std::hypot(cx + 1.0, cy + 1.0);
  detail::LineFamily horiz(a_horizontal, spec.line_spacing, hw, spec.seed, 0, radius);
  detail::LineFamily vert(a_vertical, spec.line_spacing * 3.0, hw, spec.seed, 1, radius);

  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const double xc = j - cx;
      const double yc = cy - i;  // head longitudinal axis points up
      double v = 220.0;
      switch (spec.kind) {
        case SceneKind::grid: {
          const double ch = horiz.coverage(xc, yc);
          const double cv = vert.coverage(xc, yc);
          v = 220.0 - 190.0 * ch - 90.0 * cv * (1.0 - ch);
          break;
        }
        case SceneKind::horizon: {
          const double a = a_horizontal * kPi / 180.0;
          const double p = -xc * std::sin(a) + yc * std::cos(a);
          const double cov = detail::line_coverage(std::abs(p), 25.0);
          v = 220.0 - 160.0 * cov;
          break;
        }
        case SceneKind::book_occluder: {
          // Faint rotated grid kept below the magnitude cutoff.
          const double ch = horiz.coverage(xc, yc);
          v = 220.0 - 30.0 * ch;
          // Head-locked page with an axis-aligned dark border.
          const double rx = 0.35 * w;
          const double ry = 0.35 * h;
          const double dx = rx - std::abs(xc);
          const double dy = ry - std::abs(yc);
          const double inside = std::min({dx, dy, 1.0});
          if (inside > 0.0) {
            const double border = 6.0;
            const double depth = std::min(dx, dy);
            const double border_cov =
                std::min(inside, detail::line_coverage(std::abs(depth - border / 2.0), border / 2.0));
            v = 235.0 * std::min(inside, 1.0) + v * (1.0 - std::min(inside, 1.0));
            v = v - 195.0 * border_cov;
          }
          break;
        }
      }
      lum[static_cast<std::size_t>(i) * w + j] = v;
    }
  }

  std::mt19937_64 rng(detail::splitmix64(spec.seed));
  std::normal_distribution<double> noise(0.0, spec.noise_std);
  for (std::size_t p = 0; p < lum.size(); ++p) {
    const double n = spec.noise_std > 0.0 ? noise(rng) : 0.0;
    const auto u = static_cast<std::uint8_t>(std::clamp(lum[p] + n, 0.0, 255.0));
    img.data[p * 3 + 0] = u;
    img.data[p * 3 + 1] = u;
    img.data[p * 3 + 2] = u;
  }
  return img;
}

struct TrajectorySpec {
  double pylon_spacing = 4.0;  // m
  double speed = 1.5;          // m/s
  double max_lat_acc = 1.7;    // m/s^2
  int n_pylons = 5;
  // Passive head response: under lateral acceleration the head tips away
  // from the turn, so the default gain is negative.
  double head_roll_gain = -6.0;  // deg per m/s^2
  double slalom_amp = 1.5;      // m/s^2 lateral peak
  double turn_acc = 1.2;        // m/s^2 centripetal during the U-turn
  double rest_s = 3.2;          // lead-in / lead-out

  void validate() const {
    if (speed < 0.0 || speed > kMaxSpeed + 1e-9) {
      throw std::invalid_argument("TrajectorySpec: speed must be in [0, 6 km/h]");
    }
    if (max_lat_acc <= 0.0 || max_lat_acc > kMaxLatAcc + 1e-9) {
      throw std::invalid_argument("TrajectorySpec: max_lat_acc must be in (0, 1.7]");
    }
    if (slalom_amp > max_lat_acc || turn_acc > max_lat_acc) {
      throw std::invalid_argument("TrajectorySpec: lateral acceleration exceeds the cap");
    }
    if (n_pylons < 1) throw std::invalid_argument("TrajectorySpec: need at least one pylon");
    if (pylon_spacing <= 0.0) throw std::invalid_argument("TrajectorySpec: bad pylon spacing");
    if (std::abs(head_roll_gain) * max_lat_acc > 60.0) {
      throw std::invalid_argument("TrajectorySpec: head roll would exceed +/-60 degrees");
    }
  }

  // speed 0 degenerates to a purely static recording of 2 * rest_s
  double gate_time() const { return speed > 0.0 ? pylon_spacing / speed : 0.0; }
  double slalom_time() const { return n_pylons * gate_time(); }
  double turn_time() const { return kPi * speed / turn_acc; }  // semicircle at v^2/r = turn_acc
  double duration() const { return 2.0 * rest_s + 2.0 * slalom_time() + turn_time(); }
};

namespace detail {

struct AccSample {
  double a = 0.0;   // lateral acceleration, m/s^2
  double da = 0.0;  // d/dt
};

inline AccSample smooth_gate(double s, double ramp) {
  // smoothstep ramp at both ends handled by the caller via min()
  const double u = std::clamp(s / ramp, 0.0, 1.0);
  return {u * u * (3.0 - 2.0 * u), u < 1.0 && u > 0.0 ? 6.0 * u * (1.0 - u) / ramp : 0.0};
}

// Lateral-acceleration profile: rest, sinusoidal slalom out, constant-rate
// U-turn with smooth ramps, sinusoidal slalom back, rest.
inline AccSample lateral_acc(const TrajectorySpec& spec, double t) {
  if (spec.speed <= 0.0) return {};
  const double rest = spec.rest_s;
  const double t_out = spec.slalom_time();
  const double t_turn = spec.turn_time();
  const double weave_w = kPi / spec.gate_time();  // 2*pi / (2 gates)

  if (t < rest) return {};
  t -= rest;
  if (t < t_out) {
    return {spec.slalom_amp * std::sin(weave_w * t),
            spec.slalom_amp * weave_w * std::cos(weave_w * t)};
  }
  t -= t_out;
  if (t < t_turn) {
    const double ramp = std::min(0.6, t_turn / 4.0);
    const AccSample up = smooth_gate(t, ramp);
    const AccSample down = smooth_gate(t_turn - t, ramp);
    return {spec.turn_acc * up.a * down.a,
            spec.turn_acc * (up.da * down.a - up.a * down.da)};
  }
  t -= t_turn;
  if (t < t_out) {
    return {spec.slalom_amp * std::sin(weave_w * t),
            spec.slalom_amp * weave_w * std::cos(weave_w * t)};
  }
  return {};
}

}  // namespace detail

struct SlalomTrial {
  dataio::ImuSeries imu;          // gravito-inertial acceleration + angular velocity
  std::vector<double> roll_deg;   // head roll per tick
  std::vector<double> theta_g;    // ground-truth gravity angle per tick, deg
};

// Head-frame IMU series for the slalom: head roll is proportional to the
// lateral acceleration, gravity keeps norm 9.81 exactly, and f - a = g at
// every tick.
inline SlalomTrial slalom_trajectory(const TrajectorySpec& spec, double dt = 1.0 / 60.0) {
  spec.validate();
  SlalomTrial trial;
  trial.imu.rate = 1.0 / dt;
  const long n = static_cast<long>(std::floor(spec.duration() / dt)) + 1;
  for (long k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const auto acc = detail::lateral_acc(spec, t);
    const double phi = spec.head_roll_gain * acc.a;            // deg
    const double dphi = spec.head_roll_gain * acc.da;          // deg/s
    const double phi_rad = phi * kPi / 180.0;
    const double c = std::cos(phi_rad);
    const double s = std::sin(phi_rad);
    // World-frame GIA [a_lat, 9.81, 0] rotated into the head frame.
    const Vec3 f{acc.a * c - 9.81 * s, acc.a * s + 9.81 * c, 0.0};
    const Vec3 w{0.0, 0.0, -dphi * kPi / 180.0};
    trial.imu.samples.push_back({t, f, w});
    trial.roll_deg.push_back(phi);
    trial.theta_g.push_back(90.0 + phi);
  }
  return trial;
}

struct StaticSuite {
  dataio::ImuSeries imu;
  std::vector<SceneSpec> frame_scenes;  // one spec per tick, seeds varied
  std::vector<double> theta_g;          // per tick, deg
};

// One scene + IMU tick stream per head pose, each pose held for hold_s.
inline StaticSuite static_pose_suite(const std::vector<double>& angles_deg,
                                     const SceneSpec& base, double hold_s = 3.0,
                                     double rate = 60.0) {
  StaticSuite suite;
  suite.imu.rate = rate;
  const int frames_per_pose = static_cast<int>(std::lround(hold_s * rate));
  long k = 0;
  for (double roll : angles_deg) {
    if (roll < -60.0 || roll > 60.0) {
      throw std::invalid_argument("static_pose_suite: head roll outside [-60, 60]");
    }
    const double theta = 90.0 + roll;
    const double rad = theta * kPi / 180.0;
    const Vec3 f{9.81 * std::cos(rad), 9.81 * std::sin(rad), 0.0};
    for (int i = 0; i < frames_per_pose; ++i, ++k) {
      SceneSpec scene = base;
      scene.roll_deg = -roll;  // world appears counter-rotated to the head
      scene.seed = detail::splitmix64(base.seed + static_cast<std::uint64_t>(k));
      suite.frame_scenes.push_back(scene);
      suite.theta_g.push_back(theta);
      suite.imu.samples.push_back({static_cast<double>(k) / rate, f, Vec3{}});
    }
  }
  return suite;
}

// Per-tick scene stream for a slalom trial: the grid counter-rotates with
// the head (looking ahead), the book occluder stays head-locked.
inline std::vector<SceneSpec> slalom_scenes(const SlalomTrial& trial, const SceneSpec& base) {
  std::vector<SceneSpec> scenes;
  scenes.reserve(trial.roll_deg.size());
  for (std::size_t k = 0; k < trial.roll_deg.size(); ++k) {
    SceneSpec s = base;
    s.roll_deg = base.kind == SceneKind::book_occluder ? 0.0 : -trial.roll_deg[k];
    s.seed = detail::splitmix64(base.seed + k);
    scenes.push_back(s);
  }
  return scenes;
}

}  // namespace svcvv::synth
