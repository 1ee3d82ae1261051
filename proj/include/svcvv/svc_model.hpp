#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "svcvv/vec3.hpp"

// Continuous-time 6-DoF subjective-vertical-conflict model with optional
// visual-vertical coupling, integrated with fixed-step RK4.
namespace svcvv {

struct ModelParams {
  double K_a = 0.1;
  double K_omega = 0.8;
  double K_omega_c = 10.0;
  double K_ac = 1.0;
  double K_vc = 5.0;
  double K_vvc = 0.0;
  double tau = 5.0;      // s, vertical low-pass
  double tau_d = 7.0;    // s, canal time constant
  double b = 0.5;        // m/s^2, Hill half-saturation
  double tau_i = 720.0;  // s, MSI lag (12 min)
  double P = 85.0;       // %, MSI gain

  static ModelParams conventional() { return {}; }

  static ModelParams svc_vv() {
    ModelParams p;
    p.K_vvc = 5.0;
    return p;
  }

  static ModelParams named(const std::string& name) {
    if (name == "conventional") return conventional();
    if (name == "svc_vv") return svc_vv();
    throw std::invalid_argument("unknown model name: " + name +
                                " (expected 'conventional' or 'svc_vv')");
  }

  void validate() const {
    const auto pos = [](double v, const char* n) {
      if (!(v > 0.0)) throw std::invalid_argument(std::string("ModelParams: ") + n + " must be > 0");
    };
    pos(K_a, "K_a");
    pos(K_omega, "K_omega");
    pos(K_omega_c, "K_omega_c");
    pos(K_ac, "K_ac");
    pos(K_vc, "K_vc");
    pos(tau, "tau");
    pos(tau_d, "tau_d");
    pos(b, "b");
    pos(tau_i, "tau_i");
    pos(P, "P");
    if (K_vvc < 0.0) throw std::invalid_argument("ModelParams: K_vvc must be >= 0");
  }

  // Flat key=value overrides; tau_i_min is accepted in minutes.
  void apply_overrides(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open params file: " + path);
    std::map<std::string, double*> keys = {
        {"K_a", &K_a},     {"K_omega", &K_omega}, {"K_omega_c", &K_omega_c},
        {"K_ac", &K_ac},   {"K_vc", &K_vc},       {"K_vvc", &K_vvc},
        {"tau", &tau},     {"tau_d", &tau_d},     {"b", &b},
        {"tau_i", &tau_i}, {"P", &P}};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::string trimmed;
      for (char c : line) {
        if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
      }
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
      }
      const std::string key = trimmed.substr(0, eq);
      const std::string val = trimmed.substr(eq + 1);
      double parsed = 0.0;
      try {
        std::size_t used = 0;
        parsed = std::stod(val, &used);
        if (used != val.size()) throw std::invalid_argument(val);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" + val + "'");
      }
      if (key == "tau_i_min") {
        tau_i = parsed * 60.0;
        continue;
      }
      const auto it = keys.find(key);
      if (it == keys.end()) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
      }
      *it->second = parsed;
    }
    validate();
  }
};

// 17-component model state.
struct SvcState {
  Vec3 v_s;        // sensed vertical
  Vec3 x_scc;      // canal low-pass state (omega_s = omega - x_scc)
  Vec3 v_hat_s;    // internal-model vertical
  Vec3 x_hat_scc;  // internal canal state
  Vec3 g_hat;      // internally estimated gravity
  double m1 = 0.0;
  double m2 = 0.0;  // MSI output, %

  SvcState operator+(const SvcState& o) const {
    return {v_s + o.v_s,         x_scc + o.x_scc, v_hat_s + o.v_hat_s,
            x_hat_scc + o.x_hat_scc, g_hat + o.g_hat, m1 + o.m1,
            m2 + o.m2};
  }
  SvcState operator*(double s) const {
    return {v_s * s, x_scc * s, v_hat_s * s, x_hat_scc * s, g_hat * s, m1 * s, m2 * s};
  }

  bool finite() const {
    return v_s.finite() && x_scc.finite() && v_hat_s.finite() && x_hat_scc.finite() &&
           g_hat.finite() && std::isfinite(m1) && std::isfinite(m2);
  }
};

struct SvcInput {
  Vec3 f;      // gravito-inertial acceleration, m/s^2
  Vec3 omega;  // rad/s
  Vec3 vv;     // visual vertical, m/s^2 (ignored when K_vvc = 0)
};

struct MsiSample {
  double t = 0.0;
  double msi = 0.0;      // %
  double dv_norm = 0.0;  // ||v_s - v_hat_s||
  double dvv_norm = 0.0; // ||vv_s - vv_hat_s|| (0 when VV disabled)
  Vec3 g_hat;
  Vec3 v_s;
};

using MsiTrace = std::vector<MsiSample>;

// Otolith transfer: identity.
inline Vec3 oto(const Vec3& f) { return f; }

// Canal high-pass omega tau_d s / (tau_d s + 1) as a state-space pair.
inline std::pair<Vec3, Vec3> scc_derivative(const Vec3& x, const Vec3& omega, double tau_d) {
  return {(omega - x) / tau_d, omega - x};
}

inline Vec3 lp_vertical_derivative(const Vec3& v, const Vec3& f_s, const Vec3& omega_s,
                                   double tau) {
  return (f_s - v) / tau - omega_s.cross(v);
}

// Internal-model drive: efference-copy gains on the sensed signals plus
// conflict feedback.
inline std::pair<Vec3, Vec3> internal_model_inputs(const Vec3& a_s, const Vec3& a_hat_s,
                                                   const Vec3& omega_s, const Vec3& omega_hat_s,
                                                   const ModelParams& p) {
  const Vec3 a_in = p.K_a * a_s + p.K_ac * (a_s - a_hat_s);
  const Vec3 w_in = p.K_omega * omega_s + p.K_omega_c * (omega_s - omega_hat_s);
  return {a_in, w_in};
}

inline Vec3 vis_g(const Vec3& vv) { return vv; }

// Project the internal gravity estimate onto the head x-y plane and
// rescale to 9.81. A zero projection falls back to straight up.
inline Vec3 vis_g_bar(const Vec3& g_hat, bool* degenerate = nullptr) {
  const double n = std::hypot(g_hat.x, g_hat.y);
  if (n <= 0.0) {
    if (degenerate) *degenerate = true;
    return {0.0, 9.81, 0.0};
  }
  if (degenerate) *degenerate = false;
  return {9.81 * g_hat.x / n, 9.81 * g_hat.y / n, 0.0};
}

inline Vec3 g_hat_derivative(const Vec3& vv_s, const Vec3& vv_hat_s, const Vec3& v_s,
                             const Vec3& v_hat_s, const ModelParams& p) {
  return p.K_vvc * (vv_s - vv_hat_s) + p.K_vc * (v_s - v_hat_s);
}

inline double hill(double dv_norm, double b) {
  const double r = dv_norm / b;
  const double r2 = r * r;
  return r2 / (1.0 + r2);
}

inline std::pair<double, double> msi_derivative(double m1, double m2, double h,
                                                const ModelParams& p) {
  return {(p.P * h - m1) / p.tau_i, (m1 - m2) / p.tau_i};
}

namespace detail {

// Conflict magnitudes evaluated alongside the derivative.
struct Conflicts {
  double dv_norm = 0.0;
  double dvv_norm = 0.0;
};

inline SvcState svc_derivative(const SvcState& s, const SvcInput& u, const ModelParams& p,
                               Conflicts* conflicts = nullptr) {
  SvcState d;

  const Vec3 f_s = oto(u.f);
  const auto [dx_scc, omega_s] = scc_derivative(s.x_scc, u.omega, p.tau_d);
  d.x_scc = dx_scc;
  d.v_s = lp_vertical_derivative(s.v_s, f_s, omega_s, p.tau);
  const Vec3 a_s = f_s - s.v_s;

  // The conflict feedback closes an algebraic loop on the internal sensed
  // signals; both loops are linear and solved in closed form:
  //   (1 + K_wc) omega_hat_s = (K_w + K_wc) omega_s - x_hat_scc
  //   (1 + K_ac) a_hat_s     = (K_a + K_ac) a_s + g_hat - v_hat_s
  const Vec3 omega_hat_s =
      ((p.K_omega + p.K_omega_c) * omega_s - s.x_hat_scc) / (1.0 + p.K_omega_c);
  const Vec3 a_hat_s = ((p.K_a + p.K_ac) * a_s + s.g_hat - s.v_hat_s) / (1.0 + p.K_ac);

  const auto [a_in, w_in] = internal_model_inputs(a_s, a_hat_s, omega_s, omega_hat_s, p);
  const Vec3 f_hat_s = oto(a_in + s.g_hat);
  d.x_hat_scc = scc_derivative(s.x_hat_scc, w_in, p.tau_d).first;
  d.v_hat_s = lp_vertical_derivative(s.v_hat_s, f_hat_s, omega_hat_s, p.tau);

  const Vec3 dv = s.v_s - s.v_hat_s;
  if (p.K_vvc > 0.0) {
    const Vec3 vv_s = vis_g(u.vv);
    const Vec3 vv_hat_s = vis_g_bar(s.g_hat);
    d.g_hat = g_hat_derivative(vv_s, vv_hat_s, s.v_s, s.v_hat_s, p);
    if (conflicts) conflicts->dvv_norm = (vv_s - vv_hat_s).norm();
  } else {
    d.g_hat = p.K_vc * dv;
  }

  const double dv_norm = dv.norm();
  const auto [dm1, dm2] = msi_derivative(s.m1, s.m2, hill(dv_norm, p.b), p);
  d.m1 = dm1;
  d.m2 = dm2;
  if (conflicts) conflicts->dv_norm = dv_norm;
  return d;
}

template <typename State, typename Deriv>
State rk4_step(const State& x, double t, double dt, Deriv&& f) {
  const State k1 = f(x, t);
  const State k2 = f(x + k1 * (dt / 2.0), t + dt / 2.0);
  const State k3 = f(x + k2 * (dt / 2.0), t + dt / 2.0);
  const State k4 = f(x + k3 * dt, t + dt);
  return x + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
}

}  // namespace detail

struct SvcInputSeries {
  std::vector<double> t;
  std::vector<SvcInput> u;

  // Validates uniform sampling; returns the sample period.
  double check_uniform(double jitter = 1e-6) const {
    if (t.size() != u.size()) throw std::invalid_argument("SvcInputSeries: size mismatch");
    if (t.size() < 2) throw std::invalid_argument("SvcInputSeries: need at least 2 samples");
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    for (std::size_t i = 1; i < t.size(); ++i) {
      const double expected = t.front() + static_cast<double>(i) * dt;
      if (std::abs(t[i] - expected) > jitter) {
        throw std::invalid_argument("SvcInputSeries: non-uniform timestamp at index " +
                                    std::to_string(i));
      }
    }
    return dt;
  }
};

// Fixed-step RK4 over the full model. dt must evenly subdivide the input
// sample period; f and omega are interpolated linearly at substeps, vv is
// zero-order held per sample. Initial state: v_s = v_hat_s = g_hat = f(0),
// everything else zero.
inline MsiTrace simulate(const SvcInputSeries& in, const ModelParams& p, double dt) {
  p.validate();
  const double sample_dt = in.check_uniform();
  if (!(dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
  const int substeps = static_cast<int>(std::lround(sample_dt / dt));
  if (substeps < 1 || std::abs(substeps * dt - sample_dt) > 1e-9) {
    throw std::invalid_argument("simulate: dt must evenly divide the input sample period");
  }

  SvcState s;
  s.v_s = s.v_hat_s = s.g_hat = in.u.front().f;

  MsiTrace trace;
  trace.reserve((in.u.size() - 1) * static_cast<std::size_t>(substeps) + 1);

  const auto record = [&](double t, const SvcState& st, const SvcInput& u_now) {
    detail::Conflicts c;
    detail::svc_derivative(st, u_now, p, &c);
    trace.push_back({t, st.m2, c.dv_norm, c.dvv_norm, st.g_hat, st.v_s});
  };

  record(in.t.front(), s, in.u.front());
  for (std::size_t i = 0; i + 1 < in.u.size(); ++i) {
    const SvcInput& u0 = in.u[i];
    const SvcInput& u1 = in.u[i + 1];
    for (int k = 0; k < substeps; ++k) {
      const double t0 = in.t[i] + k * dt;
      const auto input_at = [&](double t) {
        const double a = std::clamp((t - in.t[i]) / sample_dt, 0.0, 1.0);
        SvcInput u;
        u.f = u0.f * (1.0 - a) + u1.f * a;
        u.omega = u0.omega * (1.0 - a) + u1.omega * a;
        u.vv = u0.vv;  // zero-order hold across the whole sample interval
        return u;
      };
      s = detail::rk4_step(s, t0, dt, [&](const SvcState& x, double t) {
        return detail::svc_derivative(x, input_at(t), p);
      });
      if (!s.finite()) {
        throw std::runtime_error("simulate: state diverged at t=" + std::to_string(t0 + dt) +
                                 " (sample " + std::to_string(i) + ", substep " +
                                 std::to_string(k) + ")");
      }
      const double t_now = t0 + dt;
      record(t_now, s, k + 1 == substeps ? u1 : input_at(t_now));
    }
  }
  return trace;
}

// Integrates dg/dt = -omega x g from g0 with RK4 on the same grid as the
// angular-velocity series (linear interpolation at substeps).
inline std::vector<Vec3> gravity_track(const std::vector<double>& t,
                                       const std::vector<Vec3>& omega, const Vec3& g0) {
  if (t.size() != omega.size() || t.size() < 2) {
    throw std::invalid_argument("gravity_track: need matching series of length >= 2");
  }
  std::vector<Vec3> g(t.size());
  g[0] = g0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double dt = t[i + 1] - t[i];
    const auto w_at = [&](double tt) {
      const double a = std::clamp((tt - t[i]) / dt, 0.0, 1.0);
      return omega[i] * (1.0 - a) + omega[i + 1] * a;
    };
    g[i + 1] = detail::rk4_step(g[i], t[i], dt, [&](const Vec3& x, double tt) {
      return -w_at(tt).cross(x);
    });
  }
  return g;
}

// Gravity roll angle in the head x-y plane, degrees.
inline double theta_g(const Vec3& g) {
  return std::atan2(g.y, g.x) * 180.0 / 3.14159265358979323846;
}

}  // namespace svcvv
