#include <cmath>

#include "tnav/controller/controller.hpp"
#include "tnav/errors.hpp"

namespace tnav {

SolverKind solver_from_string(const std::string& s) {
  if (s == "mppi") return SolverKind::kMppi;
  if (s == "mpc_gradient") return SolverKind::kMpcGradient;
  throw ConfigError("unknown solver: " + s);
}

const char* to_string(SolverKind k) {
  switch (k) {
    case SolverKind::kMppi: return "mppi";
    case SolverKind::kMpcGradient: return "mpc_gradient";
  }
  return "unknown";
}

void ControllerParams::validate() const {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (dt <= 0) throw ConfigError("dt must be positive");
  if (zeta_min >= zeta_max) throw ConfigError("need zeta_min < zeta_max");
  if (zeta_max <= 0) throw ConfigError("zeta_max must be positive");
  if (omega_max <= 0) throw ConfigError("omega_max must be positive");
  if (rollouts < 1) throw ConfigError("rollouts must be >= 1");
  if (noise_zeta < 0 || noise_omega < 0)
    throw ConfigError("noise scales must be non-negative");
  if (temperature <= 0) throw ConfigError("temperature must be positive");
  if (mpc_iterations < 1) throw ConfigError("mpc_iterations must be >= 1");
  if (mpc_step <= 0) throw ConfigError("mpc_step must be positive");
  if (fd_epsilon <= 0) throw ConfigError("fd_epsilon must be positive");
  if (open_samples < 0) throw ConfigError("open_samples must be >= 0");
  if (open_radius < 0) throw ConfigError("open_radius must be >= 0");
  if (psi_clamp <= 0 || psi_clamp >= kPi / 2)
    throw ConfigError("psi_clamp must be in (0, pi/2)");
  const auto& w = weights;
  if (w.qx < 0 || w.qy < 0 || w.qtheta < 0 || w.r_zeta < 0 || w.r_omega < 0 ||
      w.w_v < 0 || w.k_q < 0 || w.lambda_open < 0)
    throw ConfigError("objective weights must be non-negative");
}

RobotState motion_step(const RobotState& s, const ControlInput& u, double dt) {
  RobotState n;
  n.x = s.x + u.zeta * std::cos(s.theta) * dt;
  n.y = s.y + u.zeta * std::sin(s.theta) * dt;
  n.theta = wrap_angle(s.theta + u.omega * dt);
  return n;
}

std::vector<RobotState> rollout(const RobotState& s0,
                                const std::vector<ControlInput>& controls,
                                double dt) {
  std::vector<RobotState> states;
  states.reserve(controls.size());
  RobotState s = s0;
  for (const auto& u : controls) {
    s = motion_step(s, u, dt);
    states.push_back(s);
  }
  return states;
}

double adaptive_R_scale(double mean_tau) {
  if (mean_tau >= 1.0)
    throw RuntimeFailure("saturated_terrain",
                         "control effort scale undefined at mean tau >= 1");
  const double d = 1.0 - mean_tau;
  return 1.0 / (d * d);
}

double adaptive_W(double psi, double w_v, double k_q, double psi_clamp) {
  const double p = clamp(psi, -psi_clamp, psi_clamp);
  return (1.0 + k_q * std::max(0.0, std::tan(p))) * w_v;
}

std::vector<std::pair<double, double>> draw_open_offsets(Rng& rng, int samples,
                                                         double radius) {
  std::vector<std::pair<double, double>> offsets;
  offsets.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double r = radius * std::sqrt(rng.uniform01());
    const double a = kTwoPi * rng.uniform01();
    offsets.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  return offsets;
}

double open_space_cost(const TraversabilityMap& trav,
                       const std::vector<RobotState>& states,
                       const std::vector<std::pair<double, double>>& offsets) {
  if (states.empty() || offsets.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : states)
    for (const auto& [ox, oy] : offsets) total += trav.tau_at(s.x + ox, s.y + oy);
  return total / (static_cast<double>(states.size()) * offsets.size());
}

double objective(const TraversabilityMap& trav,
                 const std::vector<RobotState>& states,
                 const std::vector<ControlInput>& controls,
                 const ReferenceWindow& refs, const ObjectiveWeights& w,
                 bool adaptive,
                 const std::vector<std::pair<double, double>>& open_offsets) {
  TNAV_REQUIRE(states.size() == controls.size() && !refs.states.empty(),
               "objective: empty horizon or window");
  double j = 0.0;
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const RobotState& s = states[k];
    cursor = advance_cursor(refs, cursor, s.x, s.y);
    const RobotState& sd = refs.states[cursor];
    const ControlInput& u = controls[k];
    const double dx = s.x - sd.x;
    const double dy = s.y - sd.y;
    const double dth = angle_diff(s.theta, sd.theta);
    double r_scale = 1.0;
    if (adaptive) {
      const double mt = trav.mean_tau_at(s.x, s.y);
      if (mt >= 1.0) return std::numeric_limits<double>::infinity();
      r_scale = adaptive_R_scale(mt);
    }
    const double wk =
        adaptive ? adaptive_W(refs.psi[cursor], w.w_v, w.k_q) : w.w_v;
    const double dv = u.zeta - refs.v_desired[cursor];
    j += w.qx * dx * dx + w.qy * dy * dy + w.qtheta * dth * dth;
    j += r_scale * (w.r_zeta * u.zeta * u.zeta + w.r_omega * u.omega * u.omega);
    j += wk * dv * dv;
  }
  j += w.lambda_open * open_space_cost(trav, states, open_offsets);
  return j;
}

}  // namespace tnav
