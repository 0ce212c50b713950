#include <algorithm>
#include <cmath>
#include <limits>

#include "tnav/controller/controller.hpp"
#include "tnav/errors.hpp"
#include "tnav/kernels/kernels.hpp"

namespace tnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ControlInput clamp_control(const ControlInput& u, const ControllerParams& p) {
  return {clamp(u.zeta, p.zeta_min, p.zeta_max),
          clamp(u.omega, -p.omega_max, p.omega_max)};
}

// Shift the warm start one step: drop u_0, duplicate the tail.
void shift_warm(std::vector<ControlInput>& warm, int horizon) {
  if (static_cast<int>(warm.size()) != horizon)
    warm.assign(horizon, ControlInput{});
  else if (horizon > 1) {
    std::rotate(warm.begin(), warm.begin() + 1, warm.end());
    warm.back() = warm[horizon - 2];
  }
}

void fill_result(SolveResult& r, const TraversabilityMap& trav,
                 const RobotState& state, const ReferenceWindow& refs,
                 const ControllerParams& params,
                 const std::vector<ControlInput>& seq,
                 const std::vector<std::pair<double, double>>& offsets) {
  r.sequence = seq;
  r.first = seq.front();
  const auto states = rollout(state, seq, params.dt);
  r.objective_value = objective(trav, states, seq, refs, params.weights,
                                params.adaptive, offsets);
  r.psi_first = refs.psi[advance_cursor(refs, 0, state.x, state.y)];
  r.w_first = params.adaptive
                  ? adaptive_W(r.psi_first, params.weights.w_v,
                               params.weights.k_q, params.psi_clamp)
                  : params.weights.w_v;
  if (params.adaptive) {
    const double mt = trav.mean_tau_at(states.front().x, states.front().y);
    r.r_scale_first = mt >= 1.0 ? kInf : adaptive_R_scale(mt);
  } else {
    r.r_scale_first = 1.0;
  }
}

}  // namespace

SolveResult solve_mppi(const TraversabilityMap& trav, const RobotState& state,
                       const ReferenceWindow& refs,
                       const ControllerParams& params,
                       std::vector<ControlInput>& warm, Rng& rng) {
  const int T = params.horizon;
  TNAV_REQUIRE(!refs.states.empty(), "empty reference window");
  shift_warm(warm, T);
  const auto offsets =
      draw_open_offsets(rng, params.open_samples, params.open_radius);

  const int N = params.rollouts;
  const ObjectiveWeights& w = params.weights;

  // Candidate controls, SoA by step: u[k][i].
  std::vector<std::vector<double>> uz(T, std::vector<double>(N));
  std::vector<std::vector<double>> uo(T, std::vector<double>(N));
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < T; ++k) {
      const double ez = rng.normal() * params.noise_zeta;
      const double eo = rng.normal() * params.noise_omega;
      uz[k][i] = clamp(warm[k].zeta + ez, params.zeta_min, params.zeta_max);
      uo[k][i] = clamp(warm[k].omega + eo, -params.omega_max, params.omega_max);
    }
  }

  // Velocity gain per window sample, shared by all rollouts.
  const std::size_t M = refs.states.size();
  std::vector<double> wk_sample(M, w.w_v);
  if (params.adaptive)
    for (std::size_t j = 0; j < M; ++j)
      wk_sample[j] = adaptive_W(refs.psi[j], w.w_v, w.k_q, params.psi_clamp);

  std::vector<double> x(N, state.x), y(N, state.y), th(N, state.theta);
  std::vector<double> cost(N, 0.0), r_scale(N, 1.0), ctau(N, 0.0);
  std::vector<double> rxd(N), ryd(N), rthd(N), rvd(N), rwk(N);
  std::vector<std::size_t> cur(N, 0);
  std::vector<char> saturated(N, 0);

  for (int k = 0; k < T; ++k) {
    const double* zk = uz[k].data();
    const double* ok = uo[k].data();
    for (int i = 0; i < N; ++i) {
      x[i] += zk[i] * std::cos(th[i]) * params.dt;
      y[i] += zk[i] * std::sin(th[i]) * params.dt;
      th[i] = wrap_angle(th[i] + ok[i] * params.dt);
    }
    for (int i = 0; i < N; ++i) {
      const std::size_t c = advance_cursor(refs, cur[i], x[i], y[i]);
      cur[i] = c;
      rxd[i] = refs.states[c].x;
      ryd[i] = refs.states[c].y;
      rthd[i] = refs.states[c].theta;
      rvd[i] = refs.v_desired[c];
      rwk[i] = wk_sample[c];
    }
    if (params.adaptive) {
      for (int i = 0; i < N; ++i) {
        const double mt = trav.mean_tau_at(x[i], y[i]);
        if (mt >= 1.0) {
          saturated[i] = 1;
          r_scale[i] = 1.0;
        } else {
          const double d = 1.0 - mt;
          r_scale[i] = 1.0 / (d * d);
        }
      }
    }
    kernels::step_cost(x.data(), y.data(), th.data(), zk, ok, r_scale.data(),
                       rxd.data(), ryd.data(), rthd.data(), rvd.data(),
                       rwk.data(), w.qx, w.qy, w.qtheta, w.r_zeta, w.r_omega,
                       cost.data(), N);
    if (!offsets.empty()) {
      for (int i = 0; i < N; ++i) {
        double t = 0.0;
        for (const auto& [ox, oy] : offsets) t += trav.tau_at(x[i] + ox, y[i] + oy);
        ctau[i] += t;
      }
    }
  }

  const double probe_count =
      offsets.empty() ? 1.0 : static_cast<double>(T) * offsets.size();
  double jmin = kInf;
  for (int i = 0; i < N; ++i) {
    cost[i] += w.lambda_open * ctau[i] / probe_count;
    if (saturated[i]) cost[i] = kInf;
    jmin = std::min(jmin, cost[i]);
  }

  SolveResult result;
  if (!std::isfinite(jmin)) {
    // Every rollout crossed saturated terrain; keep the warm sequence.
    fill_result(result, trav, state, refs, params, warm, offsets);
    return result;
  }

  std::vector<double> weight(N);
  double wsum = 0.0;
  for (int i = 0; i < N; ++i) {
    weight[i] =
        std::isfinite(cost[i])
            ? std::exp(-(cost[i] - jmin) / params.temperature)
            : 0.0;
    wsum += weight[i];
  }
  std::vector<ControlInput> seq(T);
  for (int k = 0; k < T; ++k) {
    double az = 0.0, ao = 0.0;
    for (int i = 0; i < N; ++i) {
      az += weight[i] * uz[k][i];
      ao += weight[i] * uo[k][i];
    }
    seq[k] = clamp_control({az / wsum, ao / wsum}, params);
  }
  warm = seq;
  fill_result(result, trav, state, refs, params, seq, offsets);
  return result;
}

SolveResult solve_mpc_gradient(const TraversabilityMap& trav,
                               const RobotState& state,
                               const ReferenceWindow& refs,
                               const ControllerParams& params,
                               std::vector<ControlInput>& warm, Rng& rng) {
  const int T = params.horizon;
  TNAV_REQUIRE(!refs.states.empty(), "empty reference window");
  shift_warm(warm, T);
  const auto offsets =
      draw_open_offsets(rng, params.open_samples, params.open_radius);

  auto eval = [&](const std::vector<ControlInput>& u) {
    const auto states = rollout(state, u, params.dt);
    return objective(trav, states, u, refs, params.weights, params.adaptive,
                     offsets);
  };

  std::vector<ControlInput> u(T);
  for (int k = 0; k < T; ++k) u[k] = clamp_control(warm[k], params);
  double j = eval(u);
  if (!std::isfinite(j)) {
    // Warm start predicts saturated terrain; restart from rest.
    std::fill(u.begin(), u.end(), ControlInput{});
    j = eval(u);
  }

  const double h = params.fd_epsilon;
  std::vector<ControlInput> up, um, trial(T);
  for (int it = 0; it < params.mpc_iterations && std::isfinite(j); ++it) {
    // Central finite differences on the flattened control sequence. The
    // open-space probe offsets are frozen for the whole solve, so the
    // objective is smooth in u wherever the map fields are.
    std::vector<ControlInput> grad(T);
    for (int k = 0; k < T; ++k) {
      up = u;
      um = u;
      up[k].zeta += h;
      um[k].zeta -= h;
      grad[k].zeta = (eval(up) - eval(um)) / (2.0 * h);
      up = u;
      um = u;
      up[k].omega += h;
      um[k].omega -= h;
      grad[k].omega = (eval(up) - eval(um)) / (2.0 * h);
    }
    // Monotone projected step with backtracking.
    double alpha = params.mpc_step;
    bool accepted = false;
    for (int ls = 0; ls < params.line_search_max; ++ls) {
      for (int k = 0; k < T; ++k)
        trial[k] = clamp_control({u[k].zeta - alpha * grad[k].zeta,
                                  u[k].omega - alpha * grad[k].omega},
                                 params);
      const double jt = eval(trial);
      if (jt < j - 1e-12) {
        u = trial;
        j = jt;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }

  warm = u;
  SolveResult result;
  fill_result(result, trav, state, refs, params, u, offsets);
  return result;
}

}  // namespace tnav
