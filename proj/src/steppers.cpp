#include "chemtau/steppers.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "chemtau/spectral.hpp"
#include "chemtau/stability.hpp"

namespace chemtau {

namespace {

const std::string kMethodNames[] = {"ssa",          "explicit_tau", "sk_tau_rock",
                                    "psk_tau_rock", "implicit_tau", "pimp_tau",
                                    "trapezoidal_tau"};

thread_local std::vector<double> tls_prop;

// Solve y = base + weight * tau * f(y) by damped Newton with the analytic
// mass-action Jacobian. Starting guess y0.
void newton_solve(const ReactionNetwork& net, const StateVec& base, double weight_tau,
                  const StateVec& y0, const MethodConfig& cfg, StateVec& y, StepWorkspace& ws) {
  const int n = net.n_species();
  y = y0;

  Eigen::VectorXd residual(n), step(n);
  Eigen::MatrixXd system(n, n);

  auto eval_residual = [&](const StateVec& point, Eigen::VectorXd& out) {
    net.drift(point, ws.f);
    for (int i = 0; i < n; ++i) out[i] = point[i] - base[i] - weight_tau * ws.f[i];
  };

  eval_residual(y, residual);
  double res_norm = residual.norm();
  StateVec trial(n);

  for (int iter = 0; iter < cfg.newton_max_iter; ++iter) {
    system = -weight_tau * analytic_jacobian(net, y);
    system.diagonal().array() += 1.0;
    step = system.partialPivLu().solve(-residual);

    double damping = 1.0;
    double trial_norm = 0.0;
    for (int halving = 0; halving < 9; ++halving) {
      for (int i = 0; i < n; ++i) trial[i] = y[i] + damping * step[i];
      Eigen::VectorXd trial_res(n);
      eval_residual(trial, trial_res);
      trial_norm = trial_res.norm();
      if (trial_norm <= res_norm || halving == 8) {
        y = trial;
        residual = trial_res;
        res_norm = trial_norm;
        break;
      }
      damping *= 0.5;
    }

    if (damping * step.lpNorm<Eigen::Infinity>() <= cfg.newton_tol) return;
  }
  throw StepFailure("newton iteration did not converge within " +
                    std::to_string(cfg.newton_max_iter) + " steps");
}

}  // namespace

const std::string& method_name(Method m) { return kMethodNames[static_cast<int>(m)]; }

std::optional<Method> method_by_name(std::string_view name) {
  for (int i = 0; i < 7; ++i)
    if (kMethodNames[i] == name) return static_cast<Method>(i);
  return std::nullopt;
}

SsaOutcome ssa_step(const ReactionNetwork& net, StepperState& st, double t_max) {
  net.propensities(st.x, tls_prop);
  double a0 = 0.0;
  for (double aj : tls_prop) a0 += aj;
  if (a0 <= 0.0) return SsaOutcome::absorbed;

  const double wait = st.rng.exponential(a0);
  if (st.t + wait > t_max) {
    st.t = t_max;
    return SsaOutcome::reached_t_max;
  }
  st.t += wait;

  double target = st.rng.uniform() * a0;
  int j = 0;
  const int m = net.n_reactions();
  for (; j < m - 1; ++j) {
    target -= tls_prop[j];
    if (target <= 0.0) break;
  }
  const std::vector<int>& col = net.stoich_column(j);
  for (std::size_t i = 0; i < col.size(); ++i) st.x[i] += col[i];
  return SsaOutcome::fired;
}

void explicit_tau_step(const ReactionNetwork& net, StepperState& st, double tau,
                       StepWorkspace& ws) {
  ws.abs.resize(st.x.size());
  for (std::size_t i = 0; i < st.x.size(); ++i) ws.abs[i] = std::fabs(st.x[i]);
  net.propensities(ws.abs, tls_prop);
  for (int j = 0; j < net.n_reactions(); ++j) {
    const double mean = tls_prop[j] * tau;
    if (mean == 0.0) continue;
    const double fired = static_cast<double>(st.rng.poisson(mean));
    if (fired == 0.0) continue;
    const std::vector<int>& col = net.stoich_column(j);
    for (std::size_t i = 0; i < col.size(); ++i) st.x[i] += col[i] * fired;
  }
}

void sk_tau_rock_step(const ReactionNetwork& net, StepperState& st, double tau,
                      const ChebyshevCoefficients& c, StepWorkspace& ws) {
  net.noise_q(st.x, tau, st.rng, ws.q);
  sk_stage_recursion(
      c, tau, [&net](const StateVec& in, StateVec& out) { net.drift(in, out); }, ws.q, st.x, ws);
  st.stages = c.s;
}

void psk_observe(const ReactionNetwork& net, StepperState& st, double tau,
                 const ChebyshevCoefficients& c, StateVec& out, StepWorkspace& ws) {
  net.noise_q(st.x, tau, st.rng, ws.q);
  out.resize(st.x.size());
  for (std::size_t i = 0; i < st.x.size(); ++i) out[i] = st.x[i] + c.alpha * ws.q[i];
}

void implicit_tau_step(const ReactionNetwork& net, StepperState& st, double tau,
                       const MethodConfig& cfg, StepWorkspace& ws) {
  const int n = net.n_species();
  net.noise_q(st.x, tau, st.rng, ws.q);
  StateVec base(n);
  for (int i = 0; i < n; ++i) base[i] = st.x[i] + ws.q[i];
  // Newton starts at the current state: for stiff drifts the solution is a
  // damped perturbation of it, while an explicit predictor can jump into
  // the basin of a spurious root of the mass-action polynomial.
  newton_solve(net, base, tau, st.x, cfg, st.x, ws);
}

void trapezoidal_tau_step(const ReactionNetwork& net, StepperState& st, double tau,
                          const MethodConfig& cfg, StepWorkspace& ws) {
  const int n = net.n_species();
  net.noise_q(st.x, tau, st.rng, ws.q);
  net.drift(st.x, ws.f);
  StateVec base(n);
  for (int i = 0; i < n; ++i) base[i] = st.x[i] + 0.5 * tau * ws.f[i] + ws.q[i];
  newton_solve(net, base, 0.5 * tau, st.x, cfg, st.x, ws);
}

void pimp_observe(const ReactionNetwork& net, StepperState& st, double rho,
                  const MethodConfig& cfg, StateVec& out, StepWorkspace& ws) {
  if (!(rho > 0.0)) {
    out = st.x;
    return;
  }
  const double dtau = 0.2 / rho;
  StepperState relax;
  relax.x = st.x;
  relax.rng = st.rng;  // draws continue on the trajectory stream
  for (int k = 0; k < 10; ++k) implicit_tau_step(net, relax, dtau, cfg, ws);
  st.rng = relax.rng;
  out = relax.x;
}

namespace {

bool is_leap(Method m) { return m != Method::ssa; }

// One leap step of size tau at the current state, dispatching per method.
void leap_step(const ReactionNetwork& net, const MethodConfig& cfg, StepperState& st, double tau,
               StepWorkspace& ws) {
  switch (cfg.method) {
    case Method::explicit_tau:
      explicit_tau_step(net, st, tau, ws);
      break;
    case Method::sk_tau_rock:
    case Method::psk_tau_rock: {
      int s = cfg.fixed_stages;
      if (s <= 0) {
        const SpectralEstimate est = estimate_rho(net, st.x, &st.eigvec);
        st.eigvec = est.eigvec;
        s = select_stages(tau, est.rho, cfg.eps);
      }
      sk_tau_rock_step(net, st, tau, coefficients(s, cfg.eps), ws);
      break;
    }
    case Method::implicit_tau:
    case Method::pimp_tau:
      implicit_tau_step(net, st, tau, cfg, ws);
      break;
    case Method::trapezoidal_tau:
      trapezoidal_tau_step(net, st, tau, cfg, ws);
      break;
    case Method::ssa:
      break;
  }
}

}  // namespace

StateVec run_trajectory(const ReactionNetwork& net, const MethodConfig& cfg, const StateVec& x0,
                        double t_end, RngStream rng, const RunHooks& hooks) {
  if (t_end < 0.0) throw std::invalid_argument("run_trajectory: t_end must be nonnegative");
  if (is_leap(cfg.method) && !(cfg.tau > 0.0))
    throw std::invalid_argument("run_trajectory: leap methods need tau > 0");
  if (static_cast<int>(x0.size()) != net.n_species())
    throw std::invalid_argument("run_trajectory: state dimension mismatch");

  StepperState st;
  st.x = x0;
  st.rng = rng;
  StepWorkspace ws;

  std::size_t next_obs = 0;
  auto skip_past_obs = [&](double t) {
    while (next_obs < hooks.observe_at.size() && hooks.observe_at[next_obs] <= t) ++next_obs;
  };

  // Method observation at the current state; tau_obs is the step size the
  // postprocessors reuse (the last marching step).
  StateVec obs;
  auto observe = [&](double tau_obs) -> const StateVec& {
    switch (cfg.method) {
      case Method::psk_tau_rock: {
        int s = st.stages;
        if (s <= 0) {
          const SpectralEstimate est = estimate_rho(net, st.x, &st.eigvec);
          st.eigvec = est.eigvec;
          s = select_stages(tau_obs, est.rho, cfg.eps);
        }
        psk_observe(net, st, tau_obs, coefficients(s, cfg.eps), obs, ws);
        return obs;
      }
      case Method::pimp_tau: {
        const SpectralEstimate est = estimate_rho(net, st.x, &st.eigvec);
        st.eigvec = est.eigvec;
        pimp_observe(net, st, est.rho, cfg, obs, ws);
        return obs;
      }
      default:
        obs = st.x;
        return obs;
    }
  };

  StateVec final_obs;
  bool final_recorded = false;
  auto record_observation = [&](double t_obs, double tau_obs) {
    const StateVec& value = observe(tau_obs);
    if (hooks.on_observe) hooks.on_observe(t_obs, value);
    if (t_obs >= t_end) {
      final_obs = value;
      final_recorded = true;
    }
  };

  long step_count = 0;
  const bool emit = hooks.stride > 0 && hooks.on_step;
  if (emit && t_end > 0.0) hooks.on_step(st.t, st.x);

  // Observation requested at t = 0.
  if (!hooks.observe_at.empty() && hooks.observe_at[0] <= 0.0)
    record_observation(0.0, cfg.tau > 0.0 ? cfg.tau : 1.0);
  skip_past_obs(0.0);

  double last_tau = cfg.tau;

  if (cfg.method == Method::ssa) {
    while (st.t < t_end) {
      const double next_stop =
          next_obs < hooks.observe_at.size() ? std::min(hooks.observe_at[next_obs], t_end) : t_end;
      const SsaOutcome outcome = ssa_step(net, st, next_stop);
      if (outcome == SsaOutcome::absorbed) break;  // frozen state from here on
      if (outcome == SsaOutcome::fired) {
        ++step_count;
        if (emit && step_count % hooks.stride == 0) hooks.on_step(st.t, st.x);
      }
      if (next_obs < hooks.observe_at.size() && st.t >= hooks.observe_at[next_obs]) {
        record_observation(hooks.observe_at[next_obs], 1.0);
        ++next_obs;
      }
    }
    while (next_obs < hooks.observe_at.size() && hooks.observe_at[next_obs] <= t_end) {
      record_observation(hooks.observe_at[next_obs], 1.0);
      ++next_obs;
    }
    st.t = t_end;
    return final_recorded ? final_obs : observe(1.0);
  }

  const double guard = 1e-12 * std::max(1.0, cfg.tau);
  while (t_end - st.t > guard) {
    const double next_stop =
        next_obs < hooks.observe_at.size() ? std::min(hooks.observe_at[next_obs], t_end) : t_end;
    const double remaining = next_stop - st.t;
    double tau_eff;
    bool landing;
    if (remaining <= cfg.tau * (1.0 + 1e-12)) {
      tau_eff = remaining;
      landing = true;
    } else {
      tau_eff = cfg.tau;
      landing = false;
    }
    leap_step(net, cfg, st, tau_eff, ws);
    last_tau = tau_eff;
    st.t = landing ? next_stop : st.t + cfg.tau;
    ++step_count;
    if (emit && step_count % hooks.stride == 0) hooks.on_step(st.t, st.x);
    if (next_obs < hooks.observe_at.size() && st.t >= hooks.observe_at[next_obs] - guard) {
      record_observation(hooks.observe_at[next_obs], last_tau);
      ++next_obs;
    }
  }
  st.t = t_end;
  return final_recorded ? final_obs : observe(last_tau);
}

}  // namespace chemtau
