#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "chemtau/chebyshev.hpp"
#include "chemtau/network.hpp"

namespace chemtau {

enum class Method {
  ssa,
  explicit_tau,
  sk_tau_rock,
  psk_tau_rock,
  implicit_tau,
  pimp_tau,
  trapezoidal_tau,
};

const std::string& method_name(Method m);
std::optional<Method> method_by_name(std::string_view name);

struct MethodConfig {
  Method method = Method::ssa;
  double tau = 0.0;               // leap step size; unused by the SSA
  double eps = kDefaultDamping;   // damping of the stabilized methods
  int fixed_stages = 0;           // > 0 pins s instead of per-step selection
  double newton_tol = 1e-10;      // max-norm of the Newton increment
  int newton_max_iter = 50;
};

struct StepperState {
  double t = 0.0;
  StateVec x;
  RngStream rng;
  std::vector<double> eigvec;  // power-method warm start
  int stages = 0;              // stage count of the last stabilized step
};

// Reused per-trajectory scratch; one instance per concurrent trajectory.
struct StepWorkspace {
  StateVec q, arg, f, k0, k1, k2, abs;
};

// Thrown when an implicit solve does not converge.
struct StepFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SsaOutcome { fired, absorbed, reached_t_max };

// One exact SSA event: exponential waiting time at rate sum(a), categorical
// reaction choice, state and time update. Absorbed when all propensities
// vanish. A waiting time that overshoots t_max advances the clock to t_max
// and leaves the state alone (valid by memorylessness).
SsaOutcome ssa_step(const ReactionNetwork& net, StepperState& st,
                    double t_max = std::numeric_limits<double>::infinity());

// Plain leap: x += sum_j nu_j Poisson(a_j(|x|) tau). Keeps integer states.
void explicit_tau_step(const ReactionNetwork& net, StepperState& st, double tau,
                       StepWorkspace& ws);

// Stage recursion of the stabilized leap over an arbitrary drift callable
// and a fixed noise vector q (drawn once per step):
//   K_0 = x
//   K_1 = K_0 + mu_1 tau f(K_0 + nu_1 q) + kappa_1 q
//   K_j = nu_j K_{j-1} + kappa_j K_{j-2} + mu_j tau f(K_{j-1}),  j = 2..s
// drift(in, out) runs exactly s times; three stage vectors are kept alive.
template <class DriftFn>
void sk_stage_recursion(const ChebyshevCoefficients& c, double tau, DriftFn&& drift,
                        const StateVec& q, StateVec& x, StepWorkspace& ws) {
  const std::size_t n = x.size();
  ws.arg.resize(n);
  ws.f.resize(n);
  for (std::size_t i = 0; i < n; ++i) ws.arg[i] = x[i] + c.nu[0] * q[i];
  drift(ws.arg, ws.f);

  ws.k0 = x;
  ws.k1.resize(n);
  ws.k2.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    ws.k1[i] = ws.k0[i] + c.mu[0] * tau * ws.f[i] + c.kappa[0] * q[i];

  for (int j = 2; j <= c.s; ++j) {
    drift(ws.k1, ws.f);
    const double nu_j = c.nu[j - 1], kappa_j = c.kappa[j - 1], mu_tau = c.mu[j - 1] * tau;
    for (std::size_t i = 0; i < n; ++i)
      ws.k2[i] = nu_j * ws.k1[i] + kappa_j * ws.k0[i] + mu_tau * ws.f[i];
    std::swap(ws.k0, ws.k1);
    std::swap(ws.k1, ws.k2);
  }
  x = ws.k1;
}

// Stabilized leap step on a network: draws q = Q(x, tau) once and runs the
// stage recursion with the mass-action drift.
void sk_tau_rock_step(const ReactionNetwork& net, StepperState& st, double tau,
                      const ChebyshevCoefficients& c, StepWorkspace& ws);

// Postprocessed observation x + alpha Q(x, tau). Leaves the marching state
// vector untouched; advances only the trajectory RNG.
void psk_observe(const ReactionNetwork& net, StepperState& st, double tau,
                 const ChebyshevCoefficients& c, StateVec& out, StepWorkspace& ws);

// Implicit leap: solve x' = x + tau f(x') + Q(x, tau) by damped Newton on
// the analytic Jacobian. Real-valued states.
void implicit_tau_step(const ReactionNetwork& net, StepperState& st, double tau,
                       const MethodConfig& cfg, StepWorkspace& ws);

// Trapezoidal leap: x' = x + tau/2 (f(x) + f(x')) + Q(x, tau).
void trapezoidal_tau_step(const ReactionNetwork& net, StepperState& st, double tau,
                          const MethodConfig& cfg, StepWorkspace& ws);

// Observation of the postprocessed implicit scheme: ten implicit relaxation
// steps of size 0.2/rho run from a copy of the current state.
void pimp_observe(const ReactionNetwork& net, StepperState& st, double rho,
                  const MethodConfig& cfg, StateVec& out, StepWorkspace& ws);

struct RunHooks {
  // Marching states every `stride` steps (stride 0 disables); the initial
  // state is reported when the horizon is positive.
  long stride = 0;
  std::function<void(double, const StateVec&)> on_step;
  // Ascending times at which a method observation is recorded; trajectories
  // land on these exactly (the step is shortened, stage selection re-run).
  std::span<const double> observe_at;
  std::function<void(double, const StateVec&)> on_observe;
};

// Marches x0 to t_end and returns the method observation at the final time
// (postprocessed for psk/pimp). Stabilized methods re-estimate the spectral
// radius every step unless cfg.fixed_stages pins the stage count.
StateVec run_trajectory(const ReactionNetwork& net, const MethodConfig& cfg, const StateVec& x0,
                        double t_end, RngStream rng, const RunHooks& hooks = {});

}  // namespace chemtau
