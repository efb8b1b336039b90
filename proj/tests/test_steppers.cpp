#include <cmath>
#include <vector>

#include <doctest.h>

#include "chemtau/analysis.hpp"
#include "chemtau/network.hpp"
#include "chemtau/stability.hpp"
#include "chemtau/steppers.hpp"

using namespace chemtau;

namespace {

// Noise-free stage recursion on f(x) = lambda x: the one-step map equals
// A_s(tau lambda); a unit noise impulse from rest produces B_s(tau lambda).
double stepper_a(int s, double eps, double z) {
  const ChebyshevCoefficients& c = coefficients(s, eps);
  StateVec x{1.0};
  const StateVec q{0.0};
  StepWorkspace ws;
  sk_stage_recursion(
      c, 1.0, [z](const StateVec& in, StateVec& out) { out.assign(1, z * in[0]); }, q, x, ws);
  return x[0];
}

double stepper_b(int s, double eps, double z) {
  const ChebyshevCoefficients& c = coefficients(s, eps);
  StateVec x{0.0};
  const StateVec q{1.0};
  StepWorkspace ws;
  sk_stage_recursion(
      c, 1.0, [z](const StateVec& in, StateVec& out) { out.assign(1, z * in[0]); }, q, x, ws);
  return x[0];
}

}  // namespace

TEST_CASE("stage recursion reproduces the stability polynomials") {
  RngStream rng(31, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int s = 1 + static_cast<int>(rng.uniform() * 30.0);
    const double eps = rng.uniform() < 0.5 ? 0.0 : 0.05;
    const double ell = stability_domain_size(s, eps);
    const double z = -ell * rng.uniform();
    const double a = a_poly(s, eps, z);
    const double b = b_poly(s, eps, z);
    CHECK(std::fabs(stepper_a(s, eps, z) - a) <= 1e-12 * std::max(std::fabs(a), 1e-2));
    CHECK(std::fabs(stepper_b(s, eps, z) - b) <= 1e-12 * std::max(std::fabs(b), 1e-2));
  }
}

TEST_CASE("one-stage step has the documented closed form") {
  // s=1: x' = x + tau f(x + q/2) + q
  ReactionNetwork decay({{"X"}}, {Reaction{0.25, {{0, 1}}, {}, {}}});
  StepperState st;
  st.x = {100.0};
  st.rng = RngStream(32, 0);
  StepWorkspace ws;

  RngStream probe = st.rng;  // replay the same Poisson draw
  StateVec q;
  decay.noise_q(st.x, 2.0, probe, q);

  sk_tau_rock_step(decay, st, 2.0, coefficients(1, 0.05), ws);
  const double expected = 100.0 + 2.0 * (-0.25 * (100.0 + 0.5 * q[0])) + q[0];
  CHECK(st.x[0] == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("drift evaluations per stabilized step and a single noise draw") {
  for (int s : {1, 2, 7, 23}) {
    const ChebyshevCoefficients& c = coefficients(s, 0.05);
    int drift_calls = 0;
    StateVec x{5.0};
    const StateVec q{0.3};
    StepWorkspace ws;
    sk_stage_recursion(
        c, 0.5,
        [&drift_calls](const StateVec& in, StateVec& out) {
          ++drift_calls;
          out.assign(1, -in[0]);
        },
        q, x, ws);
    CHECK(drift_calls == s);
  }
}

TEST_CASE("explicit leap equals drift plus compensated noise under shared draws") {
  const Model mm = builtin_model(BuiltinModel::michaelis_menten);
  StepperState st;
  st.x = mm.x0;
  st.rng = RngStream(33, 5);
  StepWorkspace ws;
  const double tau = 0.2;

  RngStream replay = st.rng;
  explicit_tau_step(mm.network, st, tau, ws);

  const StateVec f = mm.network.drift(mm.x0);
  StateVec q;
  mm.network.noise_q(mm.x0, tau, replay, q);
  for (int i = 0; i < mm.network.n_species(); ++i)
    CHECK(st.x[i] == doctest::Approx(mm.x0[i] + tau * f[i] + q[i]).epsilon(1e-9));
}

TEST_CASE("explicit leap keeps integer states and never moves a dead system") {
  ReactionNetwork idle({{"A"}}, {Reaction{0.0, {{0, 1}}, {}, {}}});
  StepperState st;
  st.x = {7.0};
  st.rng = RngStream(34, 0);
  StepWorkspace ws;
  explicit_tau_step(idle, st, 1.0, ws);
  CHECK(st.x[0] == 7.0);

  const Model sg = builtin_model(BuiltinModel::schlogl);
  StepperState st2;
  st2.x = sg.x0;
  st2.rng = RngStream(35, 0);
  for (int k = 0; k < 50; ++k) {
    explicit_tau_step(sg.network, st2, 0.1, ws);
    CHECK(st2.x[0] == std::floor(st2.x[0]));
  }
}

TEST_CASE("ssa: single source reaction fires at the Poisson rate") {
  // 0 -> S at rate c via a buffered source pool
  ReactionNetwork source({{"S"}, {"B", true}}, {Reaction{2.5, {{1, 1}}, {{0, 1}}, {}}});
  const double t_end = 40.0;
  const int n = 4000;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const StateVec out = run_trajectory(source, MethodConfig{Method::ssa}, StateVec{0.0, 1.0},
                                        t_end, RngStream(36, i));
    total += out[0];
  }
  const double mean = total / n;  // E = c * t_end = 100
  CHECK(std::fabs(mean - 100.0) < 4.0 * std::sqrt(100.0 / n));
}

TEST_CASE("ssa waiting time and absorption") {
  ReactionNetwork decay({{"X"}}, {Reaction{1.0, {{0, 1}}, {}, {}}});
  StepperState st;
  st.x = {0.0};
  st.rng = RngStream(37, 0);
  CHECK(ssa_step(decay, st) == SsaOutcome::absorbed);

  // mean waiting time at rate a0
  StepperState st2;
  st2.x = {50.0};
  st2.rng = RngStream(38, 0);
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    st2.t = 0.0;
    StateVec keep = st2.x;
    REQUIRE(ssa_step(decay, st2) == SsaOutcome::fired);
    acc += st2.t;
    st2.x = keep;
  }
  CHECK(acc / n == doctest::Approx(1.0 / 50.0).epsilon(0.02));
}

TEST_CASE("implicit step solves the linear test equation in closed form") {
  const Model rv = builtin_model(BuiltinModel::reversible_isomerization,
                                 {{"c1", 3.0}, {"c2", 1.0}, {"x_total", 100.0}});
  const double lambda = -4.0, tau = 0.5;
  StepperState st;
  st.x = {40.0};
  st.rng = RngStream(39, 0);
  StepWorkspace ws;
  MethodConfig cfg;
  cfg.method = Method::implicit_tau;
  cfg.tau = tau;

  RngStream replay = st.rng;
  StateVec q;
  rv.network.noise_q(st.x, tau, replay, q);

  implicit_tau_step(rv.network, st, tau, cfg, ws);
  // x' = (x + c2 XT tau + Q) / (1 - tau lambda)
  const double expected = (40.0 + 1.0 * 100.0 * tau + q[0]) / (1.0 - tau * lambda);
  CHECK(st.x[0] == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("implicit and trapezoidal amplification on the pure decay line") {
  // Q == 0 when no reaction can fire; use a rate-0 companion to keep noise
  // silent and check the deterministic amplification factors.
  ReactionNetwork decay({{"X"}}, {Reaction{1.0, {{0, 1}}, {}, {}}});
  const double tau = 0.5, z = -0.5;
  StepWorkspace ws;
  MethodConfig cfg;
  cfg.tau = tau;

  // noise silenced by folding the Poisson draw: run with x such that the
  // draw is deterministic zero is impossible, so instead subtract the draw.
  StepperState st;
  st.x = {1000.0};
  st.rng = RngStream(40, 0);
  RngStream replay = st.rng;
  StateVec q;
  decay.noise_q(st.x, tau, replay, q);
  cfg.method = Method::implicit_tau;
  implicit_tau_step(decay, st, tau, cfg, ws);
  CHECK((st.x[0] - q[0] / (1.0 - z)) == doctest::Approx(1000.0 / (1.0 - z)).epsilon(1e-9));

  StepperState st2;
  st2.x = {1000.0};
  st2.rng = RngStream(40, 0);  // same stream, same draw
  cfg.method = Method::trapezoidal_tau;
  trapezoidal_tau_step(decay, st2, tau, cfg, ws);
  const double amp = (1.0 + 0.5 * z) / (1.0 - 0.5 * z);
  CHECK((st2.x[0] - q[0] / (1.0 - 0.5 * z)) ==
        doctest::Approx(1000.0 * amp).epsilon(1e-9));
}

TEST_CASE("postprocessed observation leaves the marching state alone") {
  const Model rv = builtin_model(BuiltinModel::reversible_isomerization);
  MethodConfig cfg;
  cfg.method = Method::psk_tau_rock;
  cfg.tau = 0.4;
  std::vector<double> obs_times{2.0, 4.0};
  RunHooks hooks;
  hooks.observe_at = obs_times;
  std::vector<StateVec> observed;
  hooks.on_observe = [&](double, const StateVec& x) { observed.push_back(x); };
  const StateVec final_obs =
      run_trajectory(rv.network, cfg, rv.x0, 4.0, RngStream(41, 0), hooks);
  REQUIRE(observed.size() == 2);
  CHECK(final_obs == observed[1]);
}

TEST_CASE("trajectory step count and determinism") {
  const Model rv = builtin_model(BuiltinModel::reversible_isomerization);
  MethodConfig cfg;
  cfg.method = Method::sk_tau_rock;
  cfg.tau = 0.25;
  long steps = 0;
  RunHooks hooks;
  hooks.stride = 1;
  hooks.on_step = [&](double, const StateVec&) { ++steps; };
  run_trajectory(rv.network, cfg, rv.x0, 5.0, RngStream(42, 0), hooks);
  CHECK(steps == 21);  // initial row plus exactly t_end/tau steps

  const StateVec a = run_trajectory(rv.network, cfg, rv.x0, 5.0, RngStream(43, 7));
  const StateVec b = run_trajectory(rv.network, cfg, rv.x0, 5.0, RngStream(43, 7));
  CHECK(a == b);

  // a non-multiple horizon still lands exactly, with a shortened last step
  long steps2 = 0;
  hooks.on_step = [&](double, const StateVec&) { ++steps2; };
  run_trajectory(rv.network, cfg, rv.x0, 1.1, RngStream(44, 0), hooks);
  CHECK(steps2 == 6);  // initial row + ceil(1.1 / 0.25) steps
}

TEST_CASE("pimp observation runs exactly ten relaxation substeps") {
  const Model rv = builtin_model(BuiltinModel::reversible_isomerization);
  MethodConfig cfg;
  cfg.method = Method::implicit_tau;
  cfg.tau = 0.5;
  StepperState st;
  st.x = {43.0};
  st.rng = RngStream(45, 0);
  StepWorkspace ws;
  StateVec out;

  // large rho: substeps are tiny, the observation barely moves
  pimp_observe(rv.network, st, 1e9, cfg, out, ws);
  CHECK(std::fabs(out[0] - 43.0) < 1.0);

  // rho = 0 degenerates to the identity observation
  StateVec out2;
  pimp_observe(rv.network, st, 0.0, cfg, out2, ws);
  CHECK(out2 == st.x);
}

TEST_CASE("newton reports breakdown as a step failure") {
  const Model rv = builtin_model(BuiltinModel::nonlinear_reversible);
  MethodConfig cfg;
  cfg.method = Method::implicit_tau;
  cfg.tau = 0.01;
  cfg.newton_max_iter = 1;
  cfg.newton_tol = 1e-18;
  StepperState st;
  st.x = rv.x0;
  st.rng = RngStream(46, 0);
  StepWorkspace ws;
  CHECK_THROWS_AS(implicit_tau_step(rv.network, st, 0.01, cfg, ws), StepFailure);
}
