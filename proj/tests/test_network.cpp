#include <cmath>
#include <fstream>

#include <doctest.h>

#include "chemtau/network.hpp"
#include "chemtau/steppers.hpp"

using namespace chemtau;

TEST_CASE("michaelis-menten propensities and drift at the initial state") {
  const Model mm = builtin_model(BuiltinModel::michaelis_menten);
  REQUIRE(mm.network.n_species() == 4);
  REQUIRE(mm.network.n_reactions() == 3);
  CHECK(mm.network.stoich_column(0) == std::vector<int>{-1, -1, 1, 0});
  CHECK(mm.network.stoich_column(1) == std::vector<int>{1, 1, -1, 0});
  CHECK(mm.network.stoich_column(2) == std::vector<int>{0, 1, -1, 1});

  const StateVec x{3000, 120, 0, 0};
  const std::vector<double> a = mm.network.propensities(x);
  CHECK(a[0] == doctest::Approx(597.6));
  CHECK(a[1] == 0.0);
  CHECK(a[2] == 0.0);

  const StateVec f = mm.network.drift(x);
  CHECK(f[0] == doctest::Approx(-597.6));
  CHECK(f[1] == doctest::Approx(-597.6));
  CHECK(f[2] == doctest::Approx(597.6));
  CHECK(f[3] == 0.0);
}

TEST_CASE("all-zero state without sources fires nothing") {
  const Model mm = builtin_model(BuiltinModel::michaelis_menten);
  const std::vector<double> a = mm.network.propensities(StateVec{0, 0, 0, 0});
  for (double aj : a) CHECK(aj == 0.0);
  const StateVec f = mm.network.drift(StateVec{0, 0, 0, 0});
  for (double fi : f) CHECK(fi == 0.0);
}

TEST_CASE("reversible isomerization reduced form") {
  const Model rv = builtin_model(BuiltinModel::reversible_isomerization);
  const std::vector<double> a = rv.network.propensities(StateVec{40});
  CHECK(a[0] == doctest::Approx(40.0));
  CHECK(a[1] == doctest::Approx(60.0));
  // drift vanishes at the stationary mean c2 X^T / (c1 + c2)
  const StateVec f = rv.network.drift(StateVec{50});
  CHECK(f[0] == doctest::Approx(0.0));
}

TEST_CASE("drift equals stoichiometry times propensities on random states") {
  RngStream rng(11, 0);
  for (BuiltinModel which :
       {BuiltinModel::reversible_isomerization, BuiltinModel::schlogl,
        BuiltinModel::michaelis_menten, BuiltinModel::nonlinear_reversible,
        BuiltinModel::genetic_loop}) {
    const Model model = builtin_model(which);
    const int n = model.network.n_species();
    // stay inside each conservation law: beyond it the reduced models are
    // unphysical and the signed drift deliberately keeps the restoring term
    StateVec cap(n, 500.0);
    for (int j = 0; j < model.network.n_reactions(); ++j)
      if (const auto& comp = model.network.reaction(j).complement)
        cap[comp->species] = std::min(cap[comp->species], comp->total);
    for (int trial = 0; trial < 100; ++trial) {
      StateVec x(n);
      for (int i = 0; i < n; ++i) x[i] = std::floor(rng.uniform() * cap[i]);
      const std::vector<double> a = model.network.propensities(x);
      const StateVec f = model.network.drift(x);
      for (int i = 0; i < n; ++i) {
        double expected = 0.0;
        for (int j = 0; j < model.network.n_reactions(); ++j)
          expected += model.network.stoich(i, j) * a[j];
        CHECK(f[i] == expected);  // same sum, exactly
      }
    }
  }
}

TEST_CASE("propensities stay nonnegative on arbitrary real states") {
  RngStream rng(12, 0);
  for (BuiltinModel which : {BuiltinModel::schlogl, BuiltinModel::nonlinear_reversible,
                             BuiltinModel::genetic_loop}) {
    const Model model = builtin_model(which);
    const int n = model.network.n_species();
    for (int trial = 0; trial < 200; ++trial) {
      StateVec x(n);
      for (int i = 0; i < n; ++i) x[i] = 6.0 * (rng.uniform() - 0.3);
      for (double aj : model.network.propensities(x)) CHECK(aj >= 0.0);
    }
  }
}

TEST_CASE("noise_q moments and the absolute-value rule") {
  const Model rv = builtin_model(
      BuiltinModel::reversible_isomerization,
      {{"c1", 1.0}, {"c2", 1.0}, {"x_total", 100.0}});
  RngStream rng(13, 0);
  const StateVec x{40};
  const double tau = 0.1;
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  StateVec q;
  for (int i = 0; i < n; ++i) {
    rv.network.noise_q(x, tau, rng, q);
    sum += q[0];
    sumsq += q[0] * q[0];
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  // Var Q = (a1 + a2) tau = 10; the fourth moment of compensated Poisson
  // sums gives se(S^2) ~ 0.046 at this n.
  CHECK(std::fabs(mean) < 4.0 * std::sqrt(10.0 / n));
  CHECK(std::fabs(var - 10.0) < 0.25);

  // zero propensities give a deterministic zero vector
  const Model mm = builtin_model(BuiltinModel::michaelis_menten);
  RngStream rng2(14, 0);
  const StateVec q0 = mm.network.noise_q(StateVec{0, 0, 0, 0}, 1.0, rng2);
  for (double qi : q0) CHECK(qi == 0.0);

  // negative populations are folded: mean used is c|x| (here 5)
  ReactionNetwork linear({{"X"}}, {Reaction{1.0, {{0, 1}}, {}, {}}});
  RngStream rng3(15, 0);
  double acc = 0.0;
  StateVec qs;
  for (int i = 0; i < 200000; ++i) {
    linear.noise_q(StateVec{-5.0}, 1.0, rng3, qs);
    acc += qs[0] * qs[0];
  }
  CHECK(acc / 200000.0 == doctest::Approx(5.0).epsilon(0.02));  // Var = a tau = 5
}

TEST_CASE("noise_q mean is centered for every builtin at its initial state") {
  for (BuiltinModel which :
       {BuiltinModel::reversible_isomerization, BuiltinModel::schlogl,
        BuiltinModel::michaelis_menten, BuiltinModel::nonlinear_reversible,
        BuiltinModel::genetic_loop}) {
    const Model model = builtin_model(which);
    const double tau = 0.01;
    const int n_species = model.network.n_species();
    const int draws = 100000;
    RngStream rng(16, static_cast<std::uint64_t>(which));
    std::vector<double> sum(n_species, 0.0);
    StateVec q;
    for (int i = 0; i < draws; ++i) {
      model.network.noise_q(model.x0, tau, rng, q);
      for (int sp = 0; sp < n_species; ++sp) sum[sp] += q[sp];
    }
    // Var(Q_i) = sum_j nu_ij^2 a_j tau from independent Poisson counts
    const std::vector<double> a = model.network.propensities(model.x0);
    for (int sp = 0; sp < n_species; ++sp) {
      double var = 0.0;
      for (int j = 0; j < model.network.n_reactions(); ++j)
        var += model.network.stoich(sp, j) * model.network.stoich(sp, j) * a[j] * tau;
      const double se = std::sqrt(var / draws);
      CHECK(std::fabs(sum[sp] / draws) <= 4.0 * se + 1e-12);
    }
  }
}

TEST_CASE("schlogl model structure") {
  const Model sg = builtin_model(BuiltinModel::schlogl);
  REQUIRE(sg.network.n_reactions() == 4);
  const int s = sg.network.species_index("S");
  REQUIRE(s == 0);
  CHECK(sg.network.stoich(s, 0) == 1);
  CHECK(sg.network.stoich(s, 1) == -1);
  CHECK(sg.network.stoich(s, 2) == 1);
  CHECK(sg.network.stoich(s, 3) == -1);
  // buffered rows are identically zero
  for (int j = 0; j < 4; ++j) {
    CHECK(sg.network.stoich(1, j) == 0);
    CHECK(sg.network.stoich(2, j) == 0);
  }
  // propensities at X(0) = 250 with the published constants
  const std::vector<double> a = sg.network.propensities(sg.x0);
  CHECK(a[0] == doctest::Approx(3e-7 * 1e5 * 250.0 * 249.0 / 2.0));
  CHECK(a[1] == doctest::Approx(1e-4 * 250.0 * 249.0 * 248.0 / 6.0));
  CHECK(a[2] == doctest::Approx(1e-3 * 2e5));
  CHECK(a[3] == doctest::Approx(3.5 * 250.0));
}

TEST_CASE("genetic loop constants") {
  const Model gl = builtin_model(BuiltinModel::genetic_loop);
  REQUIRE(gl.network.n_reactions() == 9);
  CHECK(gl.network.reaction(8).rate == 6.0);  // c9
  CHECK(gl.x0 == StateVec{10, 0, 20, 0, 0});
}

TEST_CASE("buffered species never change under any stepper") {
  const Model sg = builtin_model(BuiltinModel::schlogl);
  for (Method m : {Method::ssa, Method::explicit_tau, Method::sk_tau_rock,
                   Method::implicit_tau, Method::trapezoidal_tau}) {
    MethodConfig cfg;
    cfg.method = m;
    cfg.tau = 0.25;
    const StateVec out = run_trajectory(sg.network, cfg, sg.x0, 3.0, RngStream(17, 0));
    CHECK(out[1] == 1e5);
    CHECK(out[2] == 2e5);
  }
}

TEST_CASE("conservation of X1 + 2 X2 in the full nonlinear reversible form") {
  const Model full = nonlinear_reversible_full();
  StepperState st;
  st.x = full.x0;
  st.rng = RngStream(18, 0);
  const double invariant = st.x[0] + 2.0 * st.x[1];
  for (int event = 0; event < 20000; ++event) {
    if (ssa_step(full.network, st) == SsaOutcome::absorbed) break;
    CHECK(st.x[0] + 2.0 * st.x[1] == invariant);
  }
}

TEST_CASE("model overrides") {
  const Model rv = builtin_model(BuiltinModel::reversible_isomerization,
                                 {{"c1", 9.0}, {"c2", 1.0}, {"x_total", 1000.0}});
  const std::vector<double> a = rv.network.propensities(StateVec{100});
  CHECK(a[0] == doctest::Approx(900.0));
  CHECK(a[1] == doctest::Approx(900.0));
  CHECK(rv.x0[0] == 100.0);
  CHECK_THROWS_AS(builtin_model(BuiltinModel::schlogl, {{"c7", 1.0}}), std::invalid_argument);
}

TEST_CASE("network invariant violations") {
  CHECK_THROWS_AS(ReactionNetwork({{"A"}, {"A"}}, {Reaction{1.0, {{0, 1}}, {}, {}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ReactionNetwork({{"A"}}, {Reaction{1.0, {{0, 4}}, {}, {}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ReactionNetwork({{"A"}}, {Reaction{-1.0, {{0, 1}}, {}, {}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ReactionNetwork({{"A"}}, {Reaction{1.0, {{0, 1}}, {{0, 1}}, {}}}),
                  std::invalid_argument);  // zero state change, nothing buffered
  CHECK_THROWS_AS(ReactionNetwork({{"A"}}, {}), std::invalid_argument);
}

TEST_CASE("model file round trip") {
  const char* text = R"({
    "species": [{"name": "X", "initial": 50}],
    "reactions": [
      {"rate": 1.0, "reactants": {"X": 1}},
      {"rate": 1.0, "products": {"X": 1},
       "complement": {"species": "X", "total": 100}}
    ]
  })";
  const Model parsed = parse_model(text, "inline");
  const Model builtin = builtin_model(BuiltinModel::reversible_isomerization);
  CHECK(parsed.network == builtin.network);
  CHECK(parsed.x0 == builtin.x0);
}

TEST_CASE("model file diagnostics") {
  CHECK_THROWS_WITH_AS(
      parse_model(R"({"species": [{"name":"A","initial":1},{"name":"A","initial":2}],
                      "reactions":[{"rate":1,"reactants":{"A":1}}]})",
                  "dup"),
      doctest::Contains("duplicate species"), std::runtime_error);
  CHECK_THROWS_WITH_AS(
      parse_model(R"({"species": [{"name":"A","initial":1}],
                      "reactions":[{"rate":1,"reactants":{"A":4}}]})",
                  "order"),
      doctest::Contains("order"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_model("{not json", "bad"), doctest::Contains("bad"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(
      parse_model(R"({"species": [{"name":"A","initial":1}],
                      "reactions":[{"rate":1,"reactants":{"B":1}}]})",
                  "ref"),
      doctest::Contains("unknown species"), std::runtime_error);
}
