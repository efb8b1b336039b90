#include <cmath>

#include <doctest.h>

#include "chemtau/network.hpp"
#include "chemtau/spectral.hpp"

using namespace chemtau;

TEST_CASE("jacobian of the test equation is the single eigenvalue") {
  const Model rv = builtin_model(BuiltinModel::reversible_isomerization,
                                 {{"c1", 9.0}, {"c2", 1.0}, {"x_total", 1000.0}});
  const Eigen::MatrixXd jac = analytic_jacobian(rv.network, StateVec{100});
  REQUIRE(jac.rows() == 1);
  CHECK(jac(0, 0) == doctest::Approx(-10.0));

  const SpectralEstimate est = estimate_rho(rv.network, StateVec{100});
  CHECK(est.rho == doctest::Approx(1.05 * 10.0).epsilon(1e-6));
  CHECK(est.iterations == 1);
}

TEST_CASE("linear network jacobian is constant in x") {
  const Model rv = builtin_model(BuiltinModel::reversible_isomerization);
  const Eigen::MatrixXd j1 = analytic_jacobian(rv.network, StateVec{10});
  const Eigen::MatrixXd j2 = analytic_jacobian(rv.network, StateVec{90});
  CHECK(j1(0, 0) == doctest::Approx(j2(0, 0)));
}

TEST_CASE("analytic jacobian matches central differences") {
  RngStream rng(21, 0);
  for (BuiltinModel which : {BuiltinModel::michaelis_menten, BuiltinModel::genetic_loop,
                             BuiltinModel::nonlinear_reversible, BuiltinModel::schlogl}) {
    const Model model = builtin_model(which);
    const int n = model.network.n_species();
    for (int trial = 0; trial < 5; ++trial) {
      StateVec x(n);
      for (int i = 0; i < n; ++i) x[i] = 3.0 + std::floor(rng.uniform() * 997.0);
      const Eigen::MatrixXd jac = analytic_jacobian(model.network, x);
      const double scale = jac.cwiseAbs().maxCoeff();
      for (int col = 0; col < n; ++col) {
        const double h = 1e-5 * (1.0 + std::fabs(x[col]));
        StateVec xp = x, xm = x;
        xp[col] += h;
        xm[col] -= h;
        const StateVec fp = model.network.drift(xp);
        const StateVec fm = model.network.drift(xm);
        for (int row = 0; row < n; ++row) {
          const double fd = (fp[row] - fm[row]) / (2.0 * h);
          CHECK(std::fabs(jac(row, col) - fd) <= 1e-6 * std::max(1.0, scale));
        }
      }
    }
  }
}

TEST_CASE("zero drift gives zero spectral radius") {
  ReactionNetwork idle({{"A"}}, {Reaction{0.0, {{0, 1}}, {}, {}}});
  const SpectralEstimate est = estimate_rho(idle, StateVec{10});
  CHECK(est.rho == 0.0);
}

TEST_CASE("power method tracks the dense eigensolve oracle") {
  const Model mm = builtin_model(BuiltinModel::michaelis_menten);
  const double truth = spectral_radius_dense(analytic_jacobian(mm.network, mm.x0));
  const SpectralEstimate est = estimate_rho(mm.network, mm.x0);
  CHECK(est.rho / 1.05 == doctest::Approx(truth).epsilon(0.10));

  // random nonnegative states across every builtin: the estimate stays
  // within [0.5, 1.1] of the truth so the stage safety margins hold
  RngStream rng(22, 0);
  for (BuiltinModel which :
       {BuiltinModel::reversible_isomerization, BuiltinModel::schlogl,
        BuiltinModel::michaelis_menten, BuiltinModel::nonlinear_reversible,
        BuiltinModel::genetic_loop}) {
    const Model model = builtin_model(which);
    const int n = model.network.n_species();
    for (int trial = 0; trial < 10; ++trial) {
      StateVec x(n);
      for (int i = 0; i < n; ++i) x[i] = 3.0 + std::floor(rng.uniform() * 800.0);
      const double rho_true = spectral_radius_dense(analytic_jacobian(model.network, x));
      if (rho_true < 1e-9) continue;
      const double est_raw = estimate_rho(model.network, x).rho / 1.05;
      CHECK(est_raw >= 0.5 * rho_true);
      CHECK(est_raw <= 1.1 * rho_true);
    }
  }
}

TEST_CASE("warm start converges fast along a slowly varying trajectory") {
  const Model gl = builtin_model(BuiltinModel::genetic_loop);
  StateVec x = gl.x0;
  SpectralEstimate est = estimate_rho(gl.network, x);
  long total = 0;
  const int calls = 50;
  for (int k = 0; k < calls; ++k) {
    x[0] += 1.0;  // slow drift of the state
    est = estimate_rho(gl.network, x, &est.eigvec);
    total += est.iterations;
  }
  CHECK(static_cast<double>(total) / calls <= 2.0);
}
