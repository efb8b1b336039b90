#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

namespace chemtau {

// Amplification of the state over one s-stage step on the linear test
// equation, A_s(z) = T_s(omega0 + omega1 z) / T_s(omega0).
double a_poly(int s, double eps, double z);

// Amplification of one noise impulse,
// B_s(z) = U_{s-1}(omega0 + omega1 z) / U_{s-1}(omega0) * (1 + omega1 z / (2 omega0)).
double b_poly(int s, double eps, double z);

// Limiting variance of the non-postprocessed scheme relative to the exact
// stationary variance, c_s(z) = -2 z B_s(z)^2 / (1 - A_s(z)^2). The
// removable points z = 0 and z = -ell take their limit values 1 and 0.
// Throws "degenerate amplification point" where 1 - A^2 vanishes away
// from those limits (possible only without damping).
double c_factor(int s, double eps, double z);

// Same ratio for the postprocessed observation, c_s(z) - 2 alpha^2 z.
double c_bar_factor(int s, double eps, double z);

// Affine chord through (0,1) and (-ell,0): d_s(z) = 1 + omega1 z / (2 omega0).
double d_affine(int s, double eps, double z);

// Smallest stage count with tau*rho <= (2 - 4 eps/3) s^2, plus one as a
// safety margin against rho growing within the step. rho = 0 yields 1.
// Throws when the result would exceed the supported stage maximum.
int select_stages(double tau, double rho, double eps);

// Reversible isomerization test problem: a_1 = c1 x, a_2 = c2 (X^T - x),
// state changes -1/+1, Jacobian eigenvalue lambda = -(c1 + c2).
struct TestProblem {
  double c1 = 1.0;
  double c2 = 1.0;
  long x_total = 100;
  double lambda() const { return -(c1 + c2); }
};

// Moments of the stationary Binomial(X^T, c2/|lambda|) law: mean
// c2 X^T / |lambda|, variance c1 c2 X^T / lambda^2.
std::pair<double, double> test_problem_invariant_measure(const TestProblem& p);

struct StabilityCurve {
  int s = 0;
  double eps = 0.0;
  double ell = 0.0;
  std::vector<double> z, a, b, c, c_bar, d;
};

// Uniform grid of `points` values from -ell to 0 inclusive.
StabilityCurve sample_stability_curve(int s, double eps, int points = 2000);

// Comment header with ell followed by rows `z,A,B,c,c_bar,d`.
void write_stability_curve_csv(const StabilityCurve& curve, std::ostream& os);

}  // namespace chemtau
