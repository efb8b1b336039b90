#pragma once

#include <vector>

namespace chemtau {

// Stage counts beyond this accumulate visible round-off in the recursions.
inline constexpr int kMaxStages = 200;

inline constexpr double kDefaultDamping = 0.05;

// Constants of the s-stage stabilized leap step at damping eps.
// mu/nu/kappa are indexed [j-1] for stage j = 1..s.
struct ChebyshevCoefficients {
  int s = 0;
  double eps = 0.0;
  double omega0 = 1.0;  // 1 + eps/s^2
  double omega1 = 1.0;  // T_s(omega0) / T_s'(omega0)
  double alpha = 0.5;   // postprocessor gain, sqrt(omega1/omega0)/2
  std::vector<double> mu, nu, kappa;
};

// Chebyshev polynomials of the first and second kind by three-term
// recursion, and the companion derivative recursion for T_n'.
double cheb_t(int n, double x);
double cheb_t_prime(int n, double x);
double cheb_u(int n, double x);

// Coefficients for (s, eps), computed once and cached; the returned
// reference stays valid for the lifetime of the program and is safe to
// read concurrently. Throws for s < 1, s > kMaxStages or eps < 0.
const ChebyshevCoefficients& coefficients(int s, double eps);

// Length ell = 2*omega0/omega1 of the negative real stability interval;
// at least (2 - 4*eps/3) * s^2, strictly greater when eps > 0.
double stability_domain_size(int s, double eps);

}  // namespace chemtau
