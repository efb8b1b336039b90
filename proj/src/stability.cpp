#include "chemtau/stability.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "chemtau/chebyshev.hpp"

namespace chemtau {

double a_poly(int s, double eps, double z) {
  const ChebyshevCoefficients& c = coefficients(s, eps);
  return cheb_t(s, c.omega0 + c.omega1 * z) / cheb_t(s, c.omega0);
}

double b_poly(int s, double eps, double z) {
  const ChebyshevCoefficients& c = coefficients(s, eps);
  return cheb_u(s - 1, c.omega0 + c.omega1 * z) / cheb_u(s - 1, c.omega0) *
         (1.0 + 0.5 * c.omega1 * z / c.omega0);
}

double c_factor(int s, double eps, double z) {
  if (std::fabs(z) < 1e-10) return 1.0;  // removable 0/0 with limit 1

  const double ell = stability_domain_size(s, eps);
  const double a = a_poly(s, eps, z);
  const double b = b_poly(s, eps, z);
  const double denom = 1.0 - a * a;
  if (denom < 1e-14) {
    // |A| = 1 exactly at the left endpoint, where the limit is 0; without
    // damping it also happens at interior points where the exact value is
    // the affine law recovered by the Pell identity.
    if (std::fabs(z + ell) <= 1e-8 * ell) return 0.0;
    if (eps == 0.0) return 1.0 + 0.5 * z / (static_cast<double>(s) * s);
    throw std::domain_error("degenerate amplification point");
  }
  return -2.0 * z * b * b / denom;
}

double c_bar_factor(int s, double eps, double z) {
  const double alpha = coefficients(s, eps).alpha;
  return c_factor(s, eps, z) - 2.0 * alpha * alpha * z;
}

double d_affine(int s, double eps, double z) {
  const ChebyshevCoefficients& c = coefficients(s, eps);
  return 1.0 + 0.5 * c.omega1 * z / c.omega0;
}

int select_stages(double tau, double rho, double eps) {
  if (!(tau > 0.0)) throw std::invalid_argument("select_stages: tau must be positive");
  if (rho < 0.0) throw std::invalid_argument("select_stages: rho must be nonnegative");

  const double product = tau * rho;
  if (product == 0.0) return 1;

  const double beta = 2.0 - 4.0 * eps / 3.0;
  int s = static_cast<int>(std::ceil(std::sqrt(product / beta)));
  if (s < 1) s = 1;
  while (beta * static_cast<double>(s) * s < product) ++s;
  ++s;  // guard against rho increasing within the step
  if (s > kMaxStages)
    throw std::domain_error("select_stages: required stage count exceeds the supported maximum");
  return s;
}

std::pair<double, double> test_problem_invariant_measure(const TestProblem& p) {
  const double lam = p.c1 + p.c2;
  if (!(lam > 0.0)) throw std::invalid_argument("test problem requires c1 + c2 > 0");
  const double n = static_cast<double>(p.x_total);
  return {p.c2 * n / lam, p.c1 * p.c2 * n / (lam * lam)};
}

StabilityCurve sample_stability_curve(int s, double eps, int points) {
  if (points < 2) throw std::invalid_argument("stability curve needs at least 2 points");
  StabilityCurve curve;
  curve.s = s;
  curve.eps = eps;
  curve.ell = stability_domain_size(s, eps);
  curve.z.reserve(points);
  for (int k = 0; k < points; ++k) {
    const double z = -curve.ell * (1.0 - static_cast<double>(k) / (points - 1));
    curve.z.push_back(z);
    curve.a.push_back(a_poly(s, eps, z));
    curve.b.push_back(b_poly(s, eps, z));
    curve.c.push_back(c_factor(s, eps, z));
    curve.c_bar.push_back(c_bar_factor(s, eps, z));
    curve.d.push_back(d_affine(s, eps, z));
  }
  return curve;
}

void write_stability_curve_csv(const StabilityCurve& curve, std::ostream& os) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "# s=%d eps=%.12g ell=%.12g\n", curve.s, curve.eps, curve.ell);
  os << buf << "z,A,B,c,c_bar,d\n";
  for (std::size_t k = 0; k < curve.z.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", curve.z[k],
                  curve.a[k], curve.b[k], curve.c[k], curve.c_bar[k], curve.d[k]);
    os << buf;
  }
}

}  // namespace chemtau
