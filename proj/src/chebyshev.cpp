#include "chemtau/chebyshev.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace chemtau {

namespace {

// Internal evaluations run in long double so the double-precision result
// carries no visible recursion error even at n = kMaxStages.
long double cheb_t_impl(int n, long double x) {
  if (n == 0) return 1.0L;
  long double tm = 1.0L, t = x;
  for (int j = 2; j <= n; ++j) {
    const long double next = 2.0L * x * t - tm;
    tm = t;
    t = next;
  }
  return t;
}

long double cheb_u_impl(int n, long double x) {
  if (n == 0) return 1.0L;
  long double um = 1.0L, u = 2.0L * x;
  for (int j = 2; j <= n; ++j) {
    const long double next = 2.0L * x * u - um;
    um = u;
    u = next;
  }
  return u;
}

// T_j' = 2 T_{j-1} + 2 x T_{j-1}' - T_{j-2}'.
long double cheb_t_prime_impl(int n, long double x) {
  if (n == 0) return 0.0L;
  long double tm = 1.0L, t = x;
  long double dm = 0.0L, d = 1.0L;
  for (int j = 2; j <= n; ++j) {
    const long double tn = 2.0L * x * t - tm;
    const long double dn = 2.0L * t + 2.0L * x * d - dm;
    tm = t;
    t = tn;
    dm = d;
    d = dn;
  }
  return d;
}

void check_stage_count(int s) {
  if (s < 1) throw std::invalid_argument("stage count must be at least 1");
  if (s > kMaxStages) throw std::invalid_argument("stage count exceeds the supported maximum of 200");
}

ChebyshevCoefficients compute_coefficients(int s, double eps) {
  ChebyshevCoefficients c;
  c.s = s;
  c.eps = eps;

  const long double w0 = 1.0L + static_cast<long double>(eps) / (static_cast<long double>(s) * s);
  const long double w1 = cheb_t_impl(s, w0) / cheb_t_prime_impl(s, w0);
  c.omega0 = static_cast<double>(w0);
  c.omega1 = static_cast<double>(w1);
  c.alpha = static_cast<double>(0.5L * std::sqrt(w1 / w0));

  c.mu.resize(s);
  c.nu.resize(s);
  c.kappa.resize(s);
  c.mu[0] = static_cast<double>(w1 / w0);
  c.nu[0] = static_cast<double>(s * w1 / (2.0L * w0));
  c.kappa[0] = static_cast<double>(s * w1 / w0);

  long double tjm2 = 1.0L, tjm1 = w0;  // T_0, T_1 at omega0
  for (int j = 2; j <= s; ++j) {
    const long double tj = 2.0L * w0 * tjm1 - tjm2;
    c.mu[j - 1] = static_cast<double>(2.0L * w1 * tjm1 / tj);
    c.nu[j - 1] = static_cast<double>(2.0L * w0 * tjm1 / tj);
    c.kappa[j - 1] = static_cast<double>(-tjm2 / tj);
    tjm2 = tjm1;
    tjm1 = tj;
  }
  return c;
}

}  // namespace

double cheb_t(int n, double x) {
  if (n < 0) throw std::invalid_argument("cheb_t: negative degree");
  return static_cast<double>(cheb_t_impl(n, x));
}

double cheb_t_prime(int n, double x) {
  if (n < 0) throw std::invalid_argument("cheb_t_prime: negative degree");
  return static_cast<double>(cheb_t_prime_impl(n, x));
}

double cheb_u(int n, double x) {
  if (n < 0) throw std::invalid_argument("cheb_u: negative degree");
  return static_cast<double>(cheb_u_impl(n, x));
}

const ChebyshevCoefficients& coefficients(int s, double eps) {
  check_stage_count(s);
  if (eps < 0.0) throw std::invalid_argument("damping must be nonnegative");

  static std::map<std::pair<int, double>, ChebyshevCoefficients> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto [it, inserted] = cache.try_emplace({s, eps});
  if (inserted) it->second = compute_coefficients(s, eps);
  return it->second;
}

double stability_domain_size(int s, double eps) {
  const ChebyshevCoefficients& c = coefficients(s, eps);
  return 2.0 * c.omega0 / c.omega1;
}

}  // namespace chemtau
