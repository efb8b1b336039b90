#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "chemtau/chebyshev.hpp"

using namespace chemtau;

TEST_CASE("first-kind values") {
  CHECK(cheb_t(0, 0.77) == 1.0);
  CHECK(cheb_t(1, 0.3) == doctest::Approx(0.3));
  CHECK(cheb_t(3, 2.0) == doctest::Approx(26.0));  // 4x^3 - 3x
  CHECK(cheb_t(5, 1.0) == doctest::Approx(1.0));
  CHECK(cheb_t_prime(5, 1.0) == doctest::Approx(25.0));  // T_n'(1) = n^2
}

TEST_CASE("second-kind values") {
  CHECK(cheb_u(0, -0.2) == 1.0);
  CHECK(cheb_u(1, 0.5) == doctest::Approx(1.0));
  CHECK(cheb_u(2, 1.0) == doctest::Approx(3.0));  // U_n(1) = n + 1
}

TEST_CASE("Pell identity (1-x^2) U_{n-1}^2 + T_n^2 = 1 on [-1,1]") {
  for (int n : {1, 2, 5, 6, 17, 50}) {
    for (int k = 0; k <= 200; ++k) {
      const double x = -1.0 + 2.0 * k / 200.0;
      const double u = cheb_u(n - 1, x);
      const double t = cheb_t(n, x);
      CHECK(std::fabs((1.0 - x * x) * u * u + t * t - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("coefficients at eps = 0") {
  for (int s : {1, 2, 5, 13}) {
    const ChebyshevCoefficients& c = coefficients(s, 0.0);
    CHECK(c.omega0 == doctest::Approx(1.0));
    CHECK(c.omega1 == doctest::Approx(1.0 / (static_cast<double>(s) * s)));
    CHECK(c.alpha == doctest::Approx(0.5 / s));
  }
}

TEST_CASE("s = 1 coefficients for any damping") {
  for (double eps : {0.0, 0.05, 1.0}) {
    const ChebyshevCoefficients& c = coefficients(1, eps);
    CHECK(c.omega1 == doctest::Approx(c.omega0));
    CHECK(c.mu[0] == doctest::Approx(1.0));
    CHECK(c.nu[0] == doctest::Approx(0.5));
    CHECK(c.kappa[0] == doctest::Approx(1.0));
    CHECK(c.alpha == doctest::Approx(0.5));
  }
}

TEST_CASE("structure identities of the coefficients") {
  for (int s : {2, 3, 5, 20, 50}) {
    for (double eps : {0.0, 0.05, 1.0}) {
      const ChebyshevCoefficients& c = coefficients(s, eps);
      CHECK(c.omega0 >= 1.0);
      CHECK(c.omega1 > 0.0);
      CHECK(c.mu[0] == doctest::Approx(c.omega1 / c.omega0));
      CHECK(c.nu[0] == doctest::Approx(0.5 * s * c.omega1 / c.omega0));
      CHECK(c.kappa[0] == doctest::Approx(s * c.omega1 / c.omega0));
      for (int j = 2; j <= s; ++j)
        CHECK(c.nu[j - 1] + c.kappa[j - 1] == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(c.alpha == doctest::Approx(0.5 * std::sqrt(c.omega1 / c.omega0)));
    }
  }
}

TEST_CASE("T_j(omega0) increases in j for omega0 > 1") {
  const double omega0 = 1.0 + 0.05 / (30.0 * 30.0);
  double prev = 1.0;
  for (int j = 1; j <= 60; ++j) {
    const double t = cheb_t(j, omega0);
    CHECK(t > prev * (1.0 - 1e-14));
    CHECK(std::isfinite(t));
    prev = t;
  }
}

TEST_CASE("stability domain size and the lemma bound") {
  CHECK(stability_domain_size(1, 0.0) == doctest::Approx(2.0));
  for (int s = 1; s <= 50; ++s) {
    for (double eps : {0.0, 0.05, 1.0}) {
      const double ell = stability_domain_size(s, eps);
      const double bound = (2.0 - 4.0 * eps / 3.0) * s * s;
      CHECK(ell >= bound * (1.0 - 1e-12));
      if (eps > 0.0 && s > 1) CHECK(ell > bound);
    }
  }
  // (s=10, eps=0.05) exceeds 193.33
  CHECK(stability_domain_size(10, 0.05) > 193.33);
}

TEST_CASE("stage-count validation") {
  CHECK_THROWS_AS(coefficients(0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(coefficients(201, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(coefficients(5, -0.1), std::invalid_argument);
  CHECK_NOTHROW(coefficients(200, 0.05));
}
