#pragma once

#include <vector>

#include <Eigen/Core>

#include "chemtau/network.hpp"

namespace chemtau {

struct SpectralEstimate {
  double rho = 0.0;            // safety-scaled spectral radius estimate
  std::vector<double> eigvec;  // unit-norm direction, reusable as warm start
  int iterations = 0;
};

// Matrix-free nonlinear power method on the drift Jacobian at x, using
// forward differences of f. Converges when the norm estimate settles to 5%
// or the iterate direction stops moving; the result carries a 1.05 safety
// factor. A persistently vanishing directional derivative yields rho = 0.
SpectralEstimate estimate_rho(const ReactionNetwork& net, const StateVec& x,
                              const std::vector<double>* warm_start = nullptr);

// Exact mass-action Jacobian df/dx = nu * da/dx.
Eigen::MatrixXd analytic_jacobian(const ReactionNetwork& net, const StateVec& x);

// Dense eigensolve oracle for tests and diagnostics.
double spectral_radius_dense(const Eigen::MatrixXd& jac);

}  // namespace chemtau
