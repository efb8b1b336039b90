#include "chemtau/spectral.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace chemtau {

namespace {

constexpr int kMaxIterations = 50;
constexpr double kRelTolerance = 0.02;
constexpr double kSafetyFactor = 1.05;

double norm2(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

}  // namespace

SpectralEstimate estimate_rho(const ReactionNetwork& net, const StateVec& x,
                              const std::vector<double>* warm_start) {
  const int n = net.n_species();
  SpectralEstimate est;

  std::vector<double> v(n);
  if (warm_start && static_cast<int>(warm_start->size()) == n && norm2(*warm_start) > 0.5) {
    v = *warm_start;
  } else {
    for (int i = 0; i < n; ++i) v[i] = 1.0 + 1e-3 * (i + 1);
    const double nv = norm2(v);
    for (double& vi : v) vi /= nv;
  }

  const double delta = std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + norm2(x));
  StateVec fx;
  net.drift(x, fx);

  StateVec xp(n), fp;
  std::vector<double> jv(n);
  double rho_prev = -1.0;
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    for (int i = 0; i < n; ++i) xp[i] = x[i] + delta * v[i];
    net.drift(xp, fp);
    for (int i = 0; i < n; ++i) jv[i] = (fp[i] - fx[i]) / delta;

    const double rho = norm2(jv);
    est.iterations = iter;
    if (rho < 1e-12 * (1.0 + norm2(x))) {
      // Directional derivative vanished; retry along a fresh direction a
      // couple of times before declaring zero stiffness.
      if (iter >= 3) {
        est.rho = 0.0;
        est.eigvec = v;
        return est;
      }
      for (int i = 0; i < n; ++i) v[i] = (i % 2 ? -1.0 : 1.0) * (1.0 + 1e-3 * (iter + i));
      const double nv = norm2(v);
      for (double& vi : v) vi /= nv;
      rho_prev = -1.0;
      continue;
    }

    // Movement of the normalized iterate, up to a global sign flip.
    double diff_minus = 0.0, diff_plus = 0.0;
    for (int i = 0; i < n; ++i) {
      const double vnew = jv[i] / rho;
      diff_minus += (vnew - v[i]) * (vnew - v[i]);
      diff_plus += (vnew + v[i]) * (vnew + v[i]);
      v[i] = vnew;
    }
    const double drift_dir = std::sqrt(std::min(diff_minus, diff_plus));

    // Accept once the norm estimate has settled and the direction has
    // stopped rotating; a direction that no longer moves at all means the
    // warm start already was the dominant eigenvector.
    const bool rho_settled = rho_prev >= 0.0 && std::fabs(rho - rho_prev) <= kRelTolerance * rho;
    if ((rho_settled && drift_dir <= 0.05) || drift_dir <= 1e-6) {
      est.rho = kSafetyFactor * rho;
      est.eigvec = v;
      return est;
    }
    rho_prev = rho;
  }

  est.rho = kSafetyFactor * std::max(rho_prev, 0.0);
  est.eigvec = v;
  return est;
}

Eigen::MatrixXd analytic_jacobian(const ReactionNetwork& net, const StateVec& x) {
  const int n = net.n_species();
  const int m = net.n_reactions();
  std::vector<double> grad;
  net.propensity_gradients(x, grad);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < m; ++j) {
    const std::vector<int>& col = net.stoich_column(j);
    const double* row = grad.data() + static_cast<std::size_t>(j) * n;
    for (int i = 0; i < n; ++i) {
      if (col[i] == 0) continue;
      for (int k = 0; k < n; ++k) jac(i, k) += col[i] * row[k];
    }
  }
  return jac;
}

double spectral_radius_dense(const Eigen::MatrixXd& jac) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, /*computeEigenvectors=*/false);
  double rho = 0.0;
  for (int i = 0; i < jac.rows(); ++i) rho = std::max(rho, std::abs(solver.eigenvalues()[i]));
  return rho;
}

}  // namespace chemtau
