#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace jjchain {

struct LmOptions {
  int max_iterations = 400;
  double cost_tolerance = 1e-16;  ///< relative decrease of the squared residual norm
  double step_tolerance = 1e-13;  ///< relative parameter change
  double initial_damping = 1e-3;
  double difference_step = 1e-7;  ///< relative step for the numerical Jacobian
};

struct LmResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Central-difference Jacobian of a vector residual.
template <typename Residual>
Eigen::MatrixXd numerical_jacobian(Residual& f, const Eigen::VectorXd& x, const Eigen::VectorXd& f0, double rel_step) {
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = rel_step * std::max(std::abs(x(j)), 1e-3);
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    jac.col(j) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return jac;
}

/// Damped least squares (Levenberg-Marquardt with Marquardt diagonal scaling).
/// `f` maps a parameter vector to a residual vector. Covariance is s^2 (J^T J)^+ with
/// s^2 = |r|^2 / (m - n), evaluated at the returned parameters.
template <typename Residual>
LmResult levenberg_marquardt(Residual&& f, Eigen::VectorXd x, const LmOptions& opt = {}) {
  LmResult out;
  Eigen::VectorXd r = f(x);
  double cost = r.squaredNorm();
  double lambda = opt.initial_damping;
  Eigen::MatrixXd jac = numerical_jacobian(f, x, r, opt.difference_step);
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    bool improved = false;
    Eigen::VectorXd step;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
      step = a.ldlt().solve(-grad);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::VectorXd trial = x + step;
      const Eigen::VectorXd rt = f(trial);
      const double ct = rt.squaredNorm();
      if (std::isfinite(ct) && ct <= cost) {
        const double rel_decrease = (cost - ct) / std::max(cost, std::numeric_limits<double>::min());
        x = trial;
        r = rt;
        cost = ct;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
        if (rel_decrease < opt.cost_tolerance ||
            step.norm() <= opt.step_tolerance * (x.norm() + opt.step_tolerance)) {
          out.converged = true;
        }
        break;
      }
      lambda *= 4.0;
    }
    if (!improved) {
      // No downhill step exists at any damping: a stationary point to working precision.
      out.converged = true;
      break;
    }
    if (out.converged) break;
    jac = numerical_jacobian(f, x, r, opt.difference_step);
  }
  jac = numerical_jacobian(f, x, r, opt.difference_step);
  const Eigen::Index m = r.size(), n = x.size();
  const double s2 = m > n ? cost / static_cast<double>(m - n) : 0.0;
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::MatrixXd cov = s2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
  out.covariance = 0.5 * (cov + cov.transpose());
  out.params = x;
  out.residual_norm = std::sqrt(cost);
  out.iterations = it + 1;
  return out;
}

}  // namespace jjchain
