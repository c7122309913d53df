#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace twinepr {

struct LeastSquaresOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-6;
  double initial_damping = 1e-3;
};

struct LeastSquaresResult {
  Eigen::VectorXd params;
  double cost = 0.0;  // 0.5 * |r|^2
  int iterations = 0;
  bool converged = false;
};

/// Residual callback: fills r (preallocated to the residual count) for params p.
using ResidualFn = std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r)>;

/// Damped Gauss-Newton (Marquardt scaling) with a central-difference Jacobian.
/// Converged when an accepted step changes the parameters by less than
/// `relative_tolerance` relative to their norm, or when no damping level
/// reduces the cost any further.
inline LeastSquaresResult damped_gauss_newton(const ResidualFn& residual, Eigen::VectorXd p,
                                              Eigen::Index residual_count,
                                              const LeastSquaresOptions& opt = {}) {
  const Eigen::Index np = p.size();
  Eigen::VectorXd r(residual_count), r_try(residual_count), r_plus(residual_count), r_minus(residual_count);
  Eigen::MatrixXd jac(residual_count, np);

  residual(p, r);
  double cost = 0.5 * r.squaredNorm();
  double damping = opt.initial_damping;
  LeastSquaresResult out;

  for (int it = 0; it < opt.max_iterations; ++it) {
    out.iterations = it + 1;
    for (Eigen::Index k = 0; k < np; ++k) {
      const double h = 1e-6 * std::max(std::abs(p[k]), 1e-3);
      Eigen::VectorXd q = p;
      q[k] = p[k] + h;
      residual(q, r_plus);
      q[k] = p[k] - h;
      residual(q, r_minus);
      jac.col(k) = (r_plus - r_minus) / (2.0 * h);
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    Eigen::VectorXd scale = jtj.diagonal().cwiseMax(1e-12);

    bool accepted = false;
    while (damping < 1e12) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += damping * scale;
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      if (!step.allFinite()) {
        damping *= 10.0;
        continue;
      }
      const Eigen::VectorXd trial = p + step;
      residual(trial, r_try);
      const double trial_cost = 0.5 * r_try.squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        const double rel = step.norm() / (p.norm() + std::numeric_limits<double>::epsilon());
        p = trial;
        r = r_try;
        cost = trial_cost;
        damping = std::max(damping / 10.0, 1e-12);
        accepted = true;
        if (rel < opt.relative_tolerance) {
          out.converged = true;
        }
        break;
      }
      damping *= 10.0;
    }
    if (!accepted) {
      out.converged = true;  // stationary: no descent at any damping level
      break;
    }
    if (out.converged) break;
  }
  out.params = p;
  out.cost = cost;
  return out;
}

}  // namespace twinepr
