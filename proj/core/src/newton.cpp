#include "eulerfe/newton.hpp"

#include <algorithm>
#include <cmath>

namespace eulerfe {

NewtonReport NewtonSolver::solve(const Residual& residual, const Jacobian& jacobian, Eigen::VectorXd& x) {
  NewtonReport report;
  Eigen::VectorXd r = residual(x);
  report.initial_norm = r.norm();
  const double target = options_.tol * std::max(1.0, report.initial_norm);
  double norm = report.initial_norm;
  bool fresh = false;
  if (!options_.reuse_jacobian) have_factorization_ = false;
  while (norm > target && report.iterations < options_.max_iters) {
    if (!std::isfinite(norm)) break;
    if (!have_factorization_ || !options_.reuse_jacobian) {
      solver_.factorize(jacobian(x));
      have_factorization_ = true;
      fresh = true;
      ++report.factorizations;
    }
    x -= solver_.solve(r);
    ++report.iterations;
    r = residual(x);
    const double next = r.norm();
    if (options_.reuse_jacobian && !fresh && next > options_.refactor_ratio * norm) have_factorization_ = false;
    fresh = false;
    norm = next;
  }
  report.final_norm = norm;
  report.converged = norm <= target;
  return report;
}

NewtonReport newton_solve(const NewtonSolver::Residual& residual, const NewtonSolver::Jacobian& jacobian,
                          Eigen::VectorXd& x, double tol, int max_iters) {
  NewtonOptions options;
  options.tol = tol;
  options.max_iters = max_iters;
  NewtonSolver solver(options);
  return solver.solve(residual, jacobian, x);
}

Eigen::MatrixXd finite_difference_jacobian(const NewtonSolver::Residual& residual, const Eigen::VectorXd& x,
                                           double step) {
  const Eigen::VectorXd r0 = residual(x);
  Eigen::MatrixXd jac(r0.size(), x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = step * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    const Eigen::VectorXd rp = residual(xp);
    xp[j] = x[j] - h;
    const Eigen::VectorXd rm = residual(xp);
    xp[j] = x[j];
    jac.col(j) = (rp - rm) / (2.0 * h);
  }
  return jac;
}

}  // namespace eulerfe
