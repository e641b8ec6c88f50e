#pragma once

#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "eulerfe/sparse.hpp"

namespace eulerfe {

struct NewtonOptions {
  double tol = 1e-11;
  int max_iters = 30;
  /// Keep the factorized Jacobian across solves and only refactor when the
  /// residual contraction per iteration is worse than `refactor_ratio`.
  bool reuse_jacobian = false;
  double refactor_ratio = 0.1;
};

struct NewtonReport {
  int iterations = 0;
  int factorizations = 0;
  double initial_norm = 0.0;
  double final_norm = 0.0;
  bool converged = false;
};

class NewtonFailure : public std::runtime_error {
 public:
  NewtonFailure(const std::string& what, NewtonReport report) : std::runtime_error(what), report_(report) {}
  const NewtonReport& report() const { return report_; }

 private:
  NewtonReport report_;
};

/// Newton iteration x <- x - J(x)^{-1} r(x) until
/// |r(x)| <= tol * max(1, |r(x0)|) in the Euclidean norm.
class NewtonSolver {
 public:
  using Residual = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using Jacobian = std::function<const SparseMatrix&(const Eigen::VectorXd&)>;

  explicit NewtonSolver(NewtonOptions options = {}) : options_(options) {}

  const NewtonOptions& options() const { return options_; }

  /// Updates x in place. Does not throw on non-convergence; check the report.
  NewtonReport solve(const Residual& residual, const Jacobian& jacobian, Eigen::VectorXd& x);

  /// Drops a stored factorization (after the problem structure changes).
  void invalidate() { have_factorization_ = false; }

 private:
  NewtonOptions options_;
  LinearSolver solver_;
  bool have_factorization_ = false;
};

NewtonReport newton_solve(const NewtonSolver::Residual& residual, const NewtonSolver::Jacobian& jacobian,
                          Eigen::VectorXd& x, double tol = 1e-11, int max_iters = 30);

/// Central-difference Jacobian, column by column.
Eigen::MatrixXd finite_difference_jacobian(const NewtonSolver::Residual& residual, const Eigen::VectorXd& x,
                                           double step = 1e-6);

}  // namespace eulerfe
