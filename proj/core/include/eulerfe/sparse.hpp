#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace eulerfe {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Assembled sparse matrix with an application contract.
struct SparseOperator {
  SparseMatrix matrix;
  bool symmetric = false;

  int rows() const { return static_cast<int>(matrix.rows()); }
  int cols() const { return static_cast<int>(matrix.cols()); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return matrix * x; }

  /// Drops stored entries with magnitude below 1e-300.
  void prune();
};

/// Accumulates into a fixed sparsity pattern. The first pass records the
/// pattern; later passes reuse it, which keeps factorization analysis valid.
class MatrixAssembler {
 public:
  MatrixAssembler(int rows, int cols) : rows_(rows), cols_(cols) {}

  void begin();
  void add(int i, int j, double v) {
    if (i < 0 || j < 0) return;
    if (recording_) {
      triplets_.emplace_back(i, j, v);
    } else {
      matrix_.coeffRef(i, j) += v;
    }
  }
  const SparseMatrix& finish();
  const SparseMatrix& matrix() const { return matrix_; }

 private:
  int rows_;
  int cols_;
  bool recording_ = true;
  bool have_pattern_ = false;
  std::vector<Triplet> triplets_;
  SparseMatrix matrix_;
};

/// Direct sparse LU. The symbolic analysis is reused while the sparsity
/// pattern (size and nonzero count) stays the same.
class LinearSolver {
 public:
  LinearSolver();
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Throws std::runtime_error if the matrix is numerically singular.
  void factorize(const SparseMatrix& a);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  bool factorized() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Appends a row and a column `border` (and a zero corner), the bordered form
/// of a mean constraint border^T x = 0.
SparseMatrix bordered(const SparseMatrix& a, const Eigen::VectorXd& border);

/// Solves A x = b restricted to border^T x = 0 through the bordered system.
/// Used for operators with a constant nullspace (periodic Poisson, pressure).
class ConstrainedSolver {
 public:
  ConstrainedSolver() = default;
  ConstrainedSolver(const SparseMatrix& a, Eigen::VectorXd border);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  /// Multiplier of the last solve (the component of b outside the range).
  double multiplier() const { return multiplier_; }

 private:
  LinearSolver solver_;
  Eigen::VectorXd border_;
  mutable double multiplier_ = 0.0;
  bool constrained_ = false;
};

}  // namespace eulerfe
