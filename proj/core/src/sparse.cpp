#include "eulerfe/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef EULERFE_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/SparseLU>
#endif

namespace eulerfe {

void SparseOperator::prune() {
  matrix.prune([](const Eigen::Index&, const Eigen::Index&, const double& v) {
    return std::abs(v) >= 1e-300;
  });
  matrix.makeCompressed();
}

void MatrixAssembler::begin() {
  if (have_pattern_) {
    recording_ = false;
    std::fill(matrix_.valuePtr(), matrix_.valuePtr() + matrix_.nonZeros(), 0.0);
  } else {
    recording_ = true;
    triplets_.clear();
  }
}

const SparseMatrix& MatrixAssembler::finish() {
  if (recording_) {
    matrix_.resize(rows_, cols_);
    matrix_.setFromTriplets(triplets_.begin(), triplets_.end());
    matrix_.makeCompressed();
    triplets_.clear();
    triplets_.shrink_to_fit();
    have_pattern_ = true;
    recording_ = false;
  }
  return matrix_;
}

struct LinearSolver::Impl {
#ifdef EULERFE_HAVE_UMFPACK
  Eigen::UmfPackLU<SparseMatrix> lu;
#else
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
#endif
  SparseMatrix a;  // UMFPACK solves read the factored matrix arrays
  Eigen::Index rows = -1;
  Eigen::Index nnz = -1;
  bool ready = false;
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

void LinearSolver::factorize(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("LinearSolver: matrix not square");
  impl_->a = a;
  impl_->a.makeCompressed();
  if (a.rows() != impl_->rows || impl_->a.nonZeros() != impl_->nnz) {
    impl_->lu.analyzePattern(impl_->a);
    impl_->rows = a.rows();
    impl_->nnz = impl_->a.nonZeros();
  }
  impl_->lu.factorize(impl_->a);
  impl_->ready = impl_->lu.info() == Eigen::Success;
  if (!impl_->ready) throw std::runtime_error("LinearSolver: factorization failed (singular matrix)");
}

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& b) const {
  if (!impl_->ready) throw std::logic_error("LinearSolver: solve before factorize");
  Eigen::VectorXd x = impl_->lu.solve(b);
  return x;
}

bool LinearSolver::factorized() const { return impl_->ready; }

SparseMatrix bordered(const SparseMatrix& a, const Eigen::VectorXd& border) {
  const Eigen::Index n = a.rows();
  std::vector<Triplet> t;
  t.reserve(a.nonZeros() + 2 * border.size());
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  }
  for (Eigen::Index i = 0; i < border.size(); ++i) {
    if (border[i] != 0.0) {
      t.emplace_back(i, n, border[i]);
      t.emplace_back(n, i, border[i]);
    }
  }
  SparseMatrix out(n + 1, n + 1);
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

ConstrainedSolver::ConstrainedSolver(const SparseMatrix& a, Eigen::VectorXd border)
    : border_(std::move(border)), constrained_(border_.size() > 0) {
  if (constrained_) {
    solver_.factorize(bordered(a, border_));
  } else {
    solver_.factorize(a);
  }
}

Eigen::VectorXd ConstrainedSolver::solve(const Eigen::VectorXd& b) const {
  if (!constrained_) return solver_.solve(b);
  const Eigen::Index n = b.size();
  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = b;
  rhs[n] = 0.0;
  const Eigen::VectorXd x = solver_.solve(rhs);
  multiplier_ = x[n];
  return x.head(n);
}

}  // namespace eulerfe
