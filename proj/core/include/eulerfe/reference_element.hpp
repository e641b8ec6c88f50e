#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eulerfe/mesh.hpp"

namespace eulerfe {

enum class Family { CG, DG, BDM, VectorCG };

std::string to_string(Family family);

/// Shifted Legendre polynomial P_i(2s - 1) on [0,1], i <= 3.
double legendre01(int i, double s);

/// Polynomial element on the reference triangle, represented in the monomial
/// basis x^a y^b, a + b <= degree.
///
/// Lagrange local DOFs: three vertices, then degree-1 nodes per local edge
/// (ordered along the local edge direction), then interior nodes.
/// BDM local DOFs: degree+1 normal moments per local edge against shifted
/// Legendre polynomials, then interior moments against the lowest-order
/// Nedelec space (degree 2 only).
/// VectorCG: component-major copies of the scalar Lagrange element.
class ReferenceElement {
 public:
  ReferenceElement(Family family, int degree);

  Family family() const { return family_; }
  int degree() const { return degree_; }
  int num_dofs() const { return num_dofs_; }
  int value_size() const { return value_size_; }

  /// Lagrange (scalar) DOFs attached to a vertex, an edge interior, a cell interior.
  int scalar_dofs_per_edge() const { return degree_ - 1; }
  int scalar_dofs_interior() const;
  int scalar_num_dofs() const { return scalar_dofs_; }

  /// BDM moments per edge and interior moments.
  int bdm_dofs_per_edge() const { return degree_ + 1; }
  int bdm_dofs_interior() const { return num_dofs_ - 3 * (degree_ + 1); }

  /// Lagrange nodes (scalar element), empty for BDM.
  const std::vector<Vec2>& nodes() const { return nodes_; }

  /// values[d * vs + c], grads[(d * vs + c) * 2 + k].
  void tabulate(const Vec2& x, double* values, double* grads) const;

  /// Evaluates the BDM local DOF functionals of a vector field given on the
  /// reference cell. Only for BDM.
  template <class F>
  Eigen::VectorXd bdm_functionals(F&& field) const;

  /// Local edge k outward normal scaled by the reference edge length.
  static Vec2 scaled_normal(int k);

 private:
  void build_lagrange();
  void build_bdm();
  void monomials(const Vec2& x, double* m, double* dm) const;

  Family family_;
  int degree_;
  int num_dofs_ = 0;
  int value_size_ = 1;
  int scalar_dofs_ = 0;
  int num_monomials_ = 0;
  std::vector<std::pair<int, int>> exponents_;
  std::vector<Vec2> nodes_;
  // Lagrange: num_monomials x scalar_dofs.  BDM: (2 * num_monomials) x num_dofs.
  Eigen::MatrixXd coeffs_;
};

}  // namespace eulerfe

#include "eulerfe/reference_element_impl.hpp"
