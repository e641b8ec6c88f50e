#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "eulerfe/mesh.hpp"
#include "eulerfe/quadrature.hpp"
#include "eulerfe/reference_element.hpp"

namespace eulerfe {

struct SpaceOptions {
  bool zero_mean = false;           // V-bar spaces: solves carry a mean constraint
  bool essential_boundary = false;  // drop wall DOFs (psi = 0, u.n = 0)
};

/// DOF layout of a finite element space over a mesh. Local DOFs mapped to -1
/// are constrained to zero. Signs orient BDM edge moments with the global edge.
class FunctionSpace {
 public:
  FunctionSpace(std::shared_ptr<const Mesh> mesh, Family family, int degree, SpaceOptions options);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  Family family() const { return element_.family(); }
  int degree() const { return element_.degree(); }
  const ReferenceElement& element() const { return element_; }
  const SpaceOptions& options() const { return options_; }
  bool zero_mean() const { return options_.zero_mean; }

  int dim() const { return dim_; }
  int local_dim() const { return element_.num_dofs(); }
  int value_size() const { return element_.value_size(); }

  std::span<const int> cell_dofs(int cell) const {
    return {dofs_.data() + cell * local_dim(), static_cast<size_t>(local_dim())};
  }
  std::span<const double> cell_signs(int cell) const {
    return {signs_.data() + cell * local_dim(), static_cast<size_t>(local_dim())};
  }

  /// Physical node of every global DOF of a Lagrange space, wrapped into
  /// [0,1)^2 on periodic meshes. For VectorCG the node of the component DOF.
  const std::vector<Vec2>& dof_points() const { return dof_points_; }

 private:
  void number_lagrange();
  void number_bdm();

  std::shared_ptr<const Mesh> mesh_;
  ReferenceElement element_;
  SpaceOptions options_;
  int dim_ = 0;
  std::vector<int> dofs_;
  std::vector<double> signs_;
  std::vector<Vec2> dof_points_;
};

using SpacePtr = std::shared_ptr<const FunctionSpace>;

/// Supported: CG 1..3, VectorCG 1..3, BDM 1..2, DG 0..1.
SpacePtr build_space(std::shared_ptr<const Mesh> mesh, Family family, int degree,
                     SpaceOptions options = {});

/// Coefficient vector bound to a space.
struct Field {
  SpacePtr space;
  Eigen::VectorXd coeffs;

  Field() = default;
  explicit Field(SpacePtr s) : space(std::move(s)), coeffs(Eigen::VectorXd::Zero(space->dim())) {}
  Field(SpacePtr s, Eigen::VectorXd c) : space(std::move(s)), coeffs(std::move(c)) {}
};

/// Physical basis values at a fixed set of reference points, recomputed per
/// cell. Orientation signs are folded in, so local coefficients equal global
/// ones. Physical tabulations are cached per distinct cell Jacobian.
class FEValues {
 public:
  FEValues(const FunctionSpace& space, std::vector<Vec2> ref_points);

  void reinit(int cell);

  int cell() const { return cell_; }
  int num_points() const { return num_points_; }
  int num_dofs() const { return num_dofs_; }
  int value_size() const { return vs_; }
  const Vec2& reference_point(int q) const { return ref_points_[q]; }
  Vec2 point(int q) const;

  double value(int q, int d, int c = 0) const {
    return sign_[d] * tab_->val[(q * num_dofs_ + d) * vs_ + c];
  }
  double grad(int q, int d, int c, int k) const {
    return sign_[d] * tab_->grad[((q * num_dofs_ + d) * vs_ + c) * 2 + k];
  }
  double div(int q, int d) const { return grad(q, d, 0, 0) + grad(q, d, 1, 1); }

 private:
  struct Tab {
    Mat2 jacobian;
    std::vector<double> val;
    std::vector<double> grad;
  };
  const Tab& physical(const Cell& cell);

  const FunctionSpace& space_;
  std::vector<Vec2> ref_points_;
  int num_points_ = 0;
  int num_dofs_ = 0;
  int vs_ = 1;
  std::vector<double> ref_val_;
  std::vector<double> ref_grad_;
  std::vector<Tab> shapes_;
  const Tab* tab_ = nullptr;
  const double* sign_ = nullptr;
  int cell_ = -1;
};

/// Cell quadrature rule plus values of a space on it.
class CellIntegrator {
 public:
  CellIntegrator(const FunctionSpace& space, const Quadrature& rule)
      : rule_(rule), values_(space, rule.points) {}
  void reinit(int cell, double det) {
    values_.reinit(cell);
    det_ = det;
  }
  const FEValues& values() const { return values_; }
  double weight(int q) const { return rule_.weights[q] * det_; }
  int size() const { return rule_.size(); }

 private:
  Quadrature rule_;
  FEValues values_;
  double det_ = 0.0;
};

/// Values of a space on both traces of an edge, at the points of a line rule
/// parametrized from va to vb.
class EdgeIntegrator {
 public:
  EdgeIntegrator(const FunctionSpace& space, const LineQuadrature& rule);

  /// Returns false on walls (no minus side).
  bool reinit(int edge);
  const FEValues& plus() const { return *plus_; }
  const FEValues& minus() const { return *minus_; }
  double weight(int q) const { return rule_.weights[q] * length_; }
  int size() const { return rule_.size(); }
  const LineQuadrature& rule() const { return rule_; }

 private:
  const FunctionSpace& space_;
  LineQuadrature rule_;
  std::vector<FEValues> plus_bank_;
  std::vector<FEValues> minus_bank_;
  FEValues* plus_ = nullptr;
  FEValues* minus_ = nullptr;
  double length_ = 0.0;
};

using ScalarFunction = std::function<double(const Vec2&)>;
using VectorFunction = std::function<Vec2(const Vec2&)>;

/// Field values at reference points of one cell; layout values[q * vs + c].
std::vector<double> evaluate(const Field& field, int cell, std::span<const Vec2> local_points);

/// Gradients at reference points; layout grads[(q * vs + c) * 2 + k].
std::vector<double> evaluate_gradient(const Field& field, int cell,
                                      std::span<const Vec2> local_points);

/// Value at a physical point (located on the structured mesh).
Eigen::VectorXd evaluate_at(const Field& field, const Vec2& x);

/// Nodal interpolation (Lagrange) or moment interpolation (BDM).
Field interpolate(const ScalarFunction& f, SpacePtr space);
Field interpolate(const VectorFunction& f, SpacePtr space);

/// Moment interpolation of a field that is piecewise polynomial on the same
/// mesh into a BDM space (exact whenever the field already lies in it).
Field interpolate_field(const Field& source, SpacePtr bdm_space);

/// L2 projections. Zero-mean target spaces project onto the zero-mean subspace.
Field l2_project(const ScalarFunction& f, SpacePtr space);
Field l2_project(const VectorFunction& f, SpacePtr space);
Field l2_project(const Field& source, SpacePtr space);

/// Integral of a scalar field, and of each basis function (the mean vector).
double integrate(const Field& field);
Eigen::VectorXd basis_integrals(const FunctionSpace& space);

/// L2 norm of field - exact using a rule of the given degree.
double l2_error(const Field& field, const ScalarFunction& exact, int degree);
double l2_error(const Field& field, const VectorFunction& exact, int degree);

/// Default cell rule degree for forms on a space: 2 * degree + 2.
int cell_rule_degree(const FunctionSpace& space);

/// Default edge rule degree: covers trilinear edge forms.
int edge_rule_degree(const FunctionSpace& space);

}  // namespace eulerfe
