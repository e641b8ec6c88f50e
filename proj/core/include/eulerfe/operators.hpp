#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eulerfe/fespace.hpp"
#include "eulerfe/sparse.hpp"

namespace eulerfe {

// ---------------------------------------------------------------------------
// Linear operators

/// Gram matrix (phi_i, phi_j).
SparseOperator mass_matrix(const FunctionSpace& space);

/// Rectangular mass matrix (test_i, trial_j) between two Lagrange spaces on
/// the same mesh and element (e.g. a Dirichlet stream function space against
/// the full vorticity space).
SparseOperator mass_matrix(const FunctionSpace& test, const FunctionSpace& trial);

/// (grad phi_i, grad phi_j).
SparseOperator stiffness_matrix(const FunctionSpace& space);

/// Rows: pressure test q_i, columns: velocity trial v_j; entries (q_i, div v_j).
SparseOperator divergence_matrix(const FunctionSpace& v1, const FunctionSpace& v2);

/// Rows: gamma_i in V0, columns: v_j in V1; entries
/// -(perp-grad gamma_i, v_j) - (gamma_i, v_j^perp . n) on the boundary,
/// so that M omega = C u defines the weak vorticity.
SparseOperator curl_matrix(const FunctionSpace& v0, const FunctionSpace& v1);

/// (f, phi_i) with a rule of the given degree.
Eigen::VectorXd load_vector(const FunctionSpace& space, const ScalarFunction& f, int degree);
Eigen::VectorXd load_vector(const FunctionSpace& space, const VectorFunction& f, int degree);

/// Velocity field perp-grad psi of a stream function, moment-interpolated into
/// a BDM space. Exact because perp-grad CG_{r+1} lies in BDM_r.
Field curl_of(const Field& psi, SpacePtr bdm_space);

/// The linear map behind curl_of: rows BDM DOFs, columns CG DOFs.
SparseMatrix curl_interpolation_matrix(const FunctionSpace& cg, const FunctionSpace& bdm);

/// Weak vorticity: (gamma, omega) = -(perp-grad gamma, u) - boundary term.
/// Holds a factorized mass matrix of V0.
class WeakVorticity {
 public:
  WeakVorticity(SpacePtr v0, SpacePtr v1);
  Field operator()(const Field& u) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  /// Solves with the V0 mass matrix.
  Eigen::VectorXd mass_solve(const Eigen::VectorXd& b) const;
  const SparseOperator& curl() const { return curl_; }

 private:
  SpacePtr v0_;
  SpacePtr v1_;
  SparseOperator curl_;
  LinearSolver mass_solver_;
};

Field weak_vorticity(const Field& u, SpacePtr v0);

/// Stream function from vorticity: (grad psi, grad phi) = -(omega, phi) for
/// phi in the stream function space (zero-mean on the torus, psi = 0 on walls).
class PoissonSolver {
 public:
  PoissonSolver(SpacePtr psi_space, SpacePtr omega_space);
  Field operator()(const Field& omega) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& omega) const;
  /// Solves (grad psi, grad phi_i) = -load_i.
  Eigen::VectorXd apply_load(const Eigen::VectorXd& load) const;
  const SparseOperator& stiffness() const { return stiffness_; }
  const SparseOperator& coupling() const { return coupling_; }

 private:
  SpacePtr psi_space_;
  SpacePtr omega_space_;
  SparseOperator stiffness_;
  SparseOperator coupling_;  // (phi_i, omega_j), rows in psi space
  ConstrainedSolver solver_;
};

Field streamfunction_poisson(const Field& omega, SpacePtr psi_space);

// ---------------------------------------------------------------------------
// Nonlinear advection forms

enum class AdvectionForm { Flux, Lie };

enum class VelocitySource { Full, Continuous };

/// Upwind coefficient c_e = alpha * sign(w.n_e) / 2, with `degenerate_value`
/// where w.n_e = 0.
struct UpwindRule {
  double alpha = 1.0;
  VelocitySource velocity_source = VelocitySource::Full;
  double degenerate_value = 0.0;
};

double upwind_coefficient(double wn, const UpwindRule& rule);

/// Velocity advection forms on BDM_r. The flux form is
///   a(w;u,v) = -sum_T (u, (w.grad) v)_T + sum_e (w.n {u}, [v])_e,
///   s(w;u,v) =  sum_e (c_e w.n [u], [v])_e,
/// and the Lie derivative form
///   a(w;u,v) =  sum_T (u^perp, grad(w^perp.v))_T - sum_e ({u^perp}.n, [w^perp.v])_e,
///   s(w;u,v) = -sum_e (c_e [u^perp].n, [w^perp.v])_e.
/// On wall edges {f} = [f] = f+. The sign inside c_e is taken from the
/// upwind source field (w itself unless given).
class VelocityAdvection {
 public:
  VelocityAdvection(SpacePtr v1, AdvectionForm form, UpwindRule rule);

  AdvectionForm form() const { return form_; }
  const UpwindRule& rule() const { return rule_; }
  const SpacePtr& space() const { return v1_; }

  struct Parts {
    Eigen::VectorXd a;
    Eigen::VectorXd s;
  };
  /// Dual vectors v_i -> a(w;u,v_i) and s(w;u,v_i).
  Parts parts(const Eigen::VectorXd& w, const Eigen::VectorXd& u,
              const Eigen::VectorXd* upwind_source = nullptr) const;

  /// v_i -> a(w;w,v_i) + s(w;w,v_i).
  Eigen::VectorXd residual(const Eigen::VectorXd& w) const;

  /// Adds scale * d residual(w) / dw into the assembler at the given offsets,
  /// with the upwind direction frozen.
  void add_jacobian(const Eigen::VectorXd& w, double scale, MatrixAssembler& out, int row_offset = 0,
                    int col_offset = 0) const;

 private:
  SpacePtr v1_;
  AdvectionForm form_;
  UpwindRule rule_;
  Quadrature cell_rule_;
  LineQuadrature edge_rule_;
};

/// SUPG coefficients; tau_s = beta * h_T * xi / (2 max(|u|, floor)) with
/// floor = velocity_floor * max(global max |u|, 1e-30).
struct SupgRule {
  double beta = 1.0;
  double xi = 1.0;
  double h_T = 0.0;
  double velocity_floor = 1e-2;
};

/// Rule for V0 = CG_{r+1} on the given mesh: xi = 1 (r = 1) or 1/2 (r = 2),
/// h_T = h / sqrt(2).
SupgRule make_supg_rule(const Mesh& mesh, int r, double beta);

/// Source terms that enter the strong residual R:
/// R = omega_dot + u.grad omega - f + omega / tau.
struct VorticitySource {
  ScalarFunction forcing;  // empty: no forcing
  double inv_tau = 0.0;
};

/// SUPG vorticity advection on V0 with u = perp-grad psi:
///   a~(u;omega,phi) = (u.grad omega, phi),
///   s~(u;omega,phi) = (tau_s R, u.grad phi).
class SupgAdvection {
 public:
  SupgAdvection(SpacePtr omega_space, SpacePtr psi_space, SupgRule rule, VorticitySource source = {});

  const SupgRule& rule() const { return rule_; }
  void set_source(VorticitySource source) { source_ = std::move(source); }

  struct Parts {
    Eigen::VectorXd a;
    Eigen::VectorXd s;
  };
  Parts parts(const Eigen::VectorXd& psi, const Eigen::VectorXd& omega,
              const Eigen::VectorXd& omega_dot) const;

  /// phi_i -> a~ + s~.
  Eigen::VectorXd residual(const Eigen::VectorXd& psi, const Eigen::VectorXd& omega,
                           const Eigen::VectorXd& omega_dot) const;

  /// Adds the derivative of the residual with respect to (psi, omega) where
  /// the arguments depend on the unknowns as psi = d_psi * x_psi + ...,
  /// omega = d_omega * x_omega + ..., omega_dot = d_dot * x_omega + ...
  void add_jacobian(const Eigen::VectorXd& psi, const Eigen::VectorXd& omega,
                    const Eigen::VectorXd& omega_dot, double d_psi, double d_omega, double d_dot,
                    MatrixAssembler& out, int row_offset, int psi_col_offset,
                    int omega_col_offset) const;

  /// tau_s at every cell quadrature point, layout [cell * nq + q].
  std::vector<double> tau(const Eigen::VectorXd& psi) const;
  int points_per_cell() const { return cell_rule_.size(); }

 private:
  double velocity_floor(const Eigen::VectorXd& psi) const;

  SpacePtr omega_space_;
  SpacePtr psi_space_;
  SupgRule rule_;
  VorticitySource source_;
  Quadrature cell_rule_;
};

std::vector<double> tau_field(const Field& psi, const SupgRule& rule);

// ---------------------------------------------------------------------------
// Scale splitting of the velocity space

/// Splits BDM_r velocities into the L2 projection onto the continuous vector
/// Lagrange space of degree r and the orthogonal remainder.
class ScaleSplit {
 public:
  explicit ScaleSplit(SpacePtr v1);

  struct Result {
    Field large;        // in V1 (BDM coefficients)
    Field small;        // in V1
    Field continuous;   // in the vector Lagrange space
  };
  Result operator()(const Field& u) const;
  const SpacePtr& continuous_space() const { return vl_; }

 private:
  SpacePtr v1_;
  SpacePtr vl_;
  SparseOperator mixed_mass_;  // (w_i, v_j), rows VectorCG, columns BDM
  LinearSolver mass_solver_;
};

/// (s(u;u,u_l), s(u;u,u_s)) for the Lie form with the upwind sign taken
/// from u_l.
std::pair<double, double> energy_transfer_terms(const Field& u, const UpwindRule& rule,
                                                const ScaleSplit& split);

}  // namespace eulerfe
