#pragma once

#include <functional>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "eulerfe/fespace.hpp"
#include "eulerfe/newton.hpp"
#include "eulerfe/operators.hpp"

namespace eulerfe {

enum class Scheme { FluxForm, LieDerivative, Supg };

std::string to_string(Scheme scheme);
/// Accepts "flux", "flux_form", "lie", "lie_derivative", "supg".
Scheme parse_scheme(const std::string& name);
bool is_velocity_scheme(Scheme scheme);

using TimeScalarFunction = std::function<double(const Vec2&, double)>;
using TimeVectorFunction = std::function<Vec2(const Vec2&, double)>;

struct SchemeConfig {
  Scheme scheme = Scheme::LieDerivative;
  int r = 1;
  double dt = 0.02;
  UpwindRule upwind{};
  double beta = 1.0;
  NewtonOptions newton{};
  /// Vorticity source f(x, t). Velocity schemes lift it to the momentum
  /// forcing perp-grad chi with a discrete Poisson solve for chi.
  TimeScalarFunction vorticity_forcing;
  /// Direct momentum forcing (manufactured solutions); velocity schemes only.
  TimeVectorFunction momentum_forcing;
  /// Ekman drag time scale; <= 0 disables drag.
  double drag_tau = 0.0;
};

/// Prognostic state. Velocity schemes use (u, p); SUPG uses (psi, omega) and
/// keeps the last discrete vorticity tendency for the SUPG residual.
struct SchemeState {
  double t = 0.0;
  Field u;
  Field p;
  Field psi;
  Field omega;
  Field omega_dot;
};

struct StepReport {
  NewtonReport newton;
};

/// One of the three discretisations on a fixed mesh: spaces, assembled linear
/// operators, and the implicit midpoint step.
class Discretisation {
 public:
  Discretisation(std::shared_ptr<const Mesh> mesh, SchemeConfig config);
  ~Discretisation();
  Discretisation(const Discretisation&) = delete;
  Discretisation& operator=(const Discretisation&) = delete;

  const SchemeConfig& config() const { return config_; }
  const Mesh& mesh() const { return *mesh_; }
  const SpacePtr& velocity_space() const { return v1_; }
  const SpacePtr& pressure_space() const { return v2_; }
  const SpacePtr& vorticity_space() const { return v0_; }
  const SpacePtr& streamfunction_space() const { return vpsi_; }

  /// Initial state from a vorticity field (interpolated, psi from the Poisson
  /// problem). If `psi0` is given, velocity schemes use the curl of its
  /// interpolant instead.
  SchemeState initial_state(const ScalarFunction& omega0, const ScalarFunction* psi0 = nullptr) const;

  /// Advances by one implicit midpoint step. Throws NewtonFailure.
  StepReport step(SchemeState& state);

  double energy(const SchemeState& state) const;
  /// Work done by forcing and drag over the step from `before` to `after`,
  /// evaluated at the midpoint. For the Lie and SUPG schemes the energy change
  /// equals this work; the flux form loses an additional non-negative amount.
  double source_work(const SchemeState& before, const SchemeState& after) const;
  double enstrophy(const SchemeState& state) const;
  /// Vorticity in V0 (weak vorticity of u for velocity schemes).
  Field vorticity(const SchemeState& state) const;
  /// Stream function in the stream function space (Poisson solve of the
  /// vorticity for velocity schemes).
  Field streamfunction(const SchemeState& state) const;
  /// Velocity at a physical point.
  Vec2 velocity_at(const SchemeState& state, const Vec2& x) const;
  /// L2 velocity error (u_h = perp-grad psi_h for SUPG).
  double velocity_error(const SchemeState& state, const VectorFunction& exact) const;

  /// Galerkin representative in V0 of the advective vorticity tendency J
  /// (d omega/dt = -J without sources). SUPG: (J, phi) = a~ + s~ using the
  /// stored omega_dot. Velocity schemes: J = -weak_vorticity(du/dt) with
  /// du/dt the divergence-free advective momentum tendency.
  Field numerical_jacobian(const SchemeState& state) const;

  /// Mass matrices of the velocity and vorticity spaces.
  const SparseOperator& velocity_mass() const { return mass_u_; }
  const SparseOperator& vorticity_mass() const { return mass_w_; }
  const SparseOperator& divergence() const { return div_; }
  const VelocityAdvection* velocity_advection() const { return vel_adv_.get(); }
  const SupgAdvection* supg_advection() const { return supg_.get(); }
  const WeakVorticity& weak_vorticity_operator() const;
  const PoissonSolver& poisson() const { return *poisson_; }

 private:
  StepReport step_velocity(SchemeState& state);
  StepReport step_supg(SchemeState& state);
  Eigen::VectorXd momentum_load(double t) const;
  Eigen::VectorXd vorticity_load(double t) const;
  VorticitySource supg_source(double t) const;
  void add_saddle_triplets(std::vector<Triplet>& t, double mass_scale) const;
  void remove_pressure_mean(Eigen::Ref<Eigen::VectorXd> p) const;

  std::shared_ptr<const Mesh> mesh_;
  SchemeConfig config_;
  SpacePtr v1_, v2_, v0_, vpsi_;
  SparseOperator mass_u_, mass_w_, div_;
  SparseOperator curl_grad_;  // (v_i, perp-grad phi_j), BDM x CG stream function
  Eigen::VectorXd pressure_mean_;
  Eigen::VectorXd pressure_one_;  // coefficients of the constant function in V2
  Eigen::Index pressure_gauge_ = 0;
  Eigen::VectorXd psi_mean_;
  std::unique_ptr<VelocityAdvection> vel_adv_;
  std::unique_ptr<SupgAdvection> supg_;
  std::unique_ptr<PoissonSolver> poisson_;
  mutable std::unique_ptr<WeakVorticity> weak_vort_;
  std::unique_ptr<MatrixAssembler> assembler_;
  SparseMatrix constant_block_;
  std::unique_ptr<NewtonSolver> newton_;
  mutable std::unique_ptr<LinearSolver> tendency_solver_;
};

/// Largest |div u| over the cell quadrature points.
double max_pointwise_divergence(const Field& u);

}  // namespace eulerfe
