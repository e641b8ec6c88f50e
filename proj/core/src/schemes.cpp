#include "eulerfe/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eulerfe {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::FluxForm: return "flux";
    case Scheme::LieDerivative: return "lie";
    case Scheme::Supg: return "supg";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "flux" || name == "flux_form") return Scheme::FluxForm;
  if (name == "lie" || name == "lie_derivative") return Scheme::LieDerivative;
  if (name == "supg") return Scheme::Supg;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected flux, lie or supg)");
}

bool is_velocity_scheme(Scheme scheme) { return scheme != Scheme::Supg; }

namespace {

void add_block(MatrixAssembler& out, const SparseMatrix& m, int ro, int co, double scale = 1.0) {
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      out.add(ro + static_cast<int>(it.row()), co + static_cast<int>(it.col()), scale * it.value());
    }
  }
}

void add_block_triplets(std::vector<Triplet>& t, const SparseMatrix& m, int ro, int co, double scale = 1.0) {
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      t.emplace_back(ro + it.row(), co + it.col(), scale * it.value());
    }
  }
}

void add_column(std::vector<Triplet>& t, const Eigen::VectorXd& v, int ro, int col) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) t.emplace_back(ro + i, col, v[i]);
  }
}

void add_row(std::vector<Triplet>& t, const Eigen::VectorXd& v, int row, int co) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) t.emplace_back(row, co + i, v[i]);
  }
}

}  // namespace

Discretisation::Discretisation(std::shared_ptr<const Mesh> mesh, SchemeConfig config)
    : mesh_(std::move(mesh)), config_(std::move(config)) {
  if (config_.r != 1 && config_.r != 2) throw std::invalid_argument("Discretisation: r must be 1 or 2");
  if (!(config_.dt > 0.0)) throw std::invalid_argument("Discretisation: dt must be positive");
  if (!(config_.newton.tol > 0.0) || config_.newton.max_iters < 1) {
    throw std::invalid_argument("Discretisation: Newton tolerance and iteration limit must be positive");
  }
  const bool periodic = mesh_->periodic();
  const int r = config_.r;
  v1_ = build_space(mesh_, Family::BDM, r, {false, !periodic});
  v2_ = build_space(mesh_, Family::DG, r - 1, {true, false});
  v0_ = build_space(mesh_, Family::CG, r + 1);
  vpsi_ = build_space(mesh_, Family::CG, r + 1, {periodic, !periodic});
  mass_w_ = mass_matrix(*v0_);
  poisson_ = std::make_unique<PoissonSolver>(vpsi_, v0_);
  if (periodic) psi_mean_ = basis_integrals(*vpsi_);
  const double inv_tau = config_.drag_tau > 0.0 ? 1.0 / config_.drag_tau : 0.0;
  const double dt = config_.dt;

  newton_ = std::make_unique<NewtonSolver>(config_.newton);
  std::vector<Triplet> t;
  if (is_velocity_scheme(config_.scheme)) {
    if (config_.upwind.alpha < 0.0) throw std::invalid_argument("Discretisation: alpha must be >= 0");
    mass_u_ = mass_matrix(*v1_);
    div_ = divergence_matrix(*v1_, *v2_);
    pressure_mean_ = basis_integrals(*v2_);
    const AdvectionForm form = config_.scheme == Scheme::FluxForm ? AdvectionForm::Flux : AdvectionForm::Lie;
    vel_adv_ = std::make_unique<VelocityAdvection>(v1_, form, config_.upwind);
    curl_grad_.matrix = mass_u_.matrix * curl_interpolation_matrix(*vpsi_, *v1_);
    const int n1 = v1_->dim();
    const int n2 = v2_->dim();
    // Pressure gauge: the constant lies in the kernel of B^T, and the
    // divergence row of the DOF carrying the largest share of the constant is
    // implied by the others. That row is replaced by p_g = 0, and the mean is
    // removed after each solve.
    LinearSolver m2;
    m2.factorize(mass_matrix(*v2_).matrix);
    pressure_one_ = m2.solve(pressure_mean_);
    pressure_one_.maxCoeff(&pressure_gauge_);
    add_saddle_triplets(t, 1.0 / dt + 0.5 * inv_tau);
    constant_block_.resize(n1 + n2, n1 + n2);
    assembler_ = std::make_unique<MatrixAssembler>(n1 + n2, n1 + n2);
  } else {
    if (config_.beta < 0.0) throw std::invalid_argument("Discretisation: beta must be >= 0");
    if (config_.momentum_forcing) throw std::invalid_argument("Discretisation: SUPG takes a vorticity forcing");
    supg_ = std::make_unique<SupgAdvection>(v0_, vpsi_, make_supg_rule(*mesh_, r, config_.beta));
    const int np = vpsi_->dim();
    const int nw = v0_->dim();
    const int size = nw + np + (periodic ? 1 : 0);
    // rows: [R_omega; R_psi; mean], columns: [psi; omega; lambda]
    add_block_triplets(t, mass_w_.matrix, 0, np, 1.0 / dt + 0.5 * inv_tau);
    add_block_triplets(t, poisson_->stiffness().matrix, nw, 0);
    add_block_triplets(t, poisson_->coupling().matrix, nw, np);
    if (periodic) {
      add_column(t, psi_mean_, nw, np + nw);
      add_row(t, psi_mean_, nw + np, 0);
    }
    constant_block_.resize(size, size);
    assembler_ = std::make_unique<MatrixAssembler>(size, size);
  }
  constant_block_.setFromTriplets(t.begin(), t.end());
  constant_block_.makeCompressed();
}

Discretisation::~Discretisation() = default;

void Discretisation::add_saddle_triplets(std::vector<Triplet>& t, double mass_scale) const {
  const int n1 = v1_->dim();
  add_block_triplets(t, mass_u_.matrix, 0, 0, mass_scale);
  add_block_triplets(t, SparseMatrix(div_.matrix.transpose()), 0, n1, -1.0);
  for (int k = 0; k < div_.matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(div_.matrix, k); it; ++it) {
      if (it.row() != pressure_gauge_) t.emplace_back(n1 + it.row(), it.col(), it.value());
    }
  }
  t.emplace_back(n1 + pressure_gauge_, n1 + pressure_gauge_, 1.0);
}

void Discretisation::remove_pressure_mean(Eigen::Ref<Eigen::VectorXd> p) const {
  p -= (pressure_mean_.dot(p) / pressure_mean_.dot(pressure_one_)) * pressure_one_;
}

const WeakVorticity& Discretisation::weak_vorticity_operator() const {
  if (!weak_vort_) weak_vort_ = std::make_unique<WeakVorticity>(v0_, v1_);
  return *weak_vort_;
}

SchemeState Discretisation::initial_state(const ScalarFunction& omega0, const ScalarFunction* psi0) const {
  SchemeState s;
  s.t = 0.0;
  const Field omega = interpolate(omega0, v0_);
  if (is_velocity_scheme(config_.scheme)) {
    const Field psi = psi0 != nullptr ? interpolate(*psi0, vpsi_) : (*poisson_)(omega);
    s.u = curl_of(psi, v1_);
    s.p = Field(v2_);
  } else {
    s.omega = omega;
    s.psi = (*poisson_)(omega);
    s.omega_dot = Field(v0_);
  }
  return s;
}

Eigen::VectorXd Discretisation::momentum_load(double t) const {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(v1_->dim());
  const int degree = cell_rule_degree(*v1_) + 2;
  if (config_.momentum_forcing) {
    load += load_vector(*v1_, VectorFunction([&](const Vec2& x) { return config_.momentum_forcing(x, t); }), degree);
  }
  if (config_.vorticity_forcing) {
    const Eigen::VectorXd f = load_vector(
        *vpsi_, ScalarFunction([&](const Vec2& x) { return config_.vorticity_forcing(x, t); }), degree);
    const Eigen::VectorXd chi = poisson_->apply_load(f);  // laplacian chi = f
    load += curl_grad_.matrix * chi;
  }
  return load;
}

Eigen::VectorXd Discretisation::vorticity_load(double t) const {
  if (!config_.vorticity_forcing) return Eigen::VectorXd::Zero(v0_->dim());
  return load_vector(*v0_, ScalarFunction([&](const Vec2& x) { return config_.vorticity_forcing(x, t); }),
                     cell_rule_degree(*v0_) + 2);
}

VorticitySource Discretisation::supg_source(double t) const {
  VorticitySource src;
  src.inv_tau = config_.drag_tau > 0.0 ? 1.0 / config_.drag_tau : 0.0;
  if (config_.vorticity_forcing) {
    const TimeScalarFunction f = config_.vorticity_forcing;
    src.forcing = [f, t](const Vec2& x) { return f(x, t); };
  }
  return src;
}

StepReport Discretisation::step(SchemeState& state) {
  return is_velocity_scheme(config_.scheme) ? step_velocity(state) : step_supg(state);
}

StepReport Discretisation::step_velocity(SchemeState& state) {
  const int n1 = v1_->dim();
  const int n2 = v2_->dim();
  const double dt = config_.dt;
  const double inv_tau = config_.drag_tau > 0.0 ? 1.0 / config_.drag_tau : 0.0;
  const Eigen::VectorXd un = state.u.coeffs;
  const Eigen::VectorXd load = momentum_load(state.t + 0.5 * dt);
  const SparseMatrix bt = div_.matrix.transpose();

  auto residual = [&](const Eigen::VectorXd& x) {
    const auto u = x.head(n1);
    const auto p = x.segment(n1, n2);
    const Eigen::VectorXd w = 0.5 * (un + u);
    Eigen::VectorXd r(n1 + n2);
    r.head(n1) = mass_u_.matrix * ((u - un) / dt + inv_tau * w) + vel_adv_->residual(w) - bt * p - load;
    r.segment(n1, n2) = div_.matrix * u;
    r[n1 + pressure_gauge_] = p[pressure_gauge_];
    return r;
  };
  auto jacobian = [&](const Eigen::VectorXd& x) -> const SparseMatrix& {
    const Eigen::VectorXd w = 0.5 * (un + x.head(n1));
    assembler_->begin();
    add_block(*assembler_, constant_block_, 0, 0);
    vel_adv_->add_jacobian(w, 0.5, *assembler_, 0, 0);
    return assembler_->finish();
  };

  Eigen::VectorXd x(n1 + n2);
  x.head(n1) = un;
  x.segment(n1, n2) = state.p.coeffs;
  x[n1 + pressure_gauge_] = 0.0;
  StepReport report;
  report.newton = newton_->solve(residual, jacobian, x);
  if (!report.newton.converged) {
    throw NewtonFailure("Newton iteration did not converge at t = " + std::to_string(state.t), report.newton);
  }
  state.u.coeffs = x.head(n1);
  state.p.coeffs = x.segment(n1, n2);
  remove_pressure_mean(state.p.coeffs);
  state.t += dt;
  return report;
}

StepReport Discretisation::step_supg(SchemeState& state) {
  const bool periodic = mesh_->periodic();
  const int np = vpsi_->dim();
  const int nw = v0_->dim();
  const int size = nw + np + (periodic ? 1 : 0);
  const double dt = config_.dt;
  const double inv_tau = config_.drag_tau > 0.0 ? 1.0 / config_.drag_tau : 0.0;
  const double tmid = state.t + 0.5 * dt;
  const Eigen::VectorXd psin = state.psi.coeffs;
  const Eigen::VectorXd wn = state.omega.coeffs;
  const Eigen::VectorXd load = vorticity_load(tmid);
  supg_->set_source(supg_source(tmid));
  const SparseMatrix& k = poisson_->stiffness().matrix;
  const SparseMatrix& c = poisson_->coupling().matrix;

  auto residual = [&](const Eigen::VectorXd& x) {
    const auto psi = x.head(np);
    const auto w = x.segment(np, nw);
    const Eigen::VectorXd psi_mid = 0.5 * (psin + psi);
    const Eigen::VectorXd w_mid = 0.5 * (wn + w);
    const Eigen::VectorXd w_dot = (w - wn) / dt;
    Eigen::VectorXd r(size);
    r.head(nw) = mass_w_.matrix * (w_dot + inv_tau * w_mid) + supg_->residual(psi_mid, w_mid, w_dot) - load;
    r.segment(nw, np) = k * psi + c * w;
    if (periodic) {
      r.segment(nw, np) += psi_mean_ * x[np + nw];
      r[nw + np] = psi_mean_.dot(psi);
    }
    return r;
  };
  auto jacobian = [&](const Eigen::VectorXd& x) -> const SparseMatrix& {
    const Eigen::VectorXd psi_mid = 0.5 * (psin + x.head(np));
    const Eigen::VectorXd w_mid = 0.5 * (wn + x.segment(np, nw));
    const Eigen::VectorXd w_dot = (x.segment(np, nw) - wn) / dt;
    assembler_->begin();
    add_block(*assembler_, constant_block_, 0, 0);
    supg_->add_jacobian(psi_mid, w_mid, w_dot, 0.5, 0.5, 1.0 / dt, *assembler_, 0, 0, np);
    return assembler_->finish();
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(size);
  x.head(np) = psin;
  x.segment(np, nw) = wn;
  StepReport report;
  report.newton = newton_->solve(residual, jacobian, x);
  if (!report.newton.converged) {
    throw NewtonFailure("Newton iteration did not converge at t = " + std::to_string(state.t), report.newton);
  }
  state.psi.coeffs = x.head(np);
  state.omega.coeffs = x.segment(np, nw);
  state.omega_dot.coeffs = (state.omega.coeffs - wn) / dt;
  state.t += dt;
  return report;
}

double Discretisation::energy(const SchemeState& state) const {
  if (is_velocity_scheme(config_.scheme)) return 0.5 * state.u.coeffs.dot(mass_u_.matrix * state.u.coeffs);
  return 0.5 * state.psi.coeffs.dot(poisson_->stiffness().matrix * state.psi.coeffs);
}

double Discretisation::enstrophy(const SchemeState& state) const {
  const Field w = vorticity(state);
  return 0.5 * w.coeffs.dot(mass_w_.matrix * w.coeffs);
}

Field Discretisation::vorticity(const SchemeState& state) const {
  if (is_velocity_scheme(config_.scheme)) return weak_vorticity_operator()(state.u);
  return state.omega;
}

Field Discretisation::streamfunction(const SchemeState& state) const {
  if (is_velocity_scheme(config_.scheme)) return (*poisson_)(vorticity(state));
  return state.psi;
}

Vec2 Discretisation::velocity_at(const SchemeState& state, const Vec2& x) const {
  const Field u = is_velocity_scheme(config_.scheme) ? state.u : curl_of(state.psi, v1_);
  const Eigen::VectorXd v = evaluate_at(u, x);
  return {v[0], v[1]};
}

double Discretisation::velocity_error(const SchemeState& state, const VectorFunction& exact) const {
  const Field u = is_velocity_scheme(config_.scheme) ? state.u : curl_of(state.psi, v1_);
  return l2_error(u, exact, cell_rule_degree(*v0_) + 4);
}

double Discretisation::source_work(const SchemeState& before, const SchemeState& after) const {
  const double dt = after.t - before.t;
  const double tmid = 0.5 * (before.t + after.t);
  const double inv_tau = config_.drag_tau > 0.0 ? 1.0 / config_.drag_tau : 0.0;
  if (is_velocity_scheme(config_.scheme)) {
    const Eigen::VectorXd w = 0.5 * (before.u.coeffs + after.u.coeffs);
    return dt * (momentum_load(tmid).dot(w) - inv_tau * w.dot(mass_u_.matrix * w));
  }
  const Eigen::VectorXd psi = 0.5 * (before.psi.coeffs + after.psi.coeffs);
  const Eigen::VectorXd omega = 0.5 * (before.omega.coeffs + after.omega.coeffs);
  double work = inv_tau * psi.dot(poisson_->coupling().matrix * omega);
  if (config_.vorticity_forcing) {
    work -= psi.dot(load_vector(*vpsi_, ScalarFunction([&](const Vec2& x) { return config_.vorticity_forcing(x, tmid); }),
                                cell_rule_degree(*vpsi_) + 2));
  }
  return dt * work;
}

Field Discretisation::numerical_jacobian(const SchemeState& state) const {
  if (!is_velocity_scheme(config_.scheme)) {
    const SupgAdvection supg(v0_, vpsi_, supg_->rule(), supg_source(state.t));
    const Eigen::VectorXd forms = supg.residual(state.psi.coeffs, state.omega.coeffs, state.omega_dot.coeffs);
    return Field(v0_, weak_vorticity_operator().mass_solve(forms));
  }
  const int n1 = v1_->dim();
  const int n2 = v2_->dim();
  if (!tendency_solver_) {
    std::vector<Triplet> t;
    add_saddle_triplets(t, 1.0);
    SparseMatrix m(n1 + n2, n1 + n2);
    m.setFromTriplets(t.begin(), t.end());
    tendency_solver_ = std::make_unique<LinearSolver>();
    tendency_solver_->factorize(m);
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n1 + n2);
  rhs.head(n1) = -vel_adv_->residual(state.u.coeffs);
  const Eigen::VectorXd sol = tendency_solver_->solve(rhs);
  const Eigen::VectorXd du = sol.head(n1);
  return Field(v0_, -weak_vorticity_operator().apply(du));
}

double max_pointwise_divergence(const Field& u) {
  const FunctionSpace& s = *u.space;
  const Mesh& mesh = s.mesh();
  const Quadrature rule = triangle_quadrature(cell_rule_degree(s));
  FEValues fv(s, rule.points);
  double worst = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    fv.reinit(c);
    const auto dofs = s.cell_dofs(c);
    for (int q = 0; q < rule.size(); ++q) {
      double d = 0.0;
      for (int i = 0; i < s.local_dim(); ++i) {
        if (dofs[i] >= 0) d += u.coeffs[dofs[i]] * fv.div(q, i);
      }
      worst = std::max(worst, std::abs(d));
    }
  }
  return worst;
}

}  // namespace eulerfe
