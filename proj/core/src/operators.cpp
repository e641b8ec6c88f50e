#include "eulerfe/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eulerfe/dual.hpp"

namespace eulerfe {

namespace {

void check_same_mesh(const FunctionSpace& a, const FunctionSpace& b, const char* what) {
  if (a.mesh_ptr() != b.mesh_ptr()) throw std::invalid_argument(std::string(what) + ": spaces on different meshes");
}

// Assembles sum_T sum_q w_q k(q, i, j) over test and trial bases on a common rule.
template <class Kernel>
SparseOperator assemble_bilinear(const FunctionSpace& test, const FunctionSpace& trial, int degree,
                                 Kernel&& kernel) {
  check_same_mesh(test, trial, "assemble_bilinear");
  const Mesh& mesh = test.mesh();
  const Quadrature rule = triangle_quadrature(degree);
  FEValues ft(test, rule.points);
  FEValues fu(trial, rule.points);
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<size_t>(mesh.num_cells()) * test.local_dim() * trial.local_dim());
  std::vector<double> local(test.local_dim() * trial.local_dim());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    ft.reinit(c);
    fu.reinit(c);
    const double det = mesh.cell(c).det;
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < rule.size(); ++q) {
      const double wq = rule.weights[q] * det;
      for (int i = 0; i < test.local_dim(); ++i) {
        for (int j = 0; j < trial.local_dim(); ++j) {
          local[i * trial.local_dim() + j] += wq * kernel(ft, fu, q, i, j);
        }
      }
    }
    const auto ti = test.cell_dofs(c);
    const auto tj = trial.cell_dofs(c);
    for (int i = 0; i < test.local_dim(); ++i) {
      if (ti[i] < 0) continue;
      for (int j = 0; j < trial.local_dim(); ++j) {
        if (tj[j] < 0) continue;
        const double v = local[i * trial.local_dim() + j];
        if (v != 0.0) triplets.emplace_back(ti[i], tj[j], v);
      }
    }
  }
  SparseOperator op;
  op.matrix.resize(test.dim(), trial.dim());
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.prune();
  return op;
}

}  // namespace

SparseOperator mass_matrix(const FunctionSpace& space) {
  SparseOperator op = mass_matrix(space, space);
  op.symmetric = true;
  return op;
}

SparseOperator mass_matrix(const FunctionSpace& test, const FunctionSpace& trial) {
  if (test.value_size() != trial.value_size()) throw std::invalid_argument("mass_matrix: value size mismatch");
  const int vs = test.value_size();
  return assemble_bilinear(test, trial, test.degree() + trial.degree(),
                           [vs](const FEValues& ft, const FEValues& fu, int q, int i, int j) {
                             double v = 0.0;
                             for (int c = 0; c < vs; ++c) v += ft.value(q, i, c) * fu.value(q, j, c);
                             return v;
                           });
}

SparseOperator stiffness_matrix(const FunctionSpace& space) {
  if (space.value_size() != 1) throw std::invalid_argument("stiffness_matrix: scalar spaces only");
  SparseOperator op =
      assemble_bilinear(space, space, 2 * space.degree(), [](const FEValues& ft, const FEValues& fu, int q, int i, int j) {
        return ft.grad(q, i, 0, 0) * fu.grad(q, j, 0, 0) + ft.grad(q, i, 0, 1) * fu.grad(q, j, 0, 1);
      });
  op.symmetric = true;
  return op;
}

SparseOperator divergence_matrix(const FunctionSpace& v1, const FunctionSpace& v2) {
  if (v1.family() != Family::BDM || v2.value_size() != 1) {
    throw std::invalid_argument("divergence_matrix: expects (BDM, scalar) spaces");
  }
  return assemble_bilinear(v2, v1, v1.degree() + v2.degree(),
                           [](const FEValues& fq, const FEValues& fv, int q, int i, int j) {
                             return fq.value(q, i) * fv.div(q, j);
                           });
}

SparseOperator curl_matrix(const FunctionSpace& v0, const FunctionSpace& v1) {
  if (v0.value_size() != 1 || v1.value_size() != 2) throw std::invalid_argument("curl_matrix: expects (scalar, vector)");
  SparseOperator op = assemble_bilinear(
      v0, v1, v0.degree() + v1.degree(), [](const FEValues& fg, const FEValues& fv, int q, int i, int j) {
        // perp-grad gamma = (gamma_y, -gamma_x)
        return -(fg.grad(q, i, 0, 1) * fv.value(q, j, 0) - fg.grad(q, i, 0, 0) * fv.value(q, j, 1));
      });
  const Mesh& mesh = v0.mesh();
  if (mesh.periodic()) return op;
  const LineQuadrature rule = line_quadrature(v0.degree() + v1.degree());
  EdgeIntegrator eg(v0, rule);
  EdgeIntegrator ev(v1, rule);
  std::vector<Triplet> triplets;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.edge(e).on_wall()) continue;
    eg.reinit(e);
    ev.reinit(e);
    const Vec2& n = mesh.edge(e).normal;
    const int cell = eg.plus().cell();
    const auto gi = v0.cell_dofs(cell);
    const auto vj = v1.cell_dofs(cell);
    for (int i = 0; i < v0.local_dim(); ++i) {
      if (gi[i] < 0) continue;
      for (int j = 0; j < v1.local_dim(); ++j) {
        if (vj[j] < 0) continue;
        double s = 0.0;
        for (int q = 0; q < rule.size(); ++q) {
          // v^perp . n = v_y n_x - v_x n_y
          const double vperp_n = ev.plus().value(q, j, 1) * n.x() - ev.plus().value(q, j, 0) * n.y();
          s -= eg.weight(q) * eg.plus().value(q, i) * vperp_n;
        }
        if (s != 0.0) triplets.emplace_back(gi[i], vj[j], s);
      }
    }
  }
  SparseMatrix boundary(v0.dim(), v1.dim());
  boundary.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix += boundary;
  op.prune();
  return op;
}

Eigen::VectorXd load_vector(const FunctionSpace& space, const ScalarFunction& f, int degree) {
  if (space.value_size() != 1) throw std::invalid_argument("load_vector: scalar function on vector space");
  const Mesh& mesh = space.mesh();
  CellIntegrator ci(space, triangle_quadrature(degree));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.dim());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    ci.reinit(c, mesh.cell(c).det);
    const auto dofs = space.cell_dofs(c);
    for (int q = 0; q < ci.size(); ++q) {
      const double fq = f(ci.values().point(q)) * ci.weight(q);
      for (int i = 0; i < space.local_dim(); ++i) {
        if (dofs[i] >= 0) b[dofs[i]] += fq * ci.values().value(q, i);
      }
    }
  }
  return b;
}

Eigen::VectorXd load_vector(const FunctionSpace& space, const VectorFunction& f, int degree) {
  if (space.value_size() != 2) throw std::invalid_argument("load_vector: vector function on scalar space");
  const Mesh& mesh = space.mesh();
  CellIntegrator ci(space, triangle_quadrature(degree));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.dim());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    ci.reinit(c, mesh.cell(c).det);
    const auto dofs = space.cell_dofs(c);
    for (int q = 0; q < ci.size(); ++q) {
      const Vec2 fq = f(ci.values().point(q)) * ci.weight(q);
      for (int i = 0; i < space.local_dim(); ++i) {
        if (dofs[i] >= 0) {
          b[dofs[i]] += fq.x() * ci.values().value(q, i, 0) + fq.y() * ci.values().value(q, i, 1);
        }
      }
    }
  }
  return b;
}

namespace {

}  // namespace

SparseMatrix curl_interpolation_matrix(const FunctionSpace& cg, const FunctionSpace& bdm) {
  const Mesh& mesh = cg.mesh();
  const ReferenceElement& el = cg.element();
  const int ns = el.num_dofs();
  std::vector<double> val(ns), grad(2 * ns);
  std::vector<bool> done(bdm.dim(), false);
  std::vector<Triplet> triplets;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Cell& cell = mesh.cell(c);
    const auto cdofs = cg.cell_dofs(c);
    const auto bdofs = bdm.cell_dofs(c);
    const auto bsigns = bdm.cell_signs(c);
    for (int a = 0; a < ns; ++a) {
      if (cdofs[a] < 0) continue;
      const Eigen::VectorXd local = bdm.element().bdm_functionals([&](const Vec2& xref) -> Vec2 {
        el.tabulate(xref, val.data(), grad.data());
        const Vec2 g = cell.inverse_jacobian.transpose() * Vec2(grad[2 * a], grad[2 * a + 1]);
        const Vec2 u(g.y(), -g.x());
        return cell.det * (cell.inverse_jacobian * u);
      });
      for (int d = 0; d < bdm.local_dim(); ++d) {
        const int g = bdofs[d];
        if (g < 0 || done[g]) continue;
        const double v = bsigns[d] * local[d];
        if (std::abs(v) > 1e-15) triplets.emplace_back(g, cdofs[a], v);
      }
    }
    for (int d = 0; d < bdm.local_dim(); ++d) {
      if (bdofs[d] >= 0) done[bdofs[d]] = true;
    }
  }
  SparseMatrix m(bdm.dim(), cg.dim());
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

Field curl_of(const Field& psi, SpacePtr bdm_space) {
  if (psi.space->family() != Family::CG || bdm_space->family() != Family::BDM) {
    throw std::invalid_argument("curl_of: expects CG stream function and BDM target");
  }
  if (psi.space->degree() != bdm_space->degree() + 1) {
    throw std::invalid_argument("curl_of: CG degree must be BDM degree + 1");
  }
  const SparseMatrix m = curl_interpolation_matrix(*psi.space, *bdm_space);
  return Field(bdm_space, m * psi.coeffs);
}

// ---------------------------------------------------------------------------

WeakVorticity::WeakVorticity(SpacePtr v0, SpacePtr v1)
    : v0_(std::move(v0)), v1_(std::move(v1)), curl_(curl_matrix(*v0_, *v1_)) {
  if (v0_->options().essential_boundary || v0_->zero_mean()) {
    throw std::invalid_argument("WeakVorticity: vorticity space must be the full CG space");
  }
  mass_solver_.factorize(mass_matrix(*v0_).matrix);
}

Eigen::VectorXd WeakVorticity::apply(const Eigen::VectorXd& u) const {
  return mass_solver_.solve(curl_.matrix * u);
}

Eigen::VectorXd WeakVorticity::mass_solve(const Eigen::VectorXd& b) const { return mass_solver_.solve(b); }

Field WeakVorticity::operator()(const Field& u) const {
  if (u.space != v1_) throw std::invalid_argument("WeakVorticity: field not in the velocity space");
  return Field(v0_, apply(u.coeffs));
}

Field weak_vorticity(const Field& u, SpacePtr v0) {
  const WeakVorticity wv(std::move(v0), u.space);
  return wv(u);
}

PoissonSolver::PoissonSolver(SpacePtr psi_space, SpacePtr omega_space)
    : psi_space_(std::move(psi_space)), omega_space_(std::move(omega_space)) {
  const bool periodic = psi_space_->mesh().periodic();
  if (periodic && !psi_space_->zero_mean()) {
    throw std::invalid_argument("PoissonSolver: periodic stream function space must be zero-mean");
  }
  if (!periodic && !psi_space_->options().essential_boundary) {
    throw std::invalid_argument("PoissonSolver: wall stream function space needs psi = 0 on walls");
  }
  stiffness_ = stiffness_matrix(*psi_space_);
  coupling_ = mass_matrix(*psi_space_, *omega_space_);
  Eigen::VectorXd border;
  if (psi_space_->zero_mean()) border = basis_integrals(*psi_space_);
  solver_ = ConstrainedSolver(stiffness_.matrix, border);
}

Eigen::VectorXd PoissonSolver::apply(const Eigen::VectorXd& omega) const {
  return solver_.solve(-(coupling_.matrix * omega));
}

Eigen::VectorXd PoissonSolver::apply_load(const Eigen::VectorXd& load) const { return solver_.solve(-load); }

Field PoissonSolver::operator()(const Field& omega) const {
  return Field(psi_space_, apply(omega.coeffs));
}

Field streamfunction_poisson(const Field& omega, SpacePtr psi_space) {
  const PoissonSolver solver(std::move(psi_space), omega.space);
  return solver(omega);
}

// ---------------------------------------------------------------------------
// Velocity advection

double upwind_coefficient(double wn, const UpwindRule& rule) {
  if (wn > 0.0) return 0.5 * rule.alpha;
  if (wn < 0.0) return -0.5 * rule.alpha;
  return rule.degenerate_value;
}

namespace {

template <class T>
struct V2 {
  T x{}, y{};
};

template <class T>
V2<T> eval_vec(const FEValues& fv, int q, const T* coef) {
  V2<T> r;
  for (int j = 0; j < fv.num_dofs(); ++j) {
    r.x += coef[j] * fv.value(q, j, 0);
    r.y += coef[j] * fv.value(q, j, 1);
  }
  return r;
}

// Cell part of a(w;u,v_i), accumulated into res[i].
template <class T>
void velocity_cell(AdvectionForm form, const FEValues& fv, const Quadrature& rule, double det, const T* W,
                   const T* U, double scale, T* res) {
  const int nl = fv.num_dofs();
  for (int q = 0; q < rule.size(); ++q) {
    const double wq = rule.weights[q] * det * scale;
    const V2<T> w = eval_vec(fv, q, W);
    const V2<T> u = eval_vec(fv, q, U);
    if (form == AdvectionForm::Flux) {
      for (int i = 0; i < nl; ++i) {
        // -(u, (w.grad) v)
        const T dvx = w.x * fv.grad(q, i, 0, 0) + w.y * fv.grad(q, i, 0, 1);
        const T dvy = w.x * fv.grad(q, i, 1, 0) + w.y * fv.grad(q, i, 1, 1);
        res[i] -= (u.x * dvx + u.y * dvy) * wq;
      }
    } else {
      // (u^perp, grad(w^perp . v)), w^perp = (w_y, -w_x)
      T gw[2][2];
      for (int c = 0; c < 2; ++c) {
        for (int k = 0; k < 2; ++k) gw[c][k] = T(0.0);
      }
      for (int j = 0; j < nl; ++j) {
        for (int c = 0; c < 2; ++c) {
          for (int k = 0; k < 2; ++k) gw[c][k] += W[j] * fv.grad(q, j, c, k);
        }
      }
      const T upx = u.y;
      const T upy = -u.x;
      for (int i = 0; i < nl; ++i) {
        const double vx = fv.value(q, i, 0);
        const double vy = fv.value(q, i, 1);
        T d[2];
        for (int k = 0; k < 2; ++k) {
          // d_k (w_y v_x - w_x v_y)
          d[k] = gw[1][k] * vx + w.y * fv.grad(q, i, 0, k) - gw[0][k] * vy - w.x * fv.grad(q, i, 1, k);
        }
        res[i] += (upx * d[0] + upy * d[1]) * wq;
      }
    }
  }
}

// Edge part; res[0..nl) for plus tests and res[nl..2nl) for minus tests.
// `cvals` holds c_e at the edge points.
template <class T>
void velocity_edge(AdvectionForm form, const FEValues& fp, const FEValues* fm, const LineQuadrature& rule,
                   double length, const Vec2& n, const double* cvals, const T* Wp, const T* Up, const T* Wm,
                   const T* Um, double a_scale, double s_scale, T* res) {
  const int nl = fp.num_dofs();
  for (int q = 0; q < rule.size(); ++q) {
    const double wq = rule.weights[q] * length;
    const V2<T> wp = eval_vec(fp, q, Wp);
    const V2<T> up = eval_vec(fp, q, Up);
    V2<T> wm, um;
    if (fm != nullptr) {
      wm = eval_vec(*fm, q, Wm);
      um = eval_vec(*fm, q, Um);
    }
    const double c = cvals[q];
    if (form == AdvectionForm::Flux) {
      T wn, ax, ay, jx, jy;
      if (fm != nullptr) {
        wn = ((wp.x + wm.x) * n.x() + (wp.y + wm.y) * n.y()) * 0.5;
        ax = (up.x + um.x) * 0.5;
        ay = (up.y + um.y) * 0.5;
        jx = up.x - um.x;
        jy = up.y - um.y;
      } else {
        wn = wp.x * n.x() + wp.y * n.y();
        ax = up.x;
        ay = up.y;
        jx = up.x;
        jy = up.y;
      }
      // flux vector paired with [v]: w.n ({u} * a_scale + c [u] * s_scale)
      const T fx = wn * (ax * a_scale + jx * (c * s_scale)) * wq;
      const T fy = wn * (ay * a_scale + jy * (c * s_scale)) * wq;
      for (int i = 0; i < nl; ++i) {
        res[i] += fx * fp.value(q, i, 0) + fy * fp.value(q, i, 1);
        if (fm != nullptr) res[nl + i] -= fx * fm->value(q, i, 0) + fy * fm->value(q, i, 1);
      }
    } else {
      // u^perp . n with u^perp = (u_y, -u_x)
      const T upn = up.y * n.x() - up.x * n.y();
      T avg, jump;
      if (fm != nullptr) {
        const T umn = um.y * n.x() - um.x * n.y();
        avg = (upn + umn) * 0.5;
        jump = upn - umn;
      } else {
        avg = upn;
        jump = upn;
      }
      const T coef = -(avg * a_scale + jump * (c * s_scale)) * wq;
      for (int i = 0; i < nl; ++i) {
        // [w^perp . v]
        res[i] += coef * (wp.y * fp.value(q, i, 0) - wp.x * fp.value(q, i, 1));
        if (fm != nullptr) res[nl + i] -= coef * (wm.y * fm->value(q, i, 0) - wm.x * fm->value(q, i, 1));
      }
    }
  }
}

void gather(const FunctionSpace& s, int cell, const Eigen::VectorXd& x, double* out) {
  const auto dofs = s.cell_dofs(cell);
  for (int i = 0; i < s.local_dim(); ++i) out[i] = dofs[i] >= 0 ? x[dofs[i]] : 0.0;
}

void scatter(const FunctionSpace& s, int cell, const double* local, Eigen::VectorXd& out) {
  const auto dofs = s.cell_dofs(cell);
  for (int i = 0; i < s.local_dim(); ++i) {
    if (dofs[i] >= 0) out[dofs[i]] += local[i];
  }
}

// c_e at the edge points from the upwind source coefficients.
void upwind_values(const EdgeIntegrator& ei, bool interior, const Vec2& n, const double* sp, const double* sm,
                   const UpwindRule& rule, double* cvals) {
  for (int q = 0; q < ei.size(); ++q) {
    const V2<double> a = eval_vec(ei.plus(), q, sp);
    double sn = a.x * n.x() + a.y * n.y();
    if (interior) {
      const V2<double> b = eval_vec(ei.minus(), q, sm);
      sn = 0.5 * (sn + b.x * n.x() + b.y * n.y());
    }
    cvals[q] = upwind_coefficient(sn, rule);
  }
}

constexpr int kMaxLocal = 12;   // BDM_2 local dimension
constexpr int kMaxPoints = 16;  // edge points

template <int NL>
void velocity_jacobian(const FunctionSpace& space, AdvectionForm form, const UpwindRule& rule,
                       const Quadrature& cell_rule, const LineQuadrature& edge_rule, const Eigen::VectorXd& w,
                       double scale, MatrixAssembler& out, int ro, int co) {
  const Mesh& mesh = space.mesh();
  {
    using D = Dual<NL>;
    FEValues fv(space, cell_rule.points);
    D W[NL];
    D res[NL];
    double wl[NL];
    for (int c = 0; c < mesh.num_cells(); ++c) {
      fv.reinit(c);
      gather(space, c, w, wl);
      for (int j = 0; j < NL; ++j) {
        W[j] = D::seeded(wl[j], j, 1.0);
        res[j] = D(0.0);
      }
      velocity_cell<D>(form, fv, cell_rule, mesh.cell(c).det, W, W, 1.0, res);
      const auto dofs = space.cell_dofs(c);
      for (int i = 0; i < NL; ++i) {
        if (dofs[i] < 0) continue;
        for (int j = 0; j < NL; ++j) {
          if (dofs[j] >= 0) out.add(ro + dofs[i], co + dofs[j], scale * res[i].d[j]);
        }
      }
    }
  }
  {
    using D = Dual<2 * NL>;
    EdgeIntegrator ei(space, edge_rule);
    D W[2 * NL];
    D res[2 * NL];
    double wl[2 * NL];
    double cvals[kMaxPoints];
    for (int e = 0; e < mesh.num_edges(); ++e) {
      const bool interior = ei.reinit(e);
      const Edge& edge = mesh.edge(e);
      gather(space, ei.plus().cell(), w, wl);
      if (interior) {
        gather(space, ei.minus().cell(), w, wl + NL);
      } else {
        std::fill(wl + NL, wl + 2 * NL, 0.0);
      }
      upwind_values(ei, interior, edge.normal, wl, wl + NL, rule, cvals);
      for (int j = 0; j < 2 * NL; ++j) {
        W[j] = D::seeded(wl[j], j, 1.0);
        res[j] = D(0.0);
      }
      velocity_edge<D>(form, ei.plus(), interior ? &ei.minus() : nullptr, edge_rule, edge.length, edge.normal,
                       cvals, W, W, W + NL, W + NL, 1.0, 1.0, res);
      const auto dp = space.cell_dofs(ei.plus().cell());
      std::array<int, 2 * NL> dofs;
      for (int i = 0; i < NL; ++i) {
        dofs[i] = dp[i];
        dofs[NL + i] = interior ? space.cell_dofs(ei.minus().cell())[i] : -1;
      }
      for (int i = 0; i < 2 * NL; ++i) {
        if (dofs[i] < 0) continue;
        for (int j = 0; j < 2 * NL; ++j) {
          if (dofs[j] >= 0) out.add(ro + dofs[i], co + dofs[j], scale * res[i].d[j]);
        }
      }
    }
  }
}

}  // namespace

VelocityAdvection::VelocityAdvection(SpacePtr v1, AdvectionForm form, UpwindRule rule)
    : v1_(std::move(v1)), form_(form), rule_(rule) {
  if (v1_->family() != Family::BDM) throw std::invalid_argument("VelocityAdvection: velocity space must be BDM");
  if (rule_.alpha < 0.0) throw std::invalid_argument("VelocityAdvection: alpha must be >= 0");
  cell_rule_ = triangle_quadrature(cell_rule_degree(*v1_));
  edge_rule_ = line_quadrature(edge_rule_degree(*v1_));
}

VelocityAdvection::Parts VelocityAdvection::parts(const Eigen::VectorXd& w, const Eigen::VectorXd& u,
                                                  const Eigen::VectorXd* upwind_source) const {
  const FunctionSpace& s = *v1_;
  const Mesh& mesh = s.mesh();
  const int nl = s.local_dim();
  const Eigen::VectorXd& src = upwind_source != nullptr ? *upwind_source : w;
  Parts out{Eigen::VectorXd::Zero(s.dim()), Eigen::VectorXd::Zero(s.dim())};
  double wl[2 * kMaxLocal], ul[2 * kMaxLocal], sl[2 * kMaxLocal], res[2 * kMaxLocal];
  double cvals[kMaxPoints];
  FEValues fv(s, cell_rule_.points);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    fv.reinit(c);
    gather(s, c, w, wl);
    gather(s, c, u, ul);
    std::fill(res, res + nl, 0.0);
    velocity_cell<double>(form_, fv, cell_rule_, mesh.cell(c).det, wl, ul, 1.0, res);
    scatter(s, c, res, out.a);
  }
  EdgeIntegrator ei(s, edge_rule_);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const bool interior = ei.reinit(e);
    const Edge& edge = mesh.edge(e);
    const int cp = ei.plus().cell();
    gather(s, cp, w, wl);
    gather(s, cp, u, ul);
    gather(s, cp, src, sl);
    if (interior) {
      const int cm = ei.minus().cell();
      gather(s, cm, w, wl + nl);
      gather(s, cm, u, ul + nl);
      gather(s, cm, src, sl + nl);
    }
    upwind_values(ei, interior, edge.normal, sl, sl + nl, rule_, cvals);
    const FEValues* fm = interior ? &ei.minus() : nullptr;
    for (int part = 0; part < 2; ++part) {
      std::fill(res, res + 2 * nl, 0.0);
      velocity_edge<double>(form_, ei.plus(), fm, edge_rule_, edge.length, edge.normal, cvals, wl, ul, wl + nl,
                            ul + nl, part == 0 ? 1.0 : 0.0, part == 1 ? 1.0 : 0.0, res);
      Eigen::VectorXd& target = part == 0 ? out.a : out.s;
      scatter(s, cp, res, target);
      if (interior) scatter(s, ei.minus().cell(), res + nl, target);
    }
  }
  return out;
}

Eigen::VectorXd VelocityAdvection::residual(const Eigen::VectorXd& w) const {
  const FunctionSpace& s = *v1_;
  const Mesh& mesh = s.mesh();
  const int nl = s.local_dim();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(s.dim());
  double wl[2 * kMaxLocal], res[2 * kMaxLocal];
  double cvals[kMaxPoints];
  FEValues fv(s, cell_rule_.points);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    fv.reinit(c);
    gather(s, c, w, wl);
    std::fill(res, res + nl, 0.0);
    velocity_cell<double>(form_, fv, cell_rule_, mesh.cell(c).det, wl, wl, 1.0, res);
    scatter(s, c, res, out);
  }
  EdgeIntegrator ei(s, edge_rule_);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const bool interior = ei.reinit(e);
    const Edge& edge = mesh.edge(e);
    gather(s, ei.plus().cell(), w, wl);
    if (interior) {
      gather(s, ei.minus().cell(), w, wl + nl);
    } else {
      std::fill(wl + nl, wl + 2 * nl, 0.0);
    }
    upwind_values(ei, interior, edge.normal, wl, wl + nl, rule_, cvals);
    std::fill(res, res + 2 * nl, 0.0);
    velocity_edge<double>(form_, ei.plus(), interior ? &ei.minus() : nullptr, edge_rule_, edge.length,
                          edge.normal, cvals, wl, wl, wl + nl, wl + nl, 1.0, 1.0, res);
    scatter(s, ei.plus().cell(), res, out);
    if (interior) scatter(s, ei.minus().cell(), res + nl, out);
  }
  return out;
}

void VelocityAdvection::add_jacobian(const Eigen::VectorXd& w, double scale, MatrixAssembler& out, int row_offset,
                                     int col_offset) const {
  switch (v1_->local_dim()) {
    case 6:
      velocity_jacobian<6>(*v1_, form_, rule_, cell_rule_, edge_rule_, w, scale, out, row_offset, col_offset);
      break;
    case 12:
      velocity_jacobian<12>(*v1_, form_, rule_, cell_rule_, edge_rule_, w, scale, out, row_offset, col_offset);
      break;
    default:
      throw std::logic_error("VelocityAdvection: unsupported local dimension");
  }
}

// ---------------------------------------------------------------------------
// SUPG

SupgRule make_supg_rule(const Mesh& mesh, int r, double beta) {
  if (r != 1 && r != 2) throw std::invalid_argument("make_supg_rule: r must be 1 or 2");
  if (beta < 0.0) throw std::invalid_argument("make_supg_rule: beta must be >= 0");
  SupgRule rule;
  rule.beta = beta;
  rule.xi = r == 1 ? 1.0 : 0.5;
  rule.h_T = mesh.h() / std::sqrt(2.0);
  return rule;
}

namespace {

struct SupgContext {
  const SupgRule* rule;
  const VorticitySource* source;
  double floor;
};

template <class T>
void supg_cell(const FEValues& fv, const Quadrature& rule, const Cell& cell, const T* Psi, const T* Om,
               const T* Dot, const SupgContext& ctx, double a_scale, double s_scale, T* res) {
  using std::sqrt;
  const int ns = fv.num_dofs();
  const double k_tau = 0.5 * ctx.rule->beta * ctx.rule->h_T * ctx.rule->xi;
  const bool stabilised = s_scale != 0.0 && k_tau > 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    const double wq = rule.weights[q] * cell.det;
    T gpx(0.0), gpy(0.0), om(0.0), gox(0.0), goy(0.0), dot(0.0);
    for (int a = 0; a < ns; ++a) {
      const double phi = fv.value(q, a);
      const double dx = fv.grad(q, a, 0, 0);
      const double dy = fv.grad(q, a, 0, 1);
      gpx += Psi[a] * dx;
      gpy += Psi[a] * dy;
      om += Om[a] * phi;
      gox += Om[a] * dx;
      goy += Om[a] * dy;
      dot += Dot[a] * phi;
    }
    // u = perp-grad psi = (psi_y, -psi_x)
    const T ux = gpy;
    const T uy = -gpx;
    const T adv = ux * gox + uy * goy;
    T taus(0.0), r(0.0);
    if (stabilised) {
      r = dot + adv + om * ctx.source->inv_tau;
      if (ctx.source->forcing) r -= ctx.source->forcing(cell.map(fv.reference_point(q)));
      const T speed = sqrt(ux * ux + uy * uy);
      if (value_of(speed) > ctx.floor) {
        taus = k_tau / speed;
      } else {
        taus = T(k_tau / ctx.floor);
      }
    }
    const T ta = adv * (wq * a_scale);
    const T ts = taus * r * (wq * s_scale);
    for (int i = 0; i < ns; ++i) {
      res[i] += ta * fv.value(q, i);
      if (stabilised) res[i] += ts * (ux * fv.grad(q, i, 0, 0) + uy * fv.grad(q, i, 0, 1));
    }
  }
}

template <int NS>
void supg_jacobian(const FunctionSpace& os, const FunctionSpace& ps, const Quadrature& rule,
                   const SupgContext& ctx, const Eigen::VectorXd& psi, const Eigen::VectorXd& omega,
                   const Eigen::VectorXd& omega_dot, double d_psi, double d_omega, double d_dot,
                   MatrixAssembler& out, int ro, int pco, int oco) {
  using D = Dual<2 * NS>;
  const Mesh& mesh = os.mesh();
  FEValues fv(os, rule.points);
  double pl[NS], ol[NS], dl[NS];
  D P[NS], O[NS], Od[NS], res[NS];
  for (int c = 0; c < mesh.num_cells(); ++c) {
    fv.reinit(c);
    gather(ps, c, psi, pl);
    gather(os, c, omega, ol);
    gather(os, c, omega_dot, dl);
    for (int a = 0; a < NS; ++a) {
      P[a] = D::seeded(pl[a], a, d_psi);
      O[a] = D::seeded(ol[a], NS + a, d_omega);
      Od[a] = D::seeded(dl[a], NS + a, d_dot);
      res[a] = D(0.0);
    }
    supg_cell<D>(fv, rule, mesh.cell(c), P, O, Od, ctx, 1.0, 1.0, res);
    const auto od = os.cell_dofs(c);
    const auto pd = ps.cell_dofs(c);
    for (int i = 0; i < NS; ++i) {
      if (od[i] < 0) continue;
      for (int j = 0; j < NS; ++j) {
        if (pd[j] >= 0) out.add(ro + od[i], pco + pd[j], res[i].d[j]);
        if (od[j] >= 0) out.add(ro + od[i], oco + od[j], res[i].d[NS + j]);
      }
    }
  }
}

}  // namespace

SupgAdvection::SupgAdvection(SpacePtr omega_space, SpacePtr psi_space, SupgRule rule, VorticitySource source)
    : omega_space_(std::move(omega_space)),
      psi_space_(std::move(psi_space)),
      rule_(rule),
      source_(std::move(source)) {
  if (omega_space_->family() != Family::CG || psi_space_->family() != Family::CG ||
      omega_space_->degree() != psi_space_->degree()) {
    throw std::invalid_argument("SupgAdvection: psi and omega must share a CG element");
  }
  check_same_mesh(*omega_space_, *psi_space_, "SupgAdvection");
  if (rule_.beta < 0.0) throw std::invalid_argument("SupgAdvection: beta must be >= 0");
  cell_rule_ = triangle_quadrature(cell_rule_degree(*omega_space_));
}

double SupgAdvection::velocity_floor(const Eigen::VectorXd& psi) const {
  const Mesh& mesh = omega_space_->mesh();
  FEValues fv(*psi_space_, cell_rule_.points);
  double pl[16];
  double umax = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    fv.reinit(c);
    gather(*psi_space_, c, psi, pl);
    for (int q = 0; q < cell_rule_.size(); ++q) {
      double gx = 0.0, gy = 0.0;
      for (int a = 0; a < fv.num_dofs(); ++a) {
        gx += pl[a] * fv.grad(q, a, 0, 0);
        gy += pl[a] * fv.grad(q, a, 0, 1);
      }
      umax = std::max(umax, std::sqrt(gx * gx + gy * gy));
    }
  }
  return rule_.velocity_floor * std::max(umax, 1e-30);
}

SupgAdvection::Parts SupgAdvection::parts(const Eigen::VectorXd& psi, const Eigen::VectorXd& omega,
                                          const Eigen::VectorXd& omega_dot) const {
  const FunctionSpace& os = *omega_space_;
  const Mesh& mesh = os.mesh();
  const int ns = os.local_dim();
  const SupgContext ctx{&rule_, &source_, velocity_floor(psi)};
  Parts out{Eigen::VectorXd::Zero(os.dim()), Eigen::VectorXd::Zero(os.dim())};
  FEValues fv(os, cell_rule_.points);
  double pl[16], ol[16], dl[16], res[16];
  for (int c = 0; c < mesh.num_cells(); ++c) {
    fv.reinit(c);
    gather(*psi_space_, c, psi, pl);
    gather(os, c, omega, ol);
    gather(os, c, omega_dot, dl);
    std::fill(res, res + ns, 0.0);
    supg_cell<double>(fv, cell_rule_, mesh.cell(c), pl, ol, dl, ctx, 1.0, 0.0, res);
    scatter(os, c, res, out.a);
    std::fill(res, res + ns, 0.0);
    supg_cell<double>(fv, cell_rule_, mesh.cell(c), pl, ol, dl, ctx, 0.0, 1.0, res);
    scatter(os, c, res, out.s);
  }
  return out;
}

Eigen::VectorXd SupgAdvection::residual(const Eigen::VectorXd& psi, const Eigen::VectorXd& omega,
                                        const Eigen::VectorXd& omega_dot) const {
  const FunctionSpace& os = *omega_space_;
  const Mesh& mesh = os.mesh();
  const int ns = os.local_dim();
  const SupgContext ctx{&rule_, &source_, velocity_floor(psi)};
  Eigen::VectorXd out = Eigen::VectorXd::Zero(os.dim());
  FEValues fv(os, cell_rule_.points);
  double pl[16], ol[16], dl[16], res[16];
  for (int c = 0; c < mesh.num_cells(); ++c) {
    fv.reinit(c);
    gather(*psi_space_, c, psi, pl);
    gather(os, c, omega, ol);
    gather(os, c, omega_dot, dl);
    std::fill(res, res + ns, 0.0);
    supg_cell<double>(fv, cell_rule_, mesh.cell(c), pl, ol, dl, ctx, 1.0, 1.0, res);
    scatter(os, c, res, out);
  }
  return out;
}

void SupgAdvection::add_jacobian(const Eigen::VectorXd& psi, const Eigen::VectorXd& omega,
                                 const Eigen::VectorXd& omega_dot, double d_psi, double d_omega, double d_dot,
                                 MatrixAssembler& out, int row_offset, int psi_col_offset,
                                 int omega_col_offset) const {
  const SupgContext ctx{&rule_, &source_, velocity_floor(psi)};
  switch (omega_space_->local_dim()) {
    case 6:
      supg_jacobian<6>(*omega_space_, *psi_space_, cell_rule_, ctx, psi, omega, omega_dot, d_psi, d_omega, d_dot,
                       out, row_offset, psi_col_offset, omega_col_offset);
      break;
    case 10:
      supg_jacobian<10>(*omega_space_, *psi_space_, cell_rule_, ctx, psi, omega, omega_dot, d_psi, d_omega, d_dot,
                        out, row_offset, psi_col_offset, omega_col_offset);
      break;
    default:
      throw std::logic_error("SupgAdvection: unsupported local dimension");
  }
}

std::vector<double> SupgAdvection::tau(const Eigen::VectorXd& psi) const {
  const Mesh& mesh = omega_space_->mesh();
  const double floor = velocity_floor(psi);
  const double k_tau = 0.5 * rule_.beta * rule_.h_T * rule_.xi;
  FEValues fv(*psi_space_, cell_rule_.points);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(mesh.num_cells()) * cell_rule_.size());
  double pl[16];
  for (int c = 0; c < mesh.num_cells(); ++c) {
    fv.reinit(c);
    gather(*psi_space_, c, psi, pl);
    for (int q = 0; q < cell_rule_.size(); ++q) {
      double gx = 0.0, gy = 0.0;
      for (int a = 0; a < fv.num_dofs(); ++a) {
        gx += pl[a] * fv.grad(q, a, 0, 0);
        gy += pl[a] * fv.grad(q, a, 0, 1);
      }
      out.push_back(k_tau / std::max(std::sqrt(gx * gx + gy * gy), floor));
    }
  }
  return out;
}

std::vector<double> tau_field(const Field& psi, const SupgRule& rule) {
  const SupgAdvection supg(psi.space, psi.space, rule);
  return supg.tau(psi.coeffs);
}

// ---------------------------------------------------------------------------
// Scale splitting

ScaleSplit::ScaleSplit(SpacePtr v1) : v1_(std::move(v1)) {
  if (v1_->family() != Family::BDM) throw std::invalid_argument("ScaleSplit: velocity space must be BDM");
  vl_ = build_space(v1_->mesh_ptr(), Family::VectorCG, v1_->degree());
  mixed_mass_ = mass_matrix(*vl_, *v1_);
  mass_solver_.factorize(mass_matrix(*vl_).matrix);
}

ScaleSplit::Result ScaleSplit::operator()(const Field& u) const {
  Field continuous(vl_, mass_solver_.solve(mixed_mass_.matrix * u.coeffs));
  Field large = interpolate_field(continuous, v1_);
  Field small(v1_, u.coeffs - large.coeffs);
  return {std::move(large), std::move(small), std::move(continuous)};
}

std::pair<double, double> energy_transfer_terms(const Field& u, const UpwindRule& rule, const ScaleSplit& split) {
  const ScaleSplit::Result parts = split(u);
  const VelocityAdvection lie(u.space, AdvectionForm::Lie, rule);
  const VelocityAdvection::Parts forms = lie.parts(u.coeffs, u.coeffs, &parts.large.coeffs);
  return {forms.s.dot(parts.large.coeffs), forms.s.dot(parts.small.coeffs)};
}

}  // namespace eulerfe
