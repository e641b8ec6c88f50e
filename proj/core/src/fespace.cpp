#include "eulerfe/fespace.hpp"

#include <cmath>
#include <stdexcept>

#include "eulerfe/operators.hpp"
#include "eulerfe/sparse.hpp"

namespace eulerfe {

namespace {

Vec2 wrap_point(const Mesh& mesh, Vec2 x) {
  if (!mesh.periodic()) return x;
  for (int k = 0; k < 2; ++k) {
    x[k] -= std::floor(x[k]);
    if (x[k] > 1.0 - 1e-12) x[k] = 0.0;
  }
  return x;
}

// Physical basis with signs at one reference point of a cell.
void basis_at(const FunctionSpace& space, int cell, const Vec2& xref, std::vector<double>& val,
              std::vector<double>& grad) {
  const ReferenceElement& el = space.element();
  const int nd = el.num_dofs();
  const int vs = el.value_size();
  std::vector<double> rv(nd * vs), rg(nd * vs * 2);
  el.tabulate(xref, rv.data(), rg.data());
  const Cell& c = space.mesh().cell(cell);
  const auto signs = space.cell_signs(cell);
  val.assign(nd * vs, 0.0);
  grad.assign(nd * vs * 2, 0.0);
  for (int d = 0; d < nd; ++d) {
    if (el.family() == Family::BDM) {
      for (int i = 0; i < 2; ++i) {
        double v = 0.0;
        for (int a = 0; a < 2; ++a) v += c.jacobian(i, a) * rv[d * 2 + a];
        val[d * 2 + i] = signs[d] * v / c.det;
        for (int k = 0; k < 2; ++k) {
          double g = 0.0;
          for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
              g += c.jacobian(i, a) * rg[(d * 2 + a) * 2 + b] * c.inverse_jacobian(b, k);
            }
          }
          grad[(d * 2 + i) * 2 + k] = signs[d] * g / c.det;
        }
      }
    } else {
      for (int i = 0; i < vs; ++i) {
        val[d * vs + i] = signs[d] * rv[d * vs + i];
        for (int k = 0; k < 2; ++k) {
          double g = 0.0;
          for (int b = 0; b < 2; ++b) g += rg[(d * vs + i) * 2 + b] * c.inverse_jacobian(b, k);
          grad[(d * vs + i) * 2 + k] = signs[d] * g;
        }
      }
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// FunctionSpace

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, Family family, int degree,
                             SpaceOptions options)
    : mesh_(std::move(mesh)), element_(family, degree), options_(options) {
  if (family == Family::DG && degree > 1) {
    throw std::invalid_argument("build_space: DG degree must be 0 or 1");
  }
  if (family == Family::BDM) {
    number_bdm();
  } else {
    number_lagrange();
  }
}

void FunctionSpace::number_lagrange() {
  const Mesh& m = *mesh_;
  const ReferenceElement& el = element_;
  const int ns = el.scalar_num_dofs();
  const int nl = el.num_dofs();
  const int ncells = m.num_cells();
  std::vector<int> scalar(ncells * ns, -1);
  int scalar_dim = 0;
  std::vector<Vec2> scalar_points;

  if (el.family() == Family::DG) {
    scalar_dim = ncells * ns;
    scalar_points.resize(scalar_dim);
    for (int c = 0; c < ncells; ++c) {
      for (int a = 0; a < ns; ++a) {
        scalar[c * ns + a] = c * ns + a;
        scalar_points[c * ns + a] = wrap_point(m, m.cell(c).map(el.nodes()[a]));
      }
    }
  } else {
    const int p = el.degree();
    const int per_edge = p - 1;
    const int per_cell = el.scalar_dofs_interior();
    const int nv = m.num_vertices();
    const int ne = m.num_edges();
    const int full = nv + ne * per_edge + ncells * per_cell;
    std::vector<bool> boundary(full, false);
    std::vector<int> full_local(ncells * ns, -1);
    for (int c = 0; c < ncells; ++c) {
      const Cell& cell = m.cell(c);
      for (int k = 0; k < 3; ++k) {
        full_local[c * ns + k] = cell.vertices[k];
        if (m.is_boundary_vertex(cell.vertices[k])) boundary[cell.vertices[k]] = true;
      }
      for (int k = 0; k < 3; ++k) {
        const CellEdge& ce = cell.edges[k];
        const bool wall = m.edge(ce.edge).on_wall();
        for (int t = 0; t < per_edge; ++t) {
          const int tg = ce.reversed ? per_edge - 1 - t : t;
          const int g = nv + ce.edge * per_edge + tg;
          full_local[c * ns + 3 + k * per_edge + t] = g;
          if (wall) boundary[g] = true;
        }
      }
      for (int i = 0; i < per_cell; ++i) {
        full_local[c * ns + 3 + 3 * per_edge + i] = nv + ne * per_edge + c * per_cell + i;
      }
    }
    std::vector<int> compact(full, -1);
    for (int g = 0; g < full; ++g) {
      if (!(options_.essential_boundary && boundary[g])) compact[g] = scalar_dim++;
    }
    scalar_points.resize(scalar_dim);
    for (int c = 0; c < ncells; ++c) {
      for (int a = 0; a < ns; ++a) {
        const int g = compact[full_local[c * ns + a]];
        scalar[c * ns + a] = g;
        if (g >= 0) scalar_points[g] = wrap_point(m, m.cell(c).map(el.nodes()[a]));
      }
    }
  }

  dofs_.assign(ncells * nl, -1);
  signs_.assign(ncells * nl, 1.0);
  if (el.family() == Family::VectorCG) {
    dim_ = 2 * scalar_dim;
    dof_points_.resize(dim_);
    for (int comp = 0; comp < 2; ++comp) {
      for (int g = 0; g < scalar_dim; ++g) dof_points_[comp * scalar_dim + g] = scalar_points[g];
    }
    for (int c = 0; c < ncells; ++c) {
      for (int comp = 0; comp < 2; ++comp) {
        for (int a = 0; a < ns; ++a) {
          const int s = scalar[c * ns + a];
          dofs_[c * nl + comp * ns + a] = s < 0 ? -1 : comp * scalar_dim + s;
        }
      }
    }
  } else {
    dim_ = scalar_dim;
    dof_points_ = std::move(scalar_points);
    dofs_ = std::move(scalar);
  }
}

void FunctionSpace::number_bdm() {
  const Mesh& m = *mesh_;
  const int r = element_.degree();
  const int per_edge = r + 1;
  const int per_cell = element_.bdm_dofs_interior();
  const int nl = element_.num_dofs();
  const int ne = m.num_edges();
  const int ncells = m.num_cells();
  const int full = ne * per_edge + ncells * per_cell;
  std::vector<int> compact(full, -1);
  dim_ = 0;
  for (int e = 0; e < ne; ++e) {
    const bool drop = options_.essential_boundary && m.edge(e).on_wall();
    for (int i = 0; i < per_edge; ++i) {
      if (!drop) compact[e * per_edge + i] = dim_++;
    }
  }
  for (int g = ne * per_edge; g < full; ++g) compact[g] = dim_++;

  dofs_.assign(ncells * nl, -1);
  signs_.assign(ncells * nl, 1.0);
  for (int c = 0; c < ncells; ++c) {
    const Cell& cell = m.cell(c);
    for (int k = 0; k < 3; ++k) {
      const CellEdge& ce = cell.edges[k];
      for (int i = 0; i < per_edge; ++i) {
        const int l = k * per_edge + i;
        dofs_[c * nl + l] = compact[ce.edge * per_edge + i];
        const double orient = (ce.reversed && (i % 2 == 1)) ? -1.0 : 1.0;
        signs_[c * nl + l] = ce.side * orient;
      }
    }
    for (int i = 0; i < per_cell; ++i) {
      dofs_[c * nl + 3 * per_edge + i] = compact[ne * per_edge + c * per_cell + i];
    }
  }
}

SpacePtr build_space(std::shared_ptr<const Mesh> mesh, Family family, int degree,
                     SpaceOptions options) {
  return std::make_shared<const FunctionSpace>(std::move(mesh), family, degree, options);
}

// ---------------------------------------------------------------------------
// FEValues

FEValues::FEValues(const FunctionSpace& space, std::vector<Vec2> ref_points)
    : space_(space), ref_points_(std::move(ref_points)) {
  const ReferenceElement& el = space.element();
  num_points_ = static_cast<int>(ref_points_.size());
  num_dofs_ = el.num_dofs();
  vs_ = el.value_size();
  const int block = num_dofs_ * vs_;
  ref_val_.resize(num_points_ * block);
  ref_grad_.resize(num_points_ * block * 2);
  for (int q = 0; q < num_points_; ++q) {
    el.tabulate(ref_points_[q], ref_val_.data() + q * block, ref_grad_.data() + q * block * 2);
  }
  shapes_.reserve(8);
}

const FEValues::Tab& FEValues::physical(const Cell& cell) {
  for (const Tab& t : shapes_) {
    if ((t.jacobian - cell.jacobian).cwiseAbs().maxCoeff() <= 1e-15 * cell.jacobian.norm()) {
      return t;
    }
  }
  if (shapes_.size() == shapes_.capacity()) {
    // keep references stable for the current lookup only; the cache is small
    shapes_.reserve(2 * shapes_.capacity());
  }
  Tab t;
  t.jacobian = cell.jacobian;
  const int block = num_dofs_ * vs_;
  t.val.resize(num_points_ * block);
  t.grad.resize(num_points_ * block * 2);
  const Mat2& J = cell.jacobian;
  const Mat2& Ji = cell.inverse_jacobian;
  const double det = cell.det;
  const bool piola = space_.family() == Family::BDM;
  for (int q = 0; q < num_points_; ++q) {
    for (int d = 0; d < num_dofs_; ++d) {
      const int base = (q * num_dofs_ + d) * vs_;
      if (piola) {
        for (int i = 0; i < 2; ++i) {
          t.val[base + i] = (J(i, 0) * ref_val_[base] + J(i, 1) * ref_val_[base + 1]) / det;
          for (int k = 0; k < 2; ++k) {
            double g = 0.0;
            for (int a = 0; a < 2; ++a) {
              for (int b = 0; b < 2; ++b) g += J(i, a) * ref_grad_[(base + a) * 2 + b] * Ji(b, k);
            }
            t.grad[(base + i) * 2 + k] = g / det;
          }
        }
      } else {
        for (int i = 0; i < vs_; ++i) {
          t.val[base + i] = ref_val_[base + i];
          for (int k = 0; k < 2; ++k) {
            t.grad[(base + i) * 2 + k] =
                ref_grad_[(base + i) * 2] * Ji(0, k) + ref_grad_[(base + i) * 2 + 1] * Ji(1, k);
          }
        }
      }
    }
  }
  shapes_.push_back(std::move(t));
  return shapes_.back();
}

void FEValues::reinit(int cell) {
  const Cell& c = space_.mesh().cell(cell);
  tab_ = &physical(c);
  sign_ = space_.cell_signs(cell).data();
  cell_ = cell;
}

Vec2 FEValues::point(int q) const { return space_.mesh().cell(cell_).map(ref_points_[q]); }

// ---------------------------------------------------------------------------
// EdgeIntegrator

EdgeIntegrator::EdgeIntegrator(const FunctionSpace& space, const LineQuadrature& rule)
    : space_(space), rule_(rule) {
  plus_bank_.reserve(6);
  minus_bank_.reserve(6);
  for (int k = 0; k < 3; ++k) {
    for (int rev = 0; rev < 2; ++rev) {
      std::vector<Vec2> pts;
      const TraceSide side{-1, k, rev == 1};
      for (double s : rule_.points) pts.push_back(side.reference_point(s));
      plus_bank_.emplace_back(space, pts);
      minus_bank_.emplace_back(space, pts);
    }
  }
}

bool EdgeIntegrator::reinit(int edge) {
  const TracePair pair = trace_sides(space_.mesh(), edge);
  length_ = space_.mesh().edge(edge).length;
  plus_ = &plus_bank_[pair.plus.local_edge * 2 + (pair.plus.reversed ? 1 : 0)];
  plus_->reinit(pair.plus.cell);
  if (!pair.minus) {
    minus_ = nullptr;
    return false;
  }
  minus_ = &minus_bank_[pair.minus->local_edge * 2 + (pair.minus->reversed ? 1 : 0)];
  minus_->reinit(pair.minus->cell);
  return true;
}

// ---------------------------------------------------------------------------
// Evaluation and interpolation

std::vector<double> evaluate(const Field& field, int cell, std::span<const Vec2> local_points) {
  const FunctionSpace& space = *field.space;
  if (cell < 0 || cell >= space.mesh().num_cells()) {
    throw std::out_of_range("evaluate: cell index out of range");
  }
  const int vs = space.value_size();
  const auto dofs = space.cell_dofs(cell);
  std::vector<double> out(local_points.size() * vs, 0.0);
  std::vector<double> val, grad;
  for (size_t q = 0; q < local_points.size(); ++q) {
    basis_at(space, cell, local_points[q], val, grad);
    for (int d = 0; d < space.local_dim(); ++d) {
      if (dofs[d] < 0) continue;
      const double c = field.coeffs[dofs[d]];
      for (int i = 0; i < vs; ++i) out[q * vs + i] += c * val[d * vs + i];
    }
  }
  return out;
}

std::vector<double> evaluate_gradient(const Field& field, int cell,
                                      std::span<const Vec2> local_points) {
  const FunctionSpace& space = *field.space;
  if (cell < 0 || cell >= space.mesh().num_cells()) {
    throw std::out_of_range("evaluate_gradient: cell index out of range");
  }
  const int vs = space.value_size();
  const auto dofs = space.cell_dofs(cell);
  std::vector<double> out(local_points.size() * vs * 2, 0.0);
  std::vector<double> val, grad;
  for (size_t q = 0; q < local_points.size(); ++q) {
    basis_at(space, cell, local_points[q], val, grad);
    for (int d = 0; d < space.local_dim(); ++d) {
      if (dofs[d] < 0) continue;
      const double c = field.coeffs[dofs[d]];
      for (int i = 0; i < vs * 2; ++i) out[q * vs * 2 + i] += c * grad[d * vs * 2 + i];
    }
  }
  return out;
}

Eigen::VectorXd evaluate_at(const Field& field, const Vec2& x) {
  const auto [cell, xref] = field.space->mesh().locate(x);
  const std::vector<double> v = evaluate(field, cell, std::span<const Vec2>(&xref, 1));
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

namespace {

template <class Pullback>
void bdm_moments(const FunctionSpace& space, Field& out, Pullback&& pullback) {
  const Mesh& m = space.mesh();
  for (int c = 0; c < m.num_cells(); ++c) {
    const Cell& cell = m.cell(c);
    const Eigen::VectorXd local = space.element().bdm_functionals(
        [&](const Vec2& xref) -> Vec2 { return cell.det * (cell.inverse_jacobian * pullback(c, xref)); });
    const auto dofs = space.cell_dofs(c);
    const auto signs = space.cell_signs(c);
    for (int d = 0; d < space.local_dim(); ++d) {
      if (dofs[d] >= 0) out.coeffs[dofs[d]] = signs[d] * local[d];
    }
  }
}

}  // namespace

Field interpolate(const ScalarFunction& f, SpacePtr space) {
  if (space->value_size() != 1) throw std::invalid_argument("interpolate: scalar function into vector space");
  Field out(space);
  const Mesh& m = space->mesh();
  const auto& nodes = space->element().nodes();
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto dofs = space->cell_dofs(c);
    for (int a = 0; a < space->local_dim(); ++a) {
      if (dofs[a] >= 0) out.coeffs[dofs[a]] = f(m.cell(c).map(nodes[a]));
    }
  }
  return out;
}

Field interpolate(const VectorFunction& f, SpacePtr space) {
  Field out(space);
  const Mesh& m = space->mesh();
  if (space->family() == Family::BDM) {
    bdm_moments(*space, out, [&](int c, const Vec2& xref) { return f(m.cell(c).map(xref)); });
    return out;
  }
  if (space->family() != Family::VectorCG) {
    throw std::invalid_argument("interpolate: vector function into scalar space");
  }
  const auto& nodes = space->element().nodes();
  const int ns = space->element().scalar_num_dofs();
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto dofs = space->cell_dofs(c);
    for (int comp = 0; comp < 2; ++comp) {
      for (int a = 0; a < ns; ++a) {
        const int g = dofs[comp * ns + a];
        if (g >= 0) out.coeffs[g] = f(m.cell(c).map(nodes[a]))[comp];
      }
    }
  }
  return out;
}

Field interpolate_field(const Field& source, SpacePtr bdm_space) {
  if (bdm_space->family() != Family::BDM) throw std::invalid_argument("interpolate_field: target must be BDM");
  if (source.space->value_size() != 2) throw std::invalid_argument("interpolate_field: source must be vector valued");
  Field out(bdm_space);
  bdm_moments(*bdm_space, out, [&](int c, const Vec2& xref) {
    const std::vector<double> v = evaluate(source, c, std::span<const Vec2>(&xref, 1));
    return Vec2(v[0], v[1]);
  });
  return out;
}

int cell_rule_degree(const FunctionSpace& space) { return 2 * space.degree() + 2; }

int edge_rule_degree(const FunctionSpace& space) {
  return std::max(2 * space.degree() + 1, 3 * space.degree());
}

Eigen::VectorXd basis_integrals(const FunctionSpace& space) {
  if (space.value_size() != 1) throw std::invalid_argument("basis_integrals: scalar spaces only");
  Eigen::VectorXd m = Eigen::VectorXd::Zero(space.dim());
  CellIntegrator ci(space, triangle_quadrature(space.degree() + 1));
  const Mesh& mesh = space.mesh();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    ci.reinit(c, mesh.cell(c).det);
    const auto dofs = space.cell_dofs(c);
    for (int q = 0; q < ci.size(); ++q) {
      for (int d = 0; d < space.local_dim(); ++d) {
        if (dofs[d] >= 0) m[dofs[d]] += ci.weight(q) * ci.values().value(q, d);
      }
    }
  }
  return m;
}

double integrate(const Field& field) { return basis_integrals(*field.space).dot(field.coeffs); }

namespace {

template <class Source>
Field project(SpacePtr space, int degree, Source&& source) {
  const FunctionSpace& s = *space;
  const Mesh& m = s.mesh();
  const int vs = s.value_size();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s.dim());
  CellIntegrator ci(s, triangle_quadrature(degree));
  std::vector<double> f(vs);
  for (int c = 0; c < m.num_cells(); ++c) {
    ci.reinit(c, m.cell(c).det);
    const auto dofs = s.cell_dofs(c);
    for (int q = 0; q < ci.size(); ++q) {
      source(c, q, ci.values(), f);
      for (int d = 0; d < s.local_dim(); ++d) {
        if (dofs[d] < 0) continue;
        double v = 0.0;
        for (int i = 0; i < vs; ++i) v += f[i] * ci.values().value(q, d, i);
        rhs[dofs[d]] += ci.weight(q) * v;
      }
    }
  }
  const SparseOperator mass = mass_matrix(*space);
  Eigen::VectorXd border;
  if (s.zero_mean()) border = basis_integrals(s);
  const ConstrainedSolver solver(mass.matrix, border);
  return Field(space, solver.solve(rhs));
}

}  // namespace

Field l2_project(const ScalarFunction& f, SpacePtr space) {
  if (space->value_size() != 1) throw std::invalid_argument("l2_project: scalar function into vector space");
  return project(space, 2 * space->degree() + 4,
                 [&](int, int q, const FEValues& fv, std::vector<double>& out) { out[0] = f(fv.point(q)); });
}

Field l2_project(const VectorFunction& f, SpacePtr space) {
  if (space->value_size() != 2) throw std::invalid_argument("l2_project: vector function into scalar space");
  return project(space, 2 * space->degree() + 4, [&](int, int q, const FEValues& fv, std::vector<double>& out) {
    const Vec2 v = f(fv.point(q));
    out[0] = v.x();
    out[1] = v.y();
  });
}

Field l2_project(const Field& source, SpacePtr space) {
  if (source.space->mesh_ptr() != space->mesh_ptr()) {
    throw std::invalid_argument("l2_project: source and target live on different meshes");
  }
  if (source.space->value_size() != space->value_size()) {
    throw std::invalid_argument("l2_project: value size mismatch");
  }
  const int degree = source.space->degree() + space->degree() + 2;
  const Quadrature rule = triangle_quadrature(degree);
  FEValues src(*source.space, rule.points);
  const int vs = space->value_size();
  return project(space, degree, [&](int c, int q, const FEValues&, std::vector<double>& out) {
    if (src.cell() != c) src.reinit(c);
    const auto dofs = source.space->cell_dofs(c);
    for (int i = 0; i < vs; ++i) {
      double v = 0.0;
      for (int d = 0; d < src.num_dofs(); ++d) {
        if (dofs[d] >= 0) v += source.coeffs[dofs[d]] * src.value(q, d, i);
      }
      out[i] = v;
    }
  });
}

namespace {

template <class Exact>
double error_norm(const Field& field, int degree, Exact&& exact) {
  const FunctionSpace& s = *field.space;
  const Mesh& m = s.mesh();
  const int vs = s.value_size();
  CellIntegrator ci(s, triangle_quadrature(degree));
  double sum = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    ci.reinit(c, m.cell(c).det);
    const auto dofs = s.cell_dofs(c);
    for (int q = 0; q < ci.size(); ++q) {
      const Eigen::Vector2d ex = exact(ci.values().point(q));
      for (int i = 0; i < vs; ++i) {
        double v = 0.0;
        for (int d = 0; d < s.local_dim(); ++d) {
          if (dofs[d] >= 0) v += field.coeffs[dofs[d]] * ci.values().value(q, d, i);
        }
        sum += ci.weight(q) * (v - ex[i]) * (v - ex[i]);
      }
    }
  }
  return std::sqrt(sum);
}

}  // namespace

double l2_error(const Field& field, const ScalarFunction& exact, int degree) {
  return error_norm(field, degree, [&](const Vec2& x) { return Eigen::Vector2d(exact(x), 0.0); });
}

double l2_error(const Field& field, const VectorFunction& exact, int degree) {
  return error_norm(field, degree, [&](const Vec2& x) { return exact(x); });
}

}  // namespace eulerfe
