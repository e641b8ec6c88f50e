#include "eulerfe/mesh.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace eulerfe {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

Vec2 reference_vertex(int k) {
  switch (k) {
    case 0: return {0.0, 0.0};
    case 1: return {1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

Mesh build_unit_square_mesh(int n, bool periodic) {
  if (n < 2) {
    throw std::invalid_argument("build_unit_square_mesh: n must be >= 2, got " +
                                std::to_string(n));
  }
  Mesh mesh;
  mesh.n_ = n;
  mesh.periodic_ = periodic;
  const double h = 1.0 / n;
  const int nv = periodic ? n : n + 1;

  auto vid = [&](int i, int j) {
    return periodic ? wrap(i, n) + n * wrap(j, n) : i + (n + 1) * j;
  };

  mesh.vertices_.resize(nv * nv);
  mesh.boundary_vertex_.assign(nv * nv, false);
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nv; ++i) {
      mesh.vertices_[vid(i, j)] = Vec2(i * h, j * h);
      if (!periodic && (i == 0 || j == 0 || i == n || j == n)) {
        mesh.boundary_vertex_[vid(i, j)] = true;
      }
    }
  }

  // Cells: lower-right L(i,j) = (v00, v10, v11), upper-left U(i,j) = (v00, v11, v01).
  auto lower = [&](int i, int j) { return 2 * (wrap(i, n) + n * wrap(j, n)); };
  auto upper = [&](int i, int j) { return 2 * (wrap(i, n) + n * wrap(j, n)) + 1; };

  // Edges per square: H(i,j) bottom, V(i,j) left, D(i,j) diagonal; walls add
  // the top row H(i,n) and the right column V(n,j).
  auto hedge = [&](int i, int j) {
    if (periodic) return 3 * (wrap(i, n) + n * wrap(j, n));
    if (j == n) return 3 * n * n + i;
    return 3 * (i + n * j);
  };
  auto vedge = [&](int i, int j) {
    if (periodic) return 3 * (wrap(i, n) + n * wrap(j, n)) + 1;
    if (i == n) return 3 * n * n + n + j;
    return 3 * (i + n * j) + 1;
  };
  auto dedge = [&](int i, int j) { return 3 * (i + n * j) + 2; };

  const int num_edges = periodic ? 3 * n * n : 3 * n * n + 2 * n;
  mesh.edges_.resize(num_edges);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  auto set_edge = [&](int id, int va, int vb, Vec2 normal, int plus, int minus,
                      double length) {
    Edge& e = mesh.edges_[id];
    e.id = id;
    e.vertices = {va, vb};
    e.normal = normal;
    e.plus_cell = plus;
    e.minus_cell = minus;
    e.length = length;
  };

  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      // bottom horizontal edge H(i,j), normal +y, plus side below
      if (i < n && (j < n || !periodic)) {
        const int id = hedge(i, j);
        if (!periodic && j == 0) {
          set_edge(id, vid(i, j), vid(i + 1, j), Vec2(0, -1), lower(i, 0), -1, h);
        } else if (!periodic && j == n) {
          set_edge(id, vid(i, j), vid(i + 1, j), Vec2(0, 1), upper(i, n - 1), -1, h);
        } else {
          set_edge(id, vid(i, j), vid(i + 1, j), Vec2(0, 1), upper(i, j - 1), lower(i, j), h);
        }
      }
      // left vertical edge V(i,j), normal +x, plus side left
      if (j < n && (i < n || !periodic)) {
        const int id = vedge(i, j);
        if (!periodic && i == 0) {
          set_edge(id, vid(i, j), vid(i, j + 1), Vec2(-1, 0), upper(0, j), -1, h);
        } else if (!periodic && i == n) {
          set_edge(id, vid(i, j), vid(i, j + 1), Vec2(1, 0), lower(n - 1, j), -1, h);
        } else {
          set_edge(id, vid(i, j), vid(i, j + 1), Vec2(1, 0), lower(i - 1, j), upper(i, j), h);
        }
      }
      // diagonal D(i,j), normal (1,-1)/sqrt2, plus side upper-left
      if (i < n && j < n) {
        set_edge(dedge(i, j), vid(i, j), vid(i + 1, j + 1), Vec2(inv_sqrt2, -inv_sqrt2),
                 upper(i, j), lower(i, j), h * std::sqrt(2.0));
      }
    }
  }

  mesh.cells_.resize(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 x00(i * h, j * h), x10((i + 1) * h, j * h), x11((i + 1) * h, (j + 1) * h),
          x01(i * h, (j + 1) * h);
      {
        Cell& c = mesh.cells_[lower(i, j)];
        c.vertices = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)};
        c.coords = {x00, x10, x11};
        c.edges[0] = {vedge(i + 1, j), +1, false};
        c.edges[1] = {dedge(i, j), -1, true};
        c.edges[2] = {hedge(i, j), (!periodic && j == 0) ? +1 : -1, false};
      }
      {
        Cell& c = mesh.cells_[upper(i, j)];
        c.vertices = {vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)};
        c.coords = {x00, x11, x01};
        c.edges[0] = {hedge(i, j + 1), +1, true};
        c.edges[1] = {vedge(i, j), (!periodic && i == 0) ? +1 : -1, true};
        c.edges[2] = {dedge(i, j), +1, false};
      }
    }
  }
  for (Cell& c : mesh.cells_) {
    c.jacobian.col(0) = c.coords[1] - c.coords[0];
    c.jacobian.col(1) = c.coords[2] - c.coords[0];
    c.det = c.jacobian.determinant();
    c.inverse_jacobian = c.jacobian.inverse();
  }
  return mesh;
}

std::pair<int, Vec2> Mesh::locate(const Vec2& x) const {
  double px = x.x();
  double py = x.y();
  if (periodic_) {
    px -= std::floor(px);
    py -= std::floor(py);
  }
  const double sx = px * n_;
  const double sy = py * n_;
  int i = std::clamp(static_cast<int>(std::floor(sx)), 0, n_ - 1);
  int j = std::clamp(static_cast<int>(std::floor(sy)), 0, n_ - 1);
  const double fx = sx - i;
  const double fy = sy - j;
  const int c = 2 * (i + n_ * j) + (fx >= fy ? 0 : 1);
  const Cell& cell = cells_[c];
  return {c, cell.pullback(Vec2(px, py))};
}

Vec2 TraceSide::reference_point(double s) const {
  const double t = reversed ? 1.0 - s : s;
  const Vec2 a = reference_vertex((local_edge + 1) % 3);
  const Vec2 b = reference_vertex((local_edge + 2) % 3);
  return (1.0 - t) * a + t * b;
}

namespace {

TraceSide side_in_cell(const Mesh& mesh, int edge, int cell, int side) {
  const Cell& c = mesh.cell(cell);
  for (int k = 0; k < 3; ++k) {
    if (c.edges[k].edge == edge && c.edges[k].side == side) {
      return {cell, k, c.edges[k].reversed};
    }
  }
  throw std::logic_error("trace_sides: inconsistent mesh connectivity");
}

}  // namespace

TracePair trace_sides(const Mesh& mesh, int edge) {
  const Edge& e = mesh.edge(edge);
  TracePair pair;
  pair.plus = side_in_cell(mesh, edge, e.plus_cell, +1);
  if (!e.on_wall()) pair.minus = side_in_cell(mesh, edge, e.minus_cell, -1);
  return pair;
}

TraceSide minus_side(const Mesh& mesh, int edge) {
  const Edge& e = mesh.edge(edge);
  if (e.on_wall()) {
    throw std::out_of_range("minus_side: edge " + std::to_string(edge) + " lies on a wall");
  }
  return side_in_cell(mesh, edge, e.minus_cell, -1);
}

MeshStatistics mesh_statistics(const Mesh& mesh) {
  MeshStatistics s;
  s.h = mesh.h();
  s.h_T = mesh.h() / std::sqrt(2.0);
  s.vertices = mesh.num_vertices();
  s.edges = mesh.num_edges();
  s.cells = mesh.num_cells();
  s.euler_characteristic = s.vertices - s.edges + s.cells;
  return s;
}

}  // namespace eulerfe
