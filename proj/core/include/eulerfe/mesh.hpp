#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace eulerfe {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Oriented mesh edge. The normal points out of `plus_cell`; wall edges have
/// no minus cell.
struct Edge {
  int id = -1;
  std::array<int, 2> vertices{-1, -1};  // oriented va -> vb
  Vec2 normal = Vec2::Zero();
  int plus_cell = -1;
  int minus_cell = -1;
  double length = 0.0;

  bool on_wall() const { return minus_cell < 0; }
};

/// Local edge k of a cell is opposite local vertex k and runs from local
/// vertex (k+1)%3 to (k+2)%3.
struct CellEdge {
  int edge = -1;
  int side = 0;         // +1 if the cell is the plus side of the edge
  bool reversed = false;  // local direction opposite to va -> vb
};

struct Cell {
  std::array<int, 3> vertices{};
  std::array<Vec2, 3> coords;  // unwrapped, counterclockwise
  std::array<CellEdge, 3> edges;

  /// Affine map x = coords[0] + jacobian * xref onto the reference triangle
  /// (0,0), (1,0), (0,1).
  Mat2 jacobian = Mat2::Zero();
  Mat2 inverse_jacobian = Mat2::Zero();
  double det = 0.0;

  double area() const { return 0.5 * det; }
  Vec2 map(const Vec2& xref) const { return coords[0] + jacobian * xref; }
  Vec2 pullback(const Vec2& x) const { return inverse_jacobian * (x - coords[0]); }
};

/// Structured right-triangle mesh of the unit square. Immutable once built.
class Mesh {
 public:
  int n() const { return n_; }
  bool periodic() const { return periodic_; }
  double h() const { return 1.0 / n_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }

  const Vec2& vertex(int v) const { return vertices_[v]; }
  const Edge& edge(int e) const { return edges_[e]; }
  const Cell& cell(int c) const { return cells_[c]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Cell>& cells() const { return cells_; }

  bool is_boundary_vertex(int v) const { return boundary_vertex_[v]; }

  /// Cell containing the point (x, y) of the unit square together with its
  /// reference coordinates. Periodic meshes wrap the point first.
  std::pair<int, Vec2> locate(const Vec2& x) const;

 private:
  friend Mesh build_unit_square_mesh(int n, bool periodic);

  int n_ = 0;
  bool periodic_ = false;
  std::vector<Vec2> vertices_;
  std::vector<bool> boundary_vertex_;
  std::vector<Edge> edges_;
  std::vector<Cell> cells_;
};

/// n x n squares, each split along the lower-left to upper-right diagonal.
/// Throws std::invalid_argument for n < 2.
Mesh build_unit_square_mesh(int n, bool periodic);

/// Restriction of an edge to one of its sides.
struct TraceSide {
  int cell = -1;
  int local_edge = -1;
  bool reversed = false;

  /// Reference coordinates of the edge point with global parameter s in
  /// [0,1] measured from va to vb.
  Vec2 reference_point(double s) const;
};

struct TracePair {
  TraceSide plus;
  std::optional<TraceSide> minus;
};

TracePair trace_sides(const Mesh& mesh, int edge);

/// Throws std::out_of_range when asked for the minus side of a wall edge.
TraceSide minus_side(const Mesh& mesh, int edge);

struct MeshStatistics {
  double h = 0.0;
  double h_T = 0.0;  // SUPG characteristic length h / sqrt(2)
  int vertices = 0;
  int edges = 0;
  int cells = 0;
  int euler_characteristic = 0;
};

MeshStatistics mesh_statistics(const Mesh& mesh);

/// Reference triangle vertex k.
Vec2 reference_vertex(int k);

}  // namespace eulerfe
