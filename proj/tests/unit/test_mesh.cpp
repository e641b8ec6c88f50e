#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "eulerfe/mesh.hpp"

using namespace eulerfe;

namespace {

int euler(const Mesh& m) { return m.num_vertices() - m.num_edges() + m.num_cells(); }

}  // namespace

TEST(Mesh, PeriodicCounts) {
  const Mesh m = build_unit_square_mesh(2, true);
  EXPECT_EQ(m.num_vertices(), 4);
  EXPECT_EQ(m.num_edges(), 12);
  EXPECT_EQ(m.num_cells(), 8);
  EXPECT_EQ(euler(m), 0);
  for (int n : {3, 5, 8}) {
    const Mesh p = build_unit_square_mesh(n, true);
    EXPECT_EQ(p.num_vertices(), n * n);
    EXPECT_EQ(p.num_edges(), 3 * n * n);
    EXPECT_EQ(p.num_cells(), 2 * n * n);
  }
}

TEST(Mesh, WallCounts) {
  const Mesh m = build_unit_square_mesh(4, false);
  EXPECT_EQ(m.num_vertices(), 25);
  EXPECT_EQ(m.num_edges(), 56);
  EXPECT_EQ(m.num_cells(), 32);
  EXPECT_EQ(euler(m), 1);
}

TEST(Mesh, RejectsTooSmall) {
  EXPECT_THROW(build_unit_square_mesh(1, true), std::invalid_argument);
  EXPECT_THROW(build_unit_square_mesh(0, false), std::invalid_argument);
}

TEST(Mesh, AreasPositiveAndSumToOne) {
  for (bool periodic : {true, false}) {
    for (int n : {2, 3, 7}) {
      const Mesh m = build_unit_square_mesh(n, periodic);
      double total = 0.0;
      for (const Cell& c : m.cells()) {
        EXPECT_GT(c.area(), 0.0);
        total += c.area();
      }
      EXPECT_NEAR(total, 1.0, 1e-14);
    }
  }
}

TEST(Mesh, EdgeSharingAndNormals) {
  for (bool periodic : {true, false}) {
    const Mesh m = build_unit_square_mesh(4, periodic);
    std::vector<int> uses(m.num_edges(), 0);
    for (const Cell& c : m.cells()) {
      for (const CellEdge& ce : c.edges) ++uses[ce.edge];
    }
    for (const Edge& e : m.edges()) {
      EXPECT_NEAR(e.normal.norm(), 1.0, 1e-14);
      EXPECT_EQ(uses[e.id], e.on_wall() ? 1 : 2);
      if (periodic) EXPECT_FALSE(e.on_wall());
    }
  }
}

TEST(Mesh, NormalPointsOutOfPlusCell) {
  for (bool periodic : {true, false}) {
    const Mesh m = build_unit_square_mesh(3, periodic);
    for (const Edge& e : m.edges()) {
      const Cell& c = m.cell(e.plus_cell);
      Vec2 centroid = (c.coords[0] + c.coords[1] + c.coords[2]) / 3.0;
      int local = -1;
      for (int k = 0; k < 3; ++k) {
        if (c.edges[k].edge == e.id && c.edges[k].side == 1) local = k;
      }
      ASSERT_GE(local, 0);
      const Vec2 mid = 0.5 * (c.coords[(local + 1) % 3] + c.coords[(local + 2) % 3]);
      EXPECT_GT((mid - centroid).dot(e.normal), 0.0);
      if (!e.on_wall()) {
        const Cell& o = m.cell(e.minus_cell);
        int other = -1;
        for (int k = 0; k < 3; ++k) {
          if (o.edges[k].edge == e.id && o.edges[k].side == -1) other = k;
        }
        ASSERT_GE(other, 0);
        const Vec2 oc = (o.coords[0] + o.coords[1] + o.coords[2]) / 3.0;
        const Vec2 om = 0.5 * (o.coords[(other + 1) % 3] + o.coords[(other + 2) % 3]);
        EXPECT_LT((om - oc).dot(e.normal), 0.0);
      }
    }
  }
}

TEST(Mesh, TraceSidesMatchPhysicalPoints) {
  for (bool periodic : {true, false}) {
    const Mesh m = build_unit_square_mesh(3, periodic);
    for (int e = 0; e < m.num_edges(); ++e) {
      const TracePair tp = trace_sides(m, e);
      EXPECT_EQ(tp.minus.has_value(), !m.edge(e).on_wall());
      if (!tp.minus) {
        EXPECT_THROW(minus_side(m, e), std::out_of_range);
        continue;
      }
      EXPECT_NE(tp.plus.cell, tp.minus->cell);
      for (double s : {0.0, 0.3, 1.0}) {
        const Vec2 a = m.cell(tp.plus.cell).map(tp.plus.reference_point(s));
        const Vec2 b = m.cell(tp.minus->cell).map(tp.minus->reference_point(s));
        const Vec2 d = a - b;
        // equal modulo the periodic identification
        EXPECT_NEAR(d.x() - std::round(d.x()), 0.0, 1e-14);
        EXPECT_NEAR(d.y() - std::round(d.y()), 0.0, 1e-14);
      }
    }
  }
}

TEST(Mesh, PeriodicBoundaryEdgeJoinsOppositeSides) {
  const Mesh m = build_unit_square_mesh(2, true);
  bool found = false;
  for (const Edge& e : m.edges()) {
    const TracePair tp = trace_sides(m, e.id);
    const Vec2 a = m.cell(tp.plus.cell).map(tp.plus.reference_point(0.5));
    const Vec2 b = m.cell(tp.minus->cell).map(tp.minus->reference_point(0.5));
    if ((a - b).norm() > 0.5) {
      found = true;
      const Cell& cp = m.cell(tp.plus.cell);
      const Cell& cm = m.cell(tp.minus->cell);
      const Vec2 gp = (cp.coords[0] + cp.coords[1] + cp.coords[2]) / 3.0;
      const Vec2 gm = (cm.coords[0] + cm.coords[1] + cm.coords[2]) / 3.0;
      EXPECT_GT((gp - gm).norm(), 0.5);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Mesh, JumpAverageProductRule) {
  const Mesh m = build_unit_square_mesh(3, true);
  auto f = [](const Vec2& x, int cell) { return std::sin(3.0 * x.x() + cell) + x.y() * cell; };
  auto g = [](const Vec2& x, int cell) { return std::cos(x.y() - cell) * (1.0 + x.x()); };
  for (int e = 0; e < m.num_edges(); ++e) {
    const TracePair tp = trace_sides(m, e);
    for (double s : {0.1, 0.5, 0.9}) {
      const Vec2 xp = m.cell(tp.plus.cell).map(tp.plus.reference_point(s));
      const Vec2 xm = m.cell(tp.minus->cell).map(tp.minus->reference_point(s));
      const double fp = f(xp, tp.plus.cell), fm = f(xm, tp.minus->cell);
      const double gp = g(xp, tp.plus.cell), gm = g(xm, tp.minus->cell);
      const double lhs = fp * gp - fm * gm;
      const double rhs = 0.5 * (fp + fm) * (gp - gm) + (fp - fm) * 0.5 * (gp + gm);
      EXPECT_NEAR(lhs, rhs, 1e-13);
    }
  }
}

TEST(Mesh, Statistics) {
  const MeshStatistics s = mesh_statistics(build_unit_square_mesh(128, true));
  EXPECT_DOUBLE_EQ(s.h, 1.0 / 128);
  EXPECT_NEAR(s.h_T, 1.0 / (128 * std::sqrt(2.0)), 1e-16);
  const MeshStatistics a = mesh_statistics(build_unit_square_mesh(4, false));
  const MeshStatistics b = mesh_statistics(build_unit_square_mesh(8, false));
  EXPECT_DOUBLE_EQ(a.h, 2.0 * b.h);
  const MeshStatistics t = mesh_statistics(build_unit_square_mesh(2, true));
  EXPECT_EQ(t.vertices, 4);
  EXPECT_EQ(t.edges, 12);
  EXPECT_EQ(t.cells, 8);
  EXPECT_EQ(t.euler_characteristic, 0);
}

TEST(Mesh, LocateRoundTrip) {
  for (bool periodic : {true, false}) {
    const Mesh m = build_unit_square_mesh(5, periodic);
    for (double x : {0.0, 0.13, 0.5, 0.97}) {
      for (double y : {0.0, 0.41, 0.77}) {
        const auto [cell, ref] = m.locate(Vec2(x, y));
        EXPECT_GE(ref.x(), -1e-12);
        EXPECT_GE(ref.y(), -1e-12);
        EXPECT_LE(ref.x() + ref.y(), 1.0 + 1e-12);
        const Vec2 back = m.cell(cell).map(ref);
        EXPECT_NEAR(back.x() - std::floor(back.x() + 1e-12) * (periodic ? 1 : 0), x, 1e-12);
      }
    }
  }
}

TEST(Mesh, DeterministicNumbering) {
  const Mesh a = build_unit_square_mesh(4, true);
  const Mesh b = build_unit_square_mesh(4, true);
  for (int c = 0; c < a.num_cells(); ++c) EXPECT_EQ(a.cell(c).vertices, b.cell(c).vertices);
}
