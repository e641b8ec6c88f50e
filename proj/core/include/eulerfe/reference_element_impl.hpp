#pragma once

#include "eulerfe/quadrature.hpp"

namespace eulerfe {

template <class F>
Eigen::VectorXd ReferenceElement::bdm_functionals(F&& field) const {
  const int r = degree_;
  Eigen::VectorXd dofs(num_dofs_);
  const LineQuadrature lq = gauss_legendre(r + 3);
  for (int k = 0; k < 3; ++k) {
    const Vec2 a = reference_vertex((k + 1) % 3);
    const Vec2 b = reference_vertex((k + 2) % 3);
    const Vec2 nu = scaled_normal(k);
    for (int i = 0; i <= r; ++i) {
      double s = 0.0;
      for (int q = 0; q < lq.size(); ++q) {
        const double t = lq.points[q];
        const Vec2 v = field(Vec2((1.0 - t) * a + t * b));
        s += lq.weights[q] * v.dot(nu) * legendre01(i, t);
      }
      dofs[k * (r + 1) + i] = s;
    }
  }
  if (r == 2) {
    const Quadrature tq = triangle_quadrature(2 * r + 2);
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (int q = 0; q < tq.size(); ++q) {
      const Vec2& x = tq.points[q];
      const Vec2 v = field(x);
      m0 += tq.weights[q] * v.x();
      m1 += tq.weights[q] * v.y();
      m2 += tq.weights[q] * (-x.y() * v.x() + x.x() * v.y());
    }
    dofs[9] = m0;
    dofs[10] = m1;
    dofs[11] = m2;
  }
  return dofs;
}

}  // namespace eulerfe
