#include "eulerfe/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eulerfe {

LineQuadrature gauss_legendre(int npoints) {
  if (npoints < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  LineQuadrature q;
  q.points.resize(npoints);
  q.weights.resize(npoints);
  q.degree = 2 * npoints - 1;
  for (int i = 0; i < npoints; ++i) {
    // Newton iteration on P_n over [-1,1]
    double x = std::cos(std::numbers::pi * (i + 0.75) / (npoints + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= npoints; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (npoints == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = npoints * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= npoints; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (npoints == 1) p0 = 1.0;
      dp = npoints * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // ascending order on [0,1]
    q.points[npoints - 1 - i] = 0.5 * (x + 1.0);
    q.weights[npoints - 1 - i] = 0.5 * w;
  }
  return q;
}

LineQuadrature line_quadrature(int degree) {
  const int n = std::max(1, (degree + 2) / 2);
  return gauss_legendre(n);
}

Quadrature triangle_quadrature(int degree) {
  // x = a, y = b (1 - a): the Jacobian (1 - a) raises the degree in a by one.
  const int n = std::max(1, (degree + 3) / 2);
  const LineQuadrature g = gauss_legendre(n);
  Quadrature q;
  q.degree = degree;
  q.points.reserve(n * n);
  q.weights.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = g.points[i];
      const double b = g.points[j];
      q.points.emplace_back(a, b * (1.0 - a));
      q.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - a));
    }
  }
  return q;
}

}  // namespace eulerfe
