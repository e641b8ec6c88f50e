#pragma once

#include <vector>

#include "eulerfe/mesh.hpp"

namespace eulerfe {

/// Rule on the reference triangle (0,0), (1,0), (0,1); weights sum to 1/2.
struct Quadrature {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;

  int size() const { return static_cast<int>(points.size()); }
};

/// Rule on [0,1]; weights sum to 1.
struct LineQuadrature {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;

  int size() const { return static_cast<int>(points.size()); }
};

/// n-point Gauss-Legendre rule on [0,1], exact to degree 2n-1.
LineQuadrature gauss_legendre(int npoints);

LineQuadrature line_quadrature(int degree);

/// Collapsed (Duffy) Gauss-Legendre product rule exact to `degree`.
Quadrature triangle_quadrature(int degree);

}  // namespace eulerfe
