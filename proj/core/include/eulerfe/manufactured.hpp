#pragma once

#include "eulerfe/mesh.hpp"

namespace eulerfe {

/// Stream function psi = sin(pi x) sin(pi y) sin(pi y - t) exp(-2t/sigma) on
/// the unit square (psi = 0 on the walls) with u = perp-grad psi =
/// (psi_y, -psi_x) and omega = laplacian psi.
class ManufacturedSolution {
 public:
  explicit ManufacturedSolution(double sigma = 100.0) : sigma_(sigma) {}

  double sigma() const { return sigma_; }

  /// d^a/dx^a d^b/dy^b d^m/dt^m psi.
  double derivative(int a, int b, int m, const Vec2& x, double t) const;

  double psi(const Vec2& x, double t) const { return derivative(0, 0, 0, x, t); }
  Vec2 velocity(const Vec2& x, double t) const;
  double vorticity(const Vec2& x, double t) const;

  /// F = du/dt + omega u^perp: momentum forcing up to a gradient.
  Vec2 momentum_forcing(const Vec2& x, double t) const;
  /// f = d omega/dt + u . grad omega.
  double vorticity_forcing(const Vec2& x, double t) const;

 private:
  double sigma_;
};

}  // namespace eulerfe
