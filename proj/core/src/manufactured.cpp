#include "eulerfe/manufactured.hpp"

#include <cmath>
#include <numbers>

namespace eulerfe {

namespace {

constexpr double kPi = std::numbers::pi;

// d^k/ds^k sin(s) = sin(s + k pi / 2)
double dsin(int k, double s) { return std::sin(s + 0.5 * kPi * k); }

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double ManufacturedSolution::derivative(int a, int b, int m, const Vec2& x, double t) const {
  const double decay_rate = -2.0 / sigma_;
  const double sx = std::pow(kPi, a) * dsin(a, kPi * x.x());
  const double theta = kPi * x.y() - t;
  double total = 0.0;
  // d^m/dt^m [g(y,t) A(t)] with A = exp(-2t/sigma)
  for (int l = 0; l <= m; ++l) {
    const double amp = std::pow(decay_rate, m - l) * std::exp(decay_rate * t);
    // d^b/dy^b d^l/dt^l [sin(pi y) sin(pi y - t)]
    double g = 0.0;
    for (int j = 0; j <= b; ++j) {
      g += binomial(b, j) * std::pow(kPi, j) * dsin(j, kPi * x.y()) * std::pow(kPi, b - j) *
           ((l % 2 == 0) ? 1.0 : -1.0) * dsin(b - j + l, theta);
    }
    total += binomial(m, l) * g * amp;
  }
  return sx * total;
}

Vec2 ManufacturedSolution::velocity(const Vec2& x, double t) const {
  return {derivative(0, 1, 0, x, t), -derivative(1, 0, 0, x, t)};
}

double ManufacturedSolution::vorticity(const Vec2& x, double t) const {
  return derivative(2, 0, 0, x, t) + derivative(0, 2, 0, x, t);
}

Vec2 ManufacturedSolution::momentum_forcing(const Vec2& x, double t) const {
  const Vec2 ut(derivative(0, 1, 1, x, t), -derivative(1, 0, 1, x, t));
  const Vec2 u = velocity(x, t);
  const Vec2 uperp(u.y(), -u.x());
  return ut + vorticity(x, t) * uperp;
}

double ManufacturedSolution::vorticity_forcing(const Vec2& x, double t) const {
  const double wt = derivative(2, 0, 1, x, t) + derivative(0, 2, 1, x, t);
  const double wx = derivative(3, 0, 0, x, t) + derivative(1, 2, 0, x, t);
  const double wy = derivative(2, 1, 0, x, t) + derivative(0, 3, 0, x, t);
  const Vec2 u = velocity(x, t);
  return wt + u.x() * wx + u.y() * wy;
}

}  // namespace eulerfe
