#include "eulerfe/reference_element.hpp"

#include <cmath>
#include <stdexcept>

namespace eulerfe {

std::string to_string(Family family) {
  switch (family) {
    case Family::CG: return "CG";
    case Family::DG: return "DG";
    case Family::BDM: return "BDM";
    case Family::VectorCG: return "VectorCG";
  }
  return "?";
}

double legendre01(int i, double s) {
  const double x = 2.0 * s - 1.0;
  switch (i) {
    case 0: return 1.0;
    case 1: return x;
    case 2: return 0.5 * (3.0 * x * x - 1.0);
    case 3: return 0.5 * (5.0 * x * x * x - 3.0 * x);
    default: throw std::invalid_argument("legendre01: degree > 3");
  }
}

Vec2 ReferenceElement::scaled_normal(int k) {
  switch (k) {
    case 0: return {1.0, 1.0};
    case 1: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

ReferenceElement::ReferenceElement(Family family, int degree) : family_(family), degree_(degree) {
  const bool ok = (family == Family::CG && degree >= 1 && degree <= 3) ||
                  (family == Family::VectorCG && degree >= 1 && degree <= 3) ||
                  (family == Family::DG && degree >= 0 && degree <= 3) ||
                  (family == Family::BDM && degree >= 1 && degree <= 2);
  if (!ok) {
    throw std::invalid_argument("unsupported element " + to_string(family) +
                                std::to_string(degree));
  }
  for (int total = 0; total <= degree; ++total) {
    for (int b = 0; b <= total; ++b) exponents_.emplace_back(total - b, b);
  }
  num_monomials_ = static_cast<int>(exponents_.size());
  if (family == Family::BDM) {
    build_bdm();
  } else {
    build_lagrange();
  }
}

int ReferenceElement::scalar_dofs_interior() const {
  if (degree_ == 0) return 1;
  return (degree_ - 1) * (degree_ - 2) / 2;
}

void ReferenceElement::monomials(const Vec2& x, double* m, double* dm) const {
  for (int j = 0; j < num_monomials_; ++j) {
    const auto [a, b] = exponents_[j];
    const double xa = std::pow(x.x(), a);
    const double yb = std::pow(x.y(), b);
    m[j] = xa * yb;
    if (dm != nullptr) {
      dm[2 * j] = a > 0 ? a * std::pow(x.x(), a - 1) * yb : 0.0;
      dm[2 * j + 1] = b > 0 ? b * xa * std::pow(x.y(), b - 1) : 0.0;
    }
  }
}

void ReferenceElement::build_lagrange() {
  const int p = degree_;
  if (p == 0) {
    nodes_.emplace_back(1.0 / 3.0, 1.0 / 3.0);
  } else {
    for (int k = 0; k < 3; ++k) nodes_.push_back(reference_vertex(k));
    for (int k = 0; k < 3; ++k) {
      const Vec2 a = reference_vertex((k + 1) % 3);
      const Vec2 b = reference_vertex((k + 2) % 3);
      for (int t = 1; t < p; ++t) nodes_.push_back(a + (double(t) / p) * (b - a));
    }
    for (int j = 1; j < p; ++j) {
      for (int i = 1; i + j < p; ++i) nodes_.emplace_back(double(i) / p, double(j) / p);
    }
  }
  scalar_dofs_ = static_cast<int>(nodes_.size());
  if (scalar_dofs_ != num_monomials_) throw std::logic_error("Lagrange node count mismatch");

  Eigen::MatrixXd vandermonde(scalar_dofs_, num_monomials_);
  std::vector<double> m(num_monomials_);
  for (int i = 0; i < scalar_dofs_; ++i) {
    monomials(nodes_[i], m.data(), nullptr);
    for (int j = 0; j < num_monomials_; ++j) vandermonde(i, j) = m[j];
  }
  coeffs_ = vandermonde.inverse();
  if (family_ == Family::VectorCG) {
    value_size_ = 2;
    num_dofs_ = 2 * scalar_dofs_;
  } else {
    value_size_ = 1;
    num_dofs_ = scalar_dofs_;
  }
}

void ReferenceElement::build_bdm() {
  const int r = degree_;
  value_size_ = 2;
  num_dofs_ = (r + 1) * (r + 2);
  const int nprime = 2 * num_monomials_;
  Eigen::MatrixXd functionals(num_dofs_, nprime);
  std::vector<double> m(num_monomials_);
  for (int j = 0; j < nprime; ++j) {
    const int comp = j / num_monomials_;
    const int mono = j % num_monomials_;
    auto prime = [&](const Vec2& x) {
      monomials(x, m.data(), nullptr);
      Vec2 v = Vec2::Zero();
      v[comp] = m[mono];
      return v;
    };
    functionals.col(j) = bdm_functionals(prime);
  }
  coeffs_ = functionals.inverse();
}

void ReferenceElement::tabulate(const Vec2& x, double* values, double* grads) const {
  double m[16];
  double dm[32];
  monomials(x, m, dm);
  if (family_ == Family::BDM) {
    for (int d = 0; d < num_dofs_; ++d) {
      for (int c = 0; c < 2; ++c) {
        double v = 0.0, gx = 0.0, gy = 0.0;
        for (int j = 0; j < num_monomials_; ++j) {
          const double a = coeffs_(c * num_monomials_ + j, d);
          v += a * m[j];
          gx += a * dm[2 * j];
          gy += a * dm[2 * j + 1];
        }
        values[d * 2 + c] = v;
        if (grads != nullptr) {
          grads[(d * 2 + c) * 2] = gx;
          grads[(d * 2 + c) * 2 + 1] = gy;
        }
      }
    }
    return;
  }
  double sv[16];
  double sg[32];
  for (int a = 0; a < scalar_dofs_; ++a) {
    double v = 0.0, gx = 0.0, gy = 0.0;
    for (int j = 0; j < num_monomials_; ++j) {
      const double cj = coeffs_(j, a);
      v += cj * m[j];
      gx += cj * dm[2 * j];
      gy += cj * dm[2 * j + 1];
    }
    sv[a] = v;
    sg[2 * a] = gx;
    sg[2 * a + 1] = gy;
  }
  if (value_size_ == 1) {
    for (int a = 0; a < scalar_dofs_; ++a) {
      values[a] = sv[a];
      if (grads != nullptr) {
        grads[2 * a] = sg[2 * a];
        grads[2 * a + 1] = sg[2 * a + 1];
      }
    }
    return;
  }
  // VectorCG: dof d = comp * ns + a
  for (int comp = 0; comp < 2; ++comp) {
    for (int a = 0; a < scalar_dofs_; ++a) {
      const int d = comp * scalar_dofs_ + a;
      for (int c = 0; c < 2; ++c) {
        values[d * 2 + c] = (c == comp) ? sv[a] : 0.0;
        if (grads != nullptr) {
          grads[(d * 2 + c) * 2] = (c == comp) ? sg[2 * a] : 0.0;
          grads[(d * 2 + c) * 2 + 1] = (c == comp) ? sg[2 * a + 1] : 0.0;
        }
      }
    }
  }
}

}  // namespace eulerfe
