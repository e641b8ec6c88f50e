#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "eulerfe/manufactured.hpp"
#include "eulerfe/schemes.hpp"
#include "test_util.hpp"

using namespace eulerfe;
using eulerfe::testing::make_mesh;
using eulerfe::testing::random_field;

namespace {

constexpr double kPi = std::numbers::pi;

double turbulence_ic(const Vec2& p) {
  const double x = p.x(), y = p.y();
  return std::sin(8 * kPi * x) * std::sin(8 * kPi * y) + 0.4 * std::cos(6 * kPi * x) * std::cos(6 * kPi * y) +
         0.3 * std::cos(10 * kPi * x) * std::cos(4 * kPi * y) + 0.01 * std::sin(2 * kPi * y) +
         0.02 * std::sin(2 * kPi * x);
}

double smooth_vorticity(const Vec2& p) {
  return std::sin(2 * kPi * p.x()) * std::cos(2 * kPi * p.y()) + 0.5 * std::cos(4 * kPi * p.x()) +
         0.3 * std::sin(2 * kPi * (p.x() + p.y()));
}

SchemeConfig config(Scheme scheme, int r, double dt = 0.05) {
  SchemeConfig c;
  c.scheme = scheme;
  c.r = r;
  c.dt = dt;
  return c;
}

// Smallest nonzero eigenpair of (K, M) on the stream function space.
Eigen::VectorXd laplacian_eigenvector(const Discretisation& d, double& lambda) {
  const Eigen::MatrixXd k = Eigen::MatrixXd(d.poisson().stiffness().matrix);
  const Eigen::MatrixXd m = Eigen::MatrixXd(mass_matrix(*d.streamfunction_space()).matrix);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, m);
  int idx = 0;
  while (eig.eigenvalues()[idx] < 1e-8) ++idx;
  lambda = eig.eigenvalues()[idx];
  return eig.eigenvectors().col(idx);
}

}  // namespace

TEST(Schemes, ParseNames) {
  EXPECT_EQ(parse_scheme("lie"), Scheme::LieDerivative);
  EXPECT_EQ(parse_scheme("flux_form"), Scheme::FluxForm);
  EXPECT_EQ(parse_scheme("supg"), Scheme::Supg);
  EXPECT_THROW(parse_scheme("upwind"), std::invalid_argument);
  for (Scheme s : {Scheme::FluxForm, Scheme::LieDerivative, Scheme::Supg}) EXPECT_EQ(parse_scheme(to_string(s)), s);
}

TEST(Schemes, RejectsInvalidConfig) {
  const auto mesh = make_mesh(2, true);
  EXPECT_THROW(Discretisation(mesh, config(Scheme::Supg, 1, 0.0)), std::invalid_argument);
  EXPECT_THROW(Discretisation(mesh, config(Scheme::Supg, 3)), std::invalid_argument);
  SchemeConfig c = config(Scheme::LieDerivative, 1);
  c.newton.tol = 0.0;
  EXPECT_THROW(Discretisation(mesh, c), std::invalid_argument);
  c = config(Scheme::LieDerivative, 1);
  c.upwind.alpha = -1.0;
  EXPECT_THROW(Discretisation(mesh, c), std::invalid_argument);
}

TEST(Schemes, ConstantVelocityIsSteady) {
  for (Scheme s : {Scheme::FluxForm, Scheme::LieDerivative}) {
    for (int r : {1, 2}) {
      Discretisation d(make_mesh(3, true), config(s, r));
      SchemeState st;
      st.u = interpolate(VectorFunction([](const Vec2&) { return Vec2(0.7, -0.2); }), d.velocity_space());
      st.p = Field(d.pressure_space());
      const Eigen::VectorXd u0 = st.u.coeffs;
      d.step(st);
      d.step(st);
      EXPECT_LT((st.u.coeffs - u0).lpNorm<Eigen::Infinity>(), 1e-12);
      EXPECT_NEAR(st.t, 0.1, 1e-15);
    }
  }
}

TEST(Schemes, ConstantVorticityIsSteady) {
  for (int r : {1, 2}) {
    Discretisation d(make_mesh(3, true), config(Scheme::Supg, r));
    SchemeState st = d.initial_state([](const Vec2&) { return 1.5; });
    const Eigen::VectorXd w0 = st.omega.coeffs;
    d.step(st);
    EXPECT_LT((st.omega.coeffs - w0).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LT(st.psi.coeffs.lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Schemes, LieStepConservesEnergy) {
  std::mt19937 rng(1);
  for (int r : {1, 2}) {
    Discretisation d(make_mesh(4, true), config(Scheme::LieDerivative, r, 0.02));
    SchemeState st;
    st.u = curl_of(random_field(d.streamfunction_space(), rng, 0.2), d.velocity_space());
    st.p = Field(d.pressure_space());
    for (int k = 0; k < 3; ++k) {
      const double e0 = d.energy(st);
      const StepReport rep = d.step(st);
      EXPECT_LE(std::abs(d.energy(st) - e0) / e0, 1e-10);
      EXPECT_LE(rep.newton.iterations, 10);
      EXPECT_LT(max_pointwise_divergence(st.u), 1e-11 * std::max(1.0, st.u.coeffs.lpNorm<Eigen::Infinity>()));
    }
  }
}

TEST(Schemes, FluxStepDoesNotCreateEnergy) {
  std::mt19937 rng(2);
  for (int r : {1, 2}) {
    Discretisation d(make_mesh(4, true), config(Scheme::FluxForm, r, 0.02));
    SchemeState st;
    st.u = curl_of(random_field(d.streamfunction_space(), rng, 0.2), d.velocity_space());
    st.p = Field(d.pressure_space());
    for (int k = 0; k < 3; ++k) {
      const double e0 = d.energy(st);
      d.step(st);
      EXPECT_LE(d.energy(st), e0 + 1e-12);
      EXPECT_LT(max_pointwise_divergence(st.u), 1e-11 * std::max(1.0, st.u.coeffs.lpNorm<Eigen::Infinity>()));
    }
  }
}

TEST(Schemes, SupgStepConservesEnergyAndMeanVorticity) {
  for (int r : {1, 2}) {
    Discretisation d(make_mesh(4, true), config(Scheme::Supg, r, 0.02));
    SchemeState st = d.initial_state(smooth_vorticity);
    const double mean0 = integrate(st.omega);
    for (int k = 0; k < 3; ++k) {
      const double e0 = d.energy(st);
      d.step(st);
      EXPECT_LE(std::abs(d.energy(st) - e0) / e0, 1e-10);
      EXPECT_NEAR(integrate(st.omega), mean0, 1e-12);
      // Poisson relation at the new time level
      const Eigen::VectorXd res = d.poisson().stiffness().matrix * st.psi.coeffs +
                                  d.poisson().coupling().matrix * st.omega.coeffs;
      const Eigen::VectorXd m = basis_integrals(*d.streamfunction_space());
      const Eigen::VectorXd proj = res - m * (m.dot(res) / m.dot(m));
      EXPECT_LT(proj.lpNorm<Eigen::Infinity>(), 1e-11);
    }
  }
}

TEST(Schemes, SupgWallEnergyConservation) {
  Discretisation d(make_mesh(4, false), config(Scheme::Supg, 1, 0.02));
  const ManufacturedSolution ms;
  SchemeState st = d.initial_state([&](const Vec2& x) { return ms.vorticity(x, 0.0); });
  const double e0 = d.energy(st);
  d.step(st);
  EXPECT_LE(std::abs(d.energy(st) - e0) / e0, 1e-10);
}

TEST(Schemes, LaplacianEigenfunctionIsStationary) {
  for (int r : {1, 2}) {
    Discretisation d(make_mesh(3, true), config(Scheme::Supg, r, 0.05));
    double lambda = 0.0;
    const Eigen::VectorXd v = laplacian_eigenvector(d, lambda);
    SchemeState st = d.initial_state([](const Vec2&) { return 0.0; });
    st.psi.coeffs = v / v.lpNorm<Eigen::Infinity>();
    st.omega.coeffs = -lambda * st.psi.coeffs;
    const Eigen::VectorXd w0 = st.omega.coeffs;
    for (int k = 0; k < 3; ++k) d.step(st);
    EXPECT_LT((st.omega.coeffs - w0).lpNorm<Eigen::Infinity>(), 1e-10 * w0.lpNorm<Eigen::Infinity>());
  }
}

TEST(Schemes, DragDecaysSteadyState) {
  const double tau = 100.0, dt = 0.1;
  SchemeConfig c = config(Scheme::Supg, 1, dt);
  c.drag_tau = tau;
  Discretisation d(make_mesh(3, true), c);
  double lambda = 0.0;
  const Eigen::VectorXd v = laplacian_eigenvector(d, lambda);
  SchemeState st = d.initial_state([](const Vec2&) { return 0.0; });
  st.psi.coeffs = v;
  st.omega.coeffs = -lambda * v;
  const double n0 = st.omega.coeffs.norm();
  const double factor = (1.0 - 0.5 * dt / tau) / (1.0 + 0.5 * dt / tau);
  for (int k = 1; k <= 10; ++k) {
    d.step(st);
    const double ratio = st.omega.coeffs.norm() / n0;
    EXPECT_NEAR(ratio, std::pow(factor, k), 1e-10);
    EXPECT_NEAR(ratio, std::exp(-k * dt / tau), 10 * k * std::pow(dt / tau, 3) + 1e-10);
  }
}

TEST(Schemes, InitialConditions) {
  for (Scheme s : {Scheme::LieDerivative, Scheme::Supg}) {
    Discretisation d(make_mesh(8, true), config(s, 1));
    const SchemeState st = d.initial_state(turbulence_ic);
    EXPECT_NEAR(integrate(d.vorticity(st)), 0.0, 1e-12);
    const SchemeState zero = d.initial_state([](const Vec2&) { return 0.0; });
    EXPECT_EQ(d.energy(zero), 0.0);
    EXPECT_EQ(d.enstrophy(zero), 0.0);
  }
  const ManufacturedSolution ms;
  Discretisation d(make_mesh(4, false), config(Scheme::LieDerivative, 2));
  const ScalarFunction psi0 = [&](const Vec2& x) { return ms.psi(x, 0.0); };
  const SchemeState st = d.initial_state([&](const Vec2& x) { return ms.vorticity(x, 0.0); }, &psi0);
  EXPECT_LT(max_pointwise_divergence(st.u), 1e-11);
}

TEST(Schemes, NewtonFailureIsReported) {
  SchemeConfig c = config(Scheme::LieDerivative, 1, 0.5);
  c.newton.max_iters = 1;
  c.newton.tol = 1e-14;
  Discretisation d(make_mesh(3, true), c);
  SchemeState st = d.initial_state(smooth_vorticity);
  EXPECT_THROW(d.step(st), NewtonFailure);
}

TEST(Schemes, ForcedVelocitySchemeMatchesVorticitySource) {
  // With a vorticity source the lifted momentum forcing changes the weak
  // vorticity at the prescribed rate from rest (first step, no advection).
  SchemeConfig c = config(Scheme::LieDerivative, 1, 0.01);
  c.vorticity_forcing = [](const Vec2& x, double) { return std::sin(2 * kPi * x.x()); };
  Discretisation d(make_mesh(8, true), c);
  SchemeState st = d.initial_state([](const Vec2&) { return 0.0; });
  d.step(st);
  const Field w = d.vorticity(st);
  const double err = l2_error(w, ScalarFunction([](const Vec2& x) { return 0.01 * std::sin(2 * kPi * x.x()); }), 8);
  EXPECT_LT(err, 5e-3 * 0.01);
}

TEST(Schemes, ManufacturedShortRunIsAccurate) {
  const ManufacturedSolution ms;
  for (Scheme s : {Scheme::LieDerivative, Scheme::FluxForm, Scheme::Supg}) {
    SchemeConfig c = config(s, 2, 1e-3);
    if (s == Scheme::Supg) {
      c.vorticity_forcing = [&](const Vec2& x, double t) { return ms.vorticity_forcing(x, t); };
    } else {
      c.momentum_forcing = [&](const Vec2& x, double t) { return ms.momentum_forcing(x, t); };
    }
    Discretisation d(make_mesh(6, false), c);
    const ScalarFunction psi0 = [&](const Vec2& x) { return ms.psi(x, 0.0); };
    SchemeState st = d.initial_state([&](const Vec2& x) { return ms.vorticity(x, 0.0); }, &psi0);
    for (int k = 0; k < 20; ++k) d.step(st);
    const double err = d.velocity_error(st, [&](const Vec2& x) { return ms.velocity(x, st.t); });
    EXPECT_LT(err, 2e-2) << to_string(s);
  }
}

TEST(Schemes, EnergyBudgetMatchesSourceWork) {
  for (Scheme s : {Scheme::LieDerivative, Scheme::FluxForm, Scheme::Supg}) {
    SchemeConfig c = config(s, 1, 0.02);
    c.drag_tau = 5.0;
    c.vorticity_forcing = [](const Vec2& x, double t) { return std::sin(4 * kPi * x.x()) * (1.0 + t); };
    Discretisation d(make_mesh(4, true), c);
    SchemeState st = d.initial_state(turbulence_ic);
    for (int k = 0; k < 3; ++k) {
      const SchemeState before = st;
      d.step(st);
      const double change = d.energy(st) - d.energy(before);
      const double work = d.source_work(before, st);
      if (s == Scheme::FluxForm) {
        EXPECT_LE(change, work + 1e-12) << to_string(s);
      } else {
        EXPECT_NEAR(change, work, 1e-10 * d.energy(st)) << to_string(s);
      }
    }
  }
}
