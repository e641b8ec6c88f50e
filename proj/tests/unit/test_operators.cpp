#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "eulerfe/newton.hpp"
#include "eulerfe/operators.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace eulerfe;
using eulerfe::testing::make_mesh;
using eulerfe::testing::random_field;
using eulerfe::testing::random_vector;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); }

Field random_divergence_free(const SpacePtr& bdm, std::mt19937& rng) {
  const auto cg = build_space(bdm->mesh_ptr(), Family::CG, bdm->degree() + 1,
                              {false, !bdm->mesh().periodic()});
  return curl_of(random_field(cg, rng), bdm);
}

}  // namespace

// ---------------------------------------------------------------------------
// Linear operators

TEST(Operators, MassMatchesOracle) {
  const auto mesh = make_mesh(2, true);
  for (auto [fam, deg] : {std::pair{Family::CG, 2}, {Family::BDM, 1}, {Family::DG, 1}, {Family::BDM, 2}}) {
    const auto s = build_space(mesh, fam, deg);
    const Eigen::MatrixXd a = Eigen::MatrixXd(mass_matrix(*s).matrix);
    const Eigen::MatrixXd o = oracle::dense_mass(s);
    EXPECT_LT((a - o).norm(), 1e-12 * o.norm());
  }
}

TEST(Operators, MassDg0IsDiagonalOfAreas) {
  const auto mesh = make_mesh(3, false);
  const auto s = build_space(mesh, Family::DG, 0);
  const Eigen::MatrixXd m = Eigen::MatrixXd(mass_matrix(*s).matrix);
  for (int i = 0; i < s->dim(); ++i) {
    for (int j = 0; j < s->dim(); ++j) EXPECT_NEAR(m(i, j), i == j ? 1.0 / 18.0 : 0.0, 1e-15);
  }
}

TEST(Operators, SparseApplyMatchesDense) {
  std::mt19937 rng(1);
  const auto mesh = make_mesh(3, true);
  const auto s = build_space(mesh, Family::BDM, 1);
  const SparseOperator m = mass_matrix(*s);
  const Eigen::VectorXd x = random_vector(s->dim(), rng);
  EXPECT_LT(max_abs(m.apply(x) - Eigen::MatrixXd(m.matrix) * x), 1e-13);
  for (int k = 0; k < m.matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m.matrix, k); it; ++it) EXPECT_GE(std::abs(it.value()), 1e-300);
  }
}

TEST(Operators, DivergenceMatchesOracle) {
  for (bool periodic : {true, false}) {
    const auto mesh = make_mesh(2, periodic);
    for (int r : {1, 2}) {
      const auto v1 = build_space(mesh, Family::BDM, r);
      const auto v2 = build_space(mesh, Family::DG, r - 1);
      const Eigen::MatrixXd b = Eigen::MatrixXd(divergence_matrix(*v1, *v2).matrix);
      const Eigen::MatrixXd o = oracle::dense_divergence(v1, v2);
      EXPECT_LT((b - o).norm(), 1e-12 * o.norm());
    }
  }
}

TEST(Operators, DivergenceExamples) {
  std::mt19937 rng(2);
  const auto mesh = make_mesh(4, true);
  for (int r : {1, 2}) {
    const auto v1 = build_space(mesh, Family::BDM, r);
    const auto v2 = build_space(mesh, Family::DG, r - 1);
    const SparseOperator b = divergence_matrix(*v1, *v2);
    const Field c = interpolate(VectorFunction([](const Vec2&) { return Vec2(0.3, -1.2); }), v1);
    EXPECT_LT(max_abs(b.apply(c.coeffs)), 1e-13);
    EXPECT_LT(max_abs(b.apply(random_divergence_free(v1, rng).coeffs)), 1e-12);
  }
  const auto wall = make_mesh(4, false);
  const auto v1 = build_space(wall, Family::BDM, 1);
  const auto v2 = build_space(wall, Family::DG, 0);
  const Field u = interpolate(VectorFunction([](const Vec2& x) { return x; }), v1);
  const Eigen::VectorXd bu = divergence_matrix(*v1, *v2).apply(u.coeffs);
  const Eigen::VectorXd expect = 2.0 * basis_integrals(*v2);
  EXPECT_LT(max_abs(bu - expect), 1e-13);
}

TEST(Operators, WeakVorticityExamples) {
  const auto mesh = make_mesh(4, true);
  const auto v0 = build_space(mesh, Family::CG, 2);
  const auto v1 = build_space(mesh, Family::BDM, 1);
  const WeakVorticity wv(v0, v1);
  const Field c = interpolate(VectorFunction([](const Vec2&) { return Vec2(1.0, 2.0); }), v1);
  EXPECT_LT(max_abs(wv(c).coeffs), 1e-12);
  std::mt19937 rng(3);
  const Field w = wv(random_field(v1, rng));
  EXPECT_NEAR(integrate(w), 0.0, 1e-12);
}

TEST(Operators, WeakVorticityOfCurlIsLaplacian) {
  // For u = perp-grad psi, the weak vorticity is the Galerkin Laplacian of psi.
  std::mt19937 rng(4);
  for (bool periodic : {true, false}) {
    const auto mesh = make_mesh(3, periodic);
    const auto v0 = build_space(mesh, Family::CG, 2);
    const auto v1 = build_space(mesh, Family::BDM, 1, {false, !periodic});
    const auto vpsi = build_space(mesh, Family::CG, 2, {periodic, !periodic});
    const Field psi = random_field(vpsi, rng);
    const Field u = curl_of(psi, v1);
    const WeakVorticity wv(v0, v1);
    const Eigen::VectorXd lhs = mass_matrix(*v0).matrix * wv(u).coeffs;
    // (gamma, omega) = -(grad gamma, grad psi) for gamma vanishing on the walls
    const SparseOperator k = stiffness_matrix(*v0);
    const Field psi_full = l2_project(psi, v0);
    const Eigen::VectorXd diff = lhs + k.matrix * psi_full.coeffs;
    for (int i = 0; i < v0->dim(); ++i) {
      const Vec2& x = v0->dof_points()[i];
      const bool wall = !periodic && (x.x() < 1e-12 || x.y() < 1e-12 || x.x() > 1 - 1e-12 || x.y() > 1 - 1e-12);
      if (!wall) EXPECT_NEAR(diff[i], 0.0, 1e-11);
    }
  }
}

TEST(Operators, WeakVorticityConverges) {
  auto psi = [](const Vec2& x) { return std::sin(2 * kPi * x.x()) * std::sin(2 * kPi * x.y()); };
  auto vel = [](const Vec2& x) {
    return Vec2(2 * kPi * std::sin(2 * kPi * x.x()) * std::cos(2 * kPi * x.y()),
                -2 * kPi * std::cos(2 * kPi * x.x()) * std::sin(2 * kPi * x.y()));
  };
  auto omega = [&](const Vec2& x) { return -8 * kPi * kPi * psi(x); };
  for (int r : {1, 2}) {
    double prev = 0.0;
    for (int n : {16, 32}) {
      const auto mesh = make_mesh(n, true);
      const auto v0 = build_space(mesh, Family::CG, r + 1);
      const auto v1 = build_space(mesh, Family::BDM, r);
      const Field w = WeakVorticity(v0, v1)(interpolate(VectorFunction(vel), v1));
      const double err = l2_error(w, ScalarFunction(omega), 12);
      if (prev > 0.0) EXPECT_GE(std::log2(prev / err), r - 0.1) << "r=" << r << " n=" << n;
      prev = err;
    }
  }
}

TEST(Operators, PoissonExamples) {
  const auto mesh = make_mesh(4, true);
  const auto v0 = build_space(mesh, Family::CG, 2);
  const auto vpsi = build_space(mesh, Family::CG, 2, {true, false});
  const PoissonSolver poisson(vpsi, v0);
  EXPECT_LT(max_abs(poisson(Field(v0)).coeffs), 1e-14);
  std::mt19937 rng(5);
  const Field psi = poisson(random_field(v0, rng));
  EXPECT_NEAR(integrate(psi), 0.0, 1e-12);
}

TEST(Operators, PoissonConverges) {
  auto psi = [](const Vec2& x) { return std::sin(2 * kPi * x.x()) * std::sin(2 * kPi * x.y()); };
  auto omega = [&](const Vec2& x) { return -8 * kPi * kPi * psi(x); };
  for (int r : {1, 2}) {
    double prev = 0.0;
    for (int n : {8, 16, 32}) {
      const auto mesh = make_mesh(n, true);
      const auto v0 = build_space(mesh, Family::CG, r + 1);
      const auto vpsi = build_space(mesh, Family::CG, r + 1, {true, false});
      const Field p = PoissonSolver(vpsi, v0)(interpolate(ScalarFunction(omega), v0));
      const double err = l2_error(p, ScalarFunction(psi), 12);
      if (prev > 0.0) EXPECT_GE(std::log2(prev / err), r + 2 - 0.25) << "r=" << r << " n=" << n;
      prev = err;
    }
  }
}

// ---------------------------------------------------------------------------
// Velocity advection

class VelocityForms : public ::testing::TestWithParam<std::tuple<AdvectionForm, int, bool>> {};

TEST_P(VelocityForms, MatchOracle) {
  const auto [form, r, periodic] = GetParam();
  std::mt19937 rng(10 + r);
  const auto mesh = make_mesh(2, periodic);
  const auto v1 = build_space(mesh, Family::BDM, r);
  UpwindRule rule;
  rule.alpha = 0.7;
  const VelocityAdvection adv(v1, form, rule);
  const Field w = random_field(v1, rng);
  const Field u = random_field(v1, rng);
  const auto parts = adv.parts(w.coeffs, u.coeffs);
  const auto [oa, os] = oracle::dense_velocity_parts(v1, form, rule, w, u, w);
  EXPECT_LT(max_abs(parts.a - oa), 1e-12 * std::max(1.0, max_abs(oa)));
  EXPECT_LT(max_abs(parts.s - os), 1e-12 * std::max(1.0, max_abs(os)));
  // the same forms with every edge orientation reversed
  const auto [fa, fs] = oracle::dense_velocity_parts(v1, form, rule, w, u, w, true);
  EXPECT_LT(max_abs(fa - oa), 1e-12 * std::max(1.0, max_abs(oa)));
  EXPECT_LT(max_abs(fs - os), 1e-12 * std::max(1.0, max_abs(os)));
}

TEST(Operators, ConstantVelocityHasNoResidual) {
  for (AdvectionForm form : {AdvectionForm::Flux, AdvectionForm::Lie}) {
    for (int r : {1, 2}) {
      const auto v1 = build_space(make_mesh(3, true), Family::BDM, r);
      const VelocityAdvection adv(v1, form, {});
      const Field c = interpolate(VectorFunction([](const Vec2&) { return Vec2(0.8, -0.3); }), v1);
      EXPECT_LT(max_abs(adv.residual(c.coeffs)), 1e-13);
    }
  }
}

TEST_P(VelocityForms, JacobianMatchesFiniteDifferences) {
  const auto [form, r, periodic] = GetParam();
  std::mt19937 rng(20 + r);
  const auto v1 = build_space(make_mesh(2, periodic), Family::BDM, r);
  const VelocityAdvection adv(v1, form, {});
  const Eigen::VectorXd w = random_vector(v1->dim(), rng);
  MatrixAssembler asm_(v1->dim(), v1->dim());
  asm_.begin();
  adv.add_jacobian(w, 1.0, asm_);
  const Eigen::MatrixXd j = Eigen::MatrixXd(asm_.finish());
  const Eigen::MatrixXd fd =
      finite_difference_jacobian([&](const Eigen::VectorXd& x) { return adv.residual(x); }, w, 1e-6);
  EXPECT_LT((j - fd).cwiseAbs().maxCoeff(), 1e-6 * std::max(1.0, fd.cwiseAbs().maxCoeff()));
  // second assembly into the recorded pattern gives the same matrix
  asm_.begin();
  adv.add_jacobian(w, 1.0, asm_);
  EXPECT_LT((Eigen::MatrixXd(asm_.finish()) - j).cwiseAbs().maxCoeff(), 1e-14);
}

std::string velocity_form_name(const ::testing::TestParamInfo<VelocityForms::ParamType>& info) {
  const auto [form, r, periodic] = info.param;
  return std::string(form == AdvectionForm::Flux ? "flux" : "lie") + "_r" + std::to_string(r) +
         (periodic ? "_periodic" : "_wall");
}

INSTANTIATE_TEST_SUITE_P(All, VelocityForms,
                         ::testing::Combine(::testing::Values(AdvectionForm::Flux, AdvectionForm::Lie),
                                            ::testing::Values(1, 2), ::testing::Bool()),
                         velocity_form_name);

TEST(Operators, FluxStabilisationIsDissipative) {
  std::mt19937 rng(30);
  for (int r : {1, 2}) {
    const auto v1 = build_space(make_mesh(3, true), Family::BDM, r);
    const VelocityAdvection adv(v1, AdvectionForm::Flux, {});
    for (int trial = 0; trial < 20; ++trial) {
      const Field u = random_field(v1, rng);
      const double s = adv.parts(u.coeffs, u.coeffs).s.dot(u.coeffs);
      EXPECT_GE(s, -1e-13);
    }
  }
}

TEST(Operators, LieFormsAreEnergyNeutral) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> alpha(0.0, 3.0);
  for (bool periodic : {true, false}) {
    for (int r : {1, 2}) {
      const auto v1 = build_space(make_mesh(3, periodic), Family::BDM, r, {false, !periodic});
      for (int trial = 0; trial < 10; ++trial) {
        UpwindRule rule;
        rule.alpha = alpha(rng);
        rule.degenerate_value = alpha(rng) - 1.5;
        const VelocityAdvection adv(v1, AdvectionForm::Lie, rule);
        const Field u = random_field(v1, rng);
        const Field src = random_field(v1, rng);
        const double scale = std::pow(u.coeffs.norm(), 3);
        EXPECT_NEAR(adv.parts(u.coeffs, u.coeffs, &src.coeffs).s.dot(u.coeffs), 0.0, 1e-13 * scale);
        const Field d = random_divergence_free(v1, rng);
        const double ds = std::pow(d.coeffs.norm(), 3);
        EXPECT_NEAR(adv.parts(d.coeffs, d.coeffs).a.dot(d.coeffs), 0.0, 1e-12 * ds);
      }
    }
  }
}

TEST(Operators, UpwindCoefficientBounded) {
  UpwindRule rule;
  rule.alpha = 0.6;
  for (double wn : {-3.0, -1e-300, 0.0, 1e-300, 2.0}) EXPECT_LE(std::abs(upwind_coefficient(wn, rule)), 0.3);
  EXPECT_EQ(upwind_coefficient(0.0, rule), 0.0);
}

// ---------------------------------------------------------------------------
// SUPG

TEST(Operators, SupgMatchesOracle) {
  std::mt19937 rng(40);
  for (int r : {1, 2}) {
    const auto mesh = make_mesh(2, true);
    const auto v0 = build_space(mesh, Family::CG, r + 1);
    const SupgRule rule = make_supg_rule(*mesh, r, 0.9);
    VorticitySource src;
    src.forcing = [](const Vec2& x) { return std::sin(2 * kPi * x.x()) + x.y(); };
    src.inv_tau = 0.05;
    const SupgAdvection supg(v0, v0, rule, src);
    const Field psi = random_field(v0, rng), om = random_field(v0, rng), od = random_field(v0, rng);
    const auto parts = supg.parts(psi.coeffs, om.coeffs, od.coeffs);
    const auto [oa, os] = oracle::dense_supg_parts(v0, psi, om, od, rule, src);
    EXPECT_LT(max_abs(parts.a - oa), 1e-12 * std::max(1.0, max_abs(oa)));
    EXPECT_LT(max_abs(parts.s - os), 1e-12 * std::max(1.0, max_abs(os)));
  }
}

TEST(Operators, SupgVanishesOnStreamFunction) {
  std::mt19937 rng(41);
  for (bool periodic : {true, false}) {
    for (int r : {1, 2}) {
      const auto mesh = make_mesh(3, periodic);
      const auto v0 = build_space(mesh, Family::CG, r + 1);
      const auto vpsi = build_space(mesh, Family::CG, r + 1, {periodic, !periodic});
      const SupgAdvection supg(v0, vpsi, make_supg_rule(*mesh, r, 1.0));
      for (int trial = 0; trial < 5; ++trial) {
        const Field psi = random_field(vpsi, rng);
        const Field om = random_field(v0, rng), od = random_field(v0, rng);
        const Eigen::VectorXd res = supg.residual(psi.coeffs, om.coeffs, od.coeffs);
        const Field psi_full = l2_project(psi, v0);
        const double scale = psi.coeffs.norm() * psi.coeffs.norm() * (om.coeffs.norm() + od.coeffs.norm());
        EXPECT_NEAR(res.dot(psi_full.coeffs), 0.0, 1e-12 * scale);
      }
    }
  }
}

TEST(Operators, SupgReducesToGalerkinWithoutStabilisation) {
  std::mt19937 rng(42);
  const auto mesh = make_mesh(3, true);
  const auto v0 = build_space(mesh, Family::CG, 2);
  const SupgAdvection supg(v0, v0, make_supg_rule(*mesh, 1, 0.0));
  const Field psi = random_field(v0, rng), om = random_field(v0, rng), od = random_field(v0, rng);
  const auto parts = supg.parts(psi.coeffs, om.coeffs, od.coeffs);
  EXPECT_LT(max_abs(parts.s), 1e-15);
  EXPECT_LT(max_abs(parts.a - supg.residual(psi.coeffs, om.coeffs, od.coeffs)), 1e-15);
}

TEST(Operators, SupgConstantVorticityHasNoResidual) {
  std::mt19937 rng(43);
  const auto mesh = make_mesh(3, true);
  const auto v0 = build_space(mesh, Family::CG, 3);
  const SupgAdvection supg(v0, v0, make_supg_rule(*mesh, 2, 1.0));
  const Field psi = random_field(v0, rng);
  const Field om = interpolate(ScalarFunction([](const Vec2&) { return 4.0; }), v0);
  EXPECT_LT(max_abs(supg.residual(psi.coeffs, om.coeffs, Field(v0).coeffs)), 1e-12);
}

TEST(Operators, SupgJacobianMatchesFiniteDifferences) {
  std::mt19937 rng(44);
  for (int r : {1, 2}) {
    const auto mesh = make_mesh(2, true);
    const auto v0 = build_space(mesh, Family::CG, r + 1);
    VorticitySource src;
    src.forcing = [](const Vec2& x) { return std::cos(2 * kPi * x.y()); };
    src.inv_tau = 0.1;
    const SupgAdvection supg(v0, v0, make_supg_rule(*mesh, r, 1.0), src);
    const int n = v0->dim();
    const Eigen::VectorXd psi0 = random_vector(n, rng), om0 = random_vector(n, rng), od0 = random_vector(n, rng);
    // x = [psi; omega], psi = 0.5 x_psi, omega = 0.5 x_omega, omega_dot = 2 x_omega
    auto residual = [&](const Eigen::VectorXd& x) {
      return supg.residual(0.5 * x.head(n), 0.5 * x.tail(n), od0 + 2.0 * x.tail(n));
    };
    Eigen::VectorXd x(2 * n);
    x << psi0, om0;
    MatrixAssembler asm_(n, 2 * n);
    asm_.begin();
    supg.add_jacobian(0.5 * psi0, 0.5 * om0, od0 + 2.0 * om0, 0.5, 0.5, 2.0, asm_, 0, 0, n);
    const Eigen::MatrixXd j = Eigen::MatrixXd(asm_.finish());
    const Eigen::MatrixXd fd = finite_difference_jacobian(residual, x, 1e-6);
    EXPECT_LT((j - fd).cwiseAbs().maxCoeff(), 1e-6 * std::max(1.0, fd.cwiseAbs().maxCoeff()));
  }
}

TEST(Operators, TauExamples) {
  const auto mesh = make_mesh(128, true);
  const SupgRule r1 = make_supg_rule(*mesh, 1, 1.0);
  const SupgRule r2 = make_supg_rule(*mesh, 2, 1.0);
  EXPECT_NEAR(r1.h_T, 1.0 / (128 * std::sqrt(2.0)), 1e-16);
  const auto wall = make_mesh(4, false);
  const auto vw = build_space(wall, Family::CG, 2);
  const Field psi = interpolate(ScalarFunction([](const Vec2& x) { return x.y(); }), vw);
  SupgRule rule = make_supg_rule(*wall, 1, 1.0);
  for (double t : tau_field(psi, rule)) EXPECT_NEAR(t, rule.h_T / 2.0, 1e-14);
  rule.h_T = 1.0 / (128 * std::sqrt(2.0));
  for (double t : tau_field(psi, rule)) EXPECT_NEAR(t, 1.0 / (256 * std::sqrt(2.0)), 1e-15);
  rule.beta = 0.0;
  for (double t : tau_field(psi, rule)) EXPECT_EQ(t, 0.0);
  EXPECT_DOUBLE_EQ(r2.xi, 0.5 * r1.xi);
}

// ---------------------------------------------------------------------------
// Scale splitting

TEST(Operators, ScaleSplitContinuousFieldHasNoSmallScale) {
  const auto v1 = build_space(make_mesh(3, true), Family::BDM, 1);
  const ScaleSplit split(v1);
  const Field u = interpolate(VectorFunction([](const Vec2& x) {
                                return Vec2(std::sin(2 * kPi * x.y()), std::cos(2 * kPi * x.x()));
                              }),
                              split.continuous_space());
  const Field ub = interpolate_field(u, v1);
  const auto res = split(ub);
  EXPECT_LT(max_abs(res.small.coeffs), 1e-12);
}

TEST(Operators, ScaleSplitOrthogonalAndMatchesOracle) {
  std::mt19937 rng(50);
  for (int r : {1, 2}) {
    const auto mesh = make_mesh(2, true);
    const auto v1 = build_space(mesh, Family::BDM, r);
    const ScaleSplit split(v1);
    const Field u = random_field(v1, rng);
    const auto res = split(u);
    const Eigen::MatrixXd m = oracle::dense_mass(v1);
    const double uu = u.coeffs.dot(m * u.coeffs);
    const double ll = res.large.coeffs.dot(m * res.large.coeffs);
    const double ss = res.small.coeffs.dot(m * res.small.coeffs);
    EXPECT_NEAR(res.large.coeffs.dot(m * res.small.coeffs), 0.0, 1e-12 * uu);
    EXPECT_NEAR(uu, ll + ss, 1e-12 * uu);
    // dense normal equations on the continuous space
    const auto vl = split.continuous_space();
    const Eigen::MatrixXd ml = oracle::dense_mass(vl);
    Eigen::MatrixXd mixed = Eigen::MatrixXd::Zero(vl->dim(), v1->dim());
    const Quadrature q = triangle_quadrature(2 * r + 2);
    for (int c = 0; c < mesh->num_cells(); ++c) {
      for (int i = 0; i < vl->dim(); ++i) {
        if (!oracle::touches(*vl, c, i)) continue;
        for (int j = 0; j < v1->dim(); ++j) {
          if (!oracle::touches(*v1, c, j)) continue;
          for (int k = 0; k < q.size(); ++k) {
            const Vec2 a = oracle::eval_vec(oracle::unit(vl, i), c, q.points[k]).v;
            const Vec2 b = oracle::eval_vec(oracle::unit(v1, j), c, q.points[k]).v;
            mixed(i, j) += q.weights[k] * mesh->cell(c).det * a.dot(b);
          }
        }
      }
    }
    const Eigen::VectorXd cl = ml.ldlt().solve(mixed * u.coeffs);
    EXPECT_LT(max_abs(res.continuous.coeffs - cl), 1e-12 * max_abs(cl));
  }
}

TEST(Operators, EnergyTransferPartition) {
  std::mt19937 rng(60);
  for (int r : {1, 2}) {
    const auto v1 = build_space(make_mesh(3, true), Family::BDM, r);
    const ScaleSplit split(v1);
    UpwindRule rule;
    rule.velocity_source = VelocitySource::Continuous;
    for (int trial = 0; trial < 10; ++trial) {
      const Field u = random_field(v1, rng);
      const auto [sl, ss] = energy_transfer_terms(u, rule, split);
      const double scale = std::pow(u.coeffs.norm(), 3);
      EXPECT_NEAR(sl + ss, 0.0, 1e-13 * scale);
      EXPECT_LE(sl, 1e-13 * scale);
      EXPECT_GE(ss, -1e-13 * scale);
    }
    const Field cont = interpolate_field(
        interpolate(VectorFunction([](const Vec2& x) { return Vec2(std::sin(2 * kPi * x.y()), 0.5); }),
                    split.continuous_space()),
        v1);
    const auto [a, b] = energy_transfer_terms(cont, rule, split);
    EXPECT_NEAR(a, 0.0, 1e-13);
    EXPECT_NEAR(b, 0.0, 1e-13);
  }
}
