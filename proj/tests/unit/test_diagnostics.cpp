#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "dft_oracle.hpp"
#include "eulerfe/diagnostics.hpp"
#include "test_util.hpp"

using namespace eulerfe;
using eulerfe::testing::make_mesh;
using eulerfe::testing::random_field;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_grid(int n, std::mt19937& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> g(static_cast<size_t>(n) * n);
  for (double& v : g) v = d(rng);
  return g;
}

SchemeConfig config(Scheme s, int r) {
  SchemeConfig c;
  c.scheme = s;
  c.r = r;
  c.dt = 0.01;
  return c;
}

// Low-mode stream function: its lattice samples are band-limited for N >= 8.
double low_mode_psi(const Vec2& p) {
  const double x = p.x(), y = p.y();
  return 0.02 * (std::sin(2 * kPi * x) * std::cos(2 * kPi * y) + 0.5 * std::cos(2 * kPi * (x - y)) +
                 0.3 * std::sin(4 * kPi * y));
}

double low_mode_omega(const Vec2& p) {
  const double x = p.x(), y = p.y();
  const double c = 4 * kPi * kPi;
  return 0.02 * (-2 * c * std::sin(2 * kPi * x) * std::cos(2 * kPi * y) -
                 0.5 * 2 * c * std::cos(2 * kPi * (x - y)) - 0.3 * 4 * c * std::sin(4 * kPi * y));
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(Fft, MatchesDirectTransform) {
  std::mt19937 rng(3);
  for (int n : {4, 6, 7}) {
    const auto g = random_grid(n, rng);
    const Fft2 fft(n);
    const auto fast = fft.forward(g);
    const auto slow = oracle::direct_dft(g, n);
    for (size_t i = 0; i < g.size(); ++i) EXPECT_LT(std::abs(fast[i] - slow[i]), 1e-11);
    const auto back = fft.inverse_real(fast);
    for (size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(back[i], g[i], 1e-13);
  }
}

TEST(Fft, WavenumberLayout) {
  const int n = 64;
  const Fft2 fft(n);
  const auto g = oracle::sample_grid(n, [](double x, double) { return std::sin(32 * kPi * x); });
  const auto m = fft.forward(g);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const bool peak = j == 0 && std::abs(fft.wavenumber(i)) == 16;
      if (peak) {
        EXPECT_NEAR(std::abs(m[i + n * j]), 0.5 * n * n, 1e-9);
      } else {
        EXPECT_LT(std::abs(m[i + n * j]), 1e-9);
      }
    }
  }
  EXPECT_EQ(fft.wavenumber(32), 32);
  EXPECT_EQ(fft.wavenumber(33), -31);
}

TEST(Spectra, ShellSumsMatchDirectOracle) {
  std::mt19937 rng(4);
  const int n = 12;
  const auto psi = random_grid(n, rng), omega = random_grid(n, rng), j = random_grid(n, rng);
  const TendencySpectrum s = tendency_spectra({n, psi}, {n, omega}, {n, j});
  const auto e = oracle::shell_cross(psi, j, n);
  const auto z = oracle::shell_cross(omega, j, n);
  ASSERT_EQ(s.k_max, 4);
  ASSERT_EQ(s.e_dot.size(), e.size());
  for (size_t k = 0; k < e.size(); ++k) {
    EXPECT_NEAR(s.e_dot[k], e[k], 1e-12);
    EXPECT_NEAR(s.z_dot[k], -z[k], 1e-12);
  }
}

TEST(Spectra, ParsevalTotals) {
  std::mt19937 rng(5);
  const int n = 16;
  const Fft2 fft(n);
  const auto psi = random_grid(n, rng), omega = random_grid(n, rng), j = random_grid(n, rng);
  const SpectralTotals t = spectral_totals(fft.forward(psi), fft.forward(omega), fft.forward(j), n);
  EXPECT_NEAR(t.e_dot, oracle::grid_mean_product(psi, j), 1e-12);
  EXPECT_NEAR(t.z_dot, -oracle::grid_mean_product(omega, j), 1e-12);
}

TEST(Spectra, ShellsOfBandLimitedFieldsSumToMean) {
  const int n = 24;
  auto f = [](double x, double y) { return std::cos(2 * kPi * (3 * x + 2 * y)) + 0.5 * std::sin(2 * kPi * 5 * y); };
  auto g = [](double x, double y) { return 2 * std::cos(2 * kPi * (3 * x + 2 * y)) - std::sin(2 * kPi * 5 * y); };
  const auto a = oracle::sample_grid(n, f), b = oracle::sample_grid(n, g);
  const TendencySpectrum s = tendency_spectra({n, a}, {n, a}, {n, b});
  double sum = 0.0;
  for (double v : s.e_dot) sum += v;
  EXPECT_NEAR(sum, oracle::grid_mean_product(a, b), 1e-12);
  EXPECT_NEAR(s.e_dot[4], 1.0, 1e-12);    // |(3, 2)| rounds to 4
  EXPECT_NEAR(s.e_dot[5], -0.25, 1e-12);
}

TEST(Spectra, OrthogonalModesGiveZero) {
  const int n = 16;
  const auto a = oracle::sample_grid(n, [](double x, double) { return std::cos(2 * kPi * 2 * x); });
  const auto b = oracle::sample_grid(n, [](double x, double y) { return std::cos(2 * kPi * (2 * x + y)); });
  const TendencySpectrum s = tendency_spectra({n, a}, {n, a}, {n, b});
  EXPECT_LT(max_abs(s.e_dot), 1e-14);
  EXPECT_LT(max_abs(s.z_dot), 1e-14);
}

TEST(Spectra, RejectsMismatchedGrids) {
  EXPECT_THROW(tendency_spectra({4, std::vector<double>(16)}, {4, std::vector<double>(16)},
                                {6, std::vector<double>(36)}),
               std::invalid_argument);
}

TEST(Truncation, RemovesHighModesAndIsIdempotent) {
  std::mt19937 rng(6);
  const int n = 16;
  const Fft2 fft(n);
  const auto g = random_grid(n, rng);
  for (int kt : {0, 2, 5}) {
    const GridSample once = truncate_spectral({n, g}, kt);
    const GridSample twice = truncate_spectral(once, kt);
    for (size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(once.values[i], twice.values[i], 1e-13);
    const auto m = fft.forward(once.values);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (std::hypot(fft.wavenumber(i), fft.wavenumber(j)) > kt) EXPECT_LT(std::abs(m[i + n * j]), 1e-11);
      }
    }
  }
  const GridSample zero = truncate_spectral({n, g}, 0);
  double mean = 0.0;
  for (double v : g) mean += v / g.size();
  for (double v : zero.values) EXPECT_NEAR(v, mean, 1e-13);
  EXPECT_THROW(truncate_modes(fft.forward(g), n, -1.0), std::invalid_argument);
}

TEST(Truncation, KeepsBandLimitedFields) {
  const int n = 12;
  const auto g = oracle::sample_grid(n, [](double x, double y) { return std::sin(2 * kPi * (x + 3 * y)); });
  const GridSample t = truncate_spectral({n, g}, 4);
  for (size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(t.values[i], g[i], 1e-13);
}

TEST(Lattice, NodalRoundTrip) {
  std::mt19937 rng(7);
  for (int r : {1, 2}) {
    const auto mesh = make_mesh(4, true);
    const SpacePtr cg = build_space(mesh, Family::CG, r + 1);
    const LatticeSampler s(cg, lattice_size(r, 4));
    EXPECT_TRUE(s.nodal());
    EXPECT_EQ(s.n() * s.n(), cg->dim());
    const Field f = random_field(cg, rng);
    const Field back = s.from_grid(s.sample(f));
    EXPECT_LT((back.coeffs - f.coeffs).lpNorm<Eigen::Infinity>(), 1e-15);
  }
}

TEST(Lattice, SamplesMatchPointEvaluation) {
  const auto mesh = make_mesh(3, true);
  const SpacePtr cg = build_space(mesh, Family::CG, 2);
  const Field f = interpolate(ScalarFunction([](const Vec2& x) { return std::sin(2 * kPi * x.x()) + x.y(); }), cg);
  const GridSample g = sample_uniform(f, 5);  // off-node lattice
  for (int j = 0; j < 5; ++j) {
    for (int i = 0; i < 5; ++i) {
      EXPECT_NEAR(g.values[i + 5 * j], evaluate_at(f, Vec2(i / 5.0, j / 5.0))[0], 1e-12);
    }
  }
  EXPECT_FALSE(LatticeSampler(cg, 5).nodal());
  EXPECT_THROW(LatticeSampler(cg, 5).from_grid(g), std::logic_error);
  EXPECT_THROW(LatticeSampler(build_space(make_mesh(3, false), Family::CG, 2), 6), std::invalid_argument);
}

TEST(Scalars, EnergiesAgreeWithMatrixForms) {
  std::mt19937 rng(8);
  const auto mesh = make_mesh(3, true);
  const SpacePtr bdm = build_space(mesh, Family::BDM, 2);
  const Field u = random_field(bdm, rng);
  EXPECT_NEAR(half_square_norm(u), 0.5 * u.coeffs.dot(mass_matrix(*bdm).matrix * u.coeffs), 1e-12);
  const SpacePtr cg = build_space(mesh, Family::CG, 3);
  const Field psi = random_field(cg, rng);
  EXPECT_NEAR(streamfunction_energy(psi), 0.5 * psi.coeffs.dot(stiffness_matrix(*cg).matrix * psi.coeffs), 1e-10);
  EXPECT_NEAR(streamfunction_energy(psi), half_square_norm(curl_of(psi, bdm)), 1e-10);
}

TEST(Scalars, MeshTimeScale) {
  const auto mesh = make_mesh(4, true);
  const Field u = interpolate(VectorFunction([](const Vec2&) { return Vec2(3.0, 4.0); }),
                              build_space(mesh, Family::BDM, 1));
  EXPECT_NEAR(mesh_time_scale(u), 0.25 / 5.0, 1e-13);
  EXPECT_TRUE(std::isinf(mesh_time_scale(Field(u.space))));
}

class JacobianEnergy : public ::testing::TestWithParam<std::tuple<Scheme, int>> {};

TEST_P(JacobianEnergy, GalerkinEnergyTendency) {
  const auto [scheme, r] = GetParam();
  Discretisation d(make_mesh(4, true), config(scheme, r));
  SchemeState st = d.initial_state([](const Vec2& p) {
    return std::sin(2 * kPi * p.x()) * std::cos(4 * kPi * p.y()) + 0.7 * std::cos(2 * kPi * (p.x() - p.y()));
  });
  d.step(st);
  const Field j = d.numerical_jacobian(st);
  const Field psi = l2_project(d.streamfunction(st), d.vorticity_space());
  const double rate = psi.coeffs.dot(d.vorticity_mass().matrix * j.coeffs);
  const double scale = std::abs(d.vorticity(st).coeffs.dot(d.vorticity_mass().matrix * j.coeffs)) + 1e-3;
  if (scheme == Scheme::FluxForm) {
    EXPECT_LE(rate, 1e-10 * scale);
  } else {
    EXPECT_LT(std::abs(rate), 1e-10 * scale);
  }
}

std::string jacobian_energy_name(const ::testing::TestParamInfo<JacobianEnergy::ParamType>& info) {
  return to_string(std::get<0>(info.param)) + "_r" + std::to_string(std::get<1>(info.param));
}

INSTANTIATE_TEST_SUITE_P(All, JacobianEnergy,
                         ::testing::Combine(::testing::Values(Scheme::FluxForm, Scheme::LieDerivative, Scheme::Supg),
                                            ::testing::Values(1, 2)),
                         jacobian_energy_name);

TEST(Analyzer, SubgridVanishesAtCutoffForBandLimitedState) {
  for (Scheme s : {Scheme::LieDerivative, Scheme::FluxForm, Scheme::Supg}) {
    for (int r : {1, 2}) {
      Discretisation d(make_mesh(4, true), config(s, r));
      SchemeState st;
      if (is_velocity_scheme(s)) {
        st = d.initial_state(low_mode_omega, nullptr);
        st.u = curl_of(interpolate(ScalarFunction(low_mode_psi), d.streamfunction_space()), d.velocity_space());
      } else {
        st = d.initial_state(low_mode_omega);
        st.psi = interpolate(ScalarFunction(low_mode_psi), d.streamfunction_space());
        st.omega = interpolate(ScalarFunction(low_mode_omega), d.vorticity_space());
      }
      const TendencyAnalyzer an(d);
      EXPECT_EQ(an.n(), 4 * (r + 1));
      const auto out = an.analyze(st, {an.k_max()});
      const double scale = max_abs(out[0].full.z_dot) + 1e-30;
      EXPECT_LT(max_abs(out[0].z_dot_sg), 1e-10 * scale) << to_string(s) << " r=" << r;
      EXPECT_LT(max_abs(out[0].e_dot_sg), 1e-10 * (max_abs(out[0].full.e_dot) + 1e-30));
      EXPECT_THROW(an.analyze(st, {an.k_max() + 1}), std::invalid_argument);
    }
  }
}

TEST(Analyzer, TruncationToZeroLeavesNoResolvedTransfer) {
  Discretisation d(make_mesh(4, true), config(Scheme::Supg, 1));
  const SchemeState st = d.initial_state(low_mode_omega);
  const TendencyAnalyzer an(d);
  const auto out = an.analyze(st, {0});
  // psi_T is constant, so the truncated Jacobian vanishes.
  EXPECT_LT(max_abs(out[0].truncated.e_dot), 1e-14);
  EXPECT_LT(max_abs(out[0].truncated.z_dot), 1e-14);
  for (size_t k = 0; k < out[0].z_dot_sg.size(); ++k) EXPECT_DOUBLE_EQ(out[0].z_dot_sg[k], out[0].full.z_dot[k]);
}

double steady_jacobian_norm(Scheme s, int r, int n) {
  auto omega = [](const Vec2& p) { return -8 * kPi * kPi * std::sin(2 * kPi * p.x()) * std::sin(2 * kPi * p.y()); };
  auto psi = [](const Vec2& p) { return std::sin(2 * kPi * p.x()) * std::sin(2 * kPi * p.y()); };
  Discretisation d(make_mesh(n, true), config(s, r));
  const ScalarFunction psi0 = psi;
  const SchemeState st = d.initial_state(omega, &psi0);
  const Field j = d.numerical_jacobian(st);
  return std::sqrt(j.coeffs.dot(d.vorticity_mass().matrix * j.coeffs));
}

TEST(Analyzer, SteadyEigenstateJacobianConverges) {
  for (int r : {1, 2}) {
    const double a = steady_jacobian_norm(Scheme::Supg, r, 4), b = steady_jacobian_norm(Scheme::Supg, r, 8),
                 c = steady_jacobian_norm(Scheme::Supg, r, 16);
    EXPECT_GT(a / b, 3.0);
    EXPECT_GT(b / c, 3.0);
  }
  // Velocity schemes: J is the weak vorticity of the momentum tendency and
  // converges one order below it (first order for r = 2).
  const double b = steady_jacobian_norm(Scheme::LieDerivative, 2, 8);
  const double c = steady_jacobian_norm(Scheme::LieDerivative, 2, 16);
  EXPECT_GT(b / c, 1.6);
}

TEST(Averager, MeanAndBatchErrors) {
  SpectrumAverager a;
  std::mt19937 rng(9);
  std::normal_distribution<double> d(1.0, 2.0);
  const int count = 4000;
  for (int i = 0; i < count; ++i) a.add({d(rng), 3.0});
  EXPECT_EQ(a.count(), count);
  const auto bm = a.batch_mean();
  EXPECT_NEAR(a.mean()[0], bm[0], 1e-12);
  EXPECT_NEAR(a.mean()[1], 3.0, 1e-14);
  const auto se = a.standard_error(10);
  EXPECT_NEAR(se[1], 0.0, 1e-14);
  const double expected = 2.0 / std::sqrt(count);
  EXPECT_GT(se[0], 0.4 * expected);
  EXPECT_LT(se[0], 1.8 * expected);
  EXPECT_NEAR(a.mean()[0], 1.0, 5 * expected);
  EXPECT_THROW(a.add({1.0}), std::invalid_argument);
  SpectrumAverager one;
  one.add({1.0});
  EXPECT_TRUE(std::isinf(one.standard_error()[0]));
}
