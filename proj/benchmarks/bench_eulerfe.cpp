#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include <Eigen/SparseLU>

#include "eulerfe/diagnostics.hpp"
#include "eulerfe/fft.hpp"
#include "eulerfe/operators.hpp"
#include "eulerfe/schemes.hpp"
#include "eulerfe/specref.hpp"

using namespace eulerfe;

namespace {

constexpr double kPi = std::numbers::pi;

double vortex(const Vec2& p) {
  const double x = p.x(), y = p.y();
  return std::sin(8 * kPi * x) * std::sin(8 * kPi * y) + 0.4 * std::cos(6 * kPi * x) * std::cos(6 * kPi * y) +
         0.3 * std::cos(10 * kPi * x) * std::cos(4 * kPi * y);
}

std::shared_ptr<const Mesh> mesh(int n) { return std::make_shared<const Mesh>(build_unit_square_mesh(n, true)); }

SchemeConfig config(Scheme s, bool reuse) {
  SchemeConfig c;
  c.scheme = s;
  c.dt = 0.02;
  c.newton.reuse_jacobian = reuse;
  c.drag_tau = 100.0;
  c.vorticity_forcing = [](const Vec2& x, double) { return 0.1 * std::sin(16 * kPi * x.x()); };
  return c;
}

void BM_MassAssembly(benchmark::State& state) {
  const auto v1 = build_space(mesh(static_cast<int>(state.range(0))), Family::BDM, 1);
  for (auto _ : state) benchmark::DoNotOptimize(mass_matrix(*v1));
}
BENCHMARK(BM_MassAssembly)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_VelocityResidual(benchmark::State& state) {
  const auto v1 = build_space(mesh(static_cast<int>(state.range(0))), Family::BDM, 1);
  const VelocityAdvection adv(v1, AdvectionForm::Lie, {});
  const Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(v1->dim(), -1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(adv.residual(u));
}
BENCHMARK(BM_VelocityResidual)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SupgResidual(benchmark::State& state) {
  const auto m = mesh(static_cast<int>(state.range(0)));
  const auto v0 = build_space(m, Family::CG, 2);
  const auto vpsi = build_space(m, Family::CG, 2, {true, false});
  const SupgAdvection supg(v0, vpsi, make_supg_rule(*m, 1, 1.0));
  const Eigen::VectorXd psi = Eigen::VectorXd::LinSpaced(vpsi->dim(), -1.0, 1.0);
  const Eigen::VectorXd om = Eigen::VectorXd::LinSpaced(v0->dim(), 1.0, -1.0);
  for (auto _ : state) benchmark::DoNotOptimize(supg.residual(psi, om, om));
}
BENCHMARK(BM_SupgResidual)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

SparseMatrix velocity_jacobian(int n) {
  const auto v1 = build_space(mesh(n), Family::BDM, 1);
  const VelocityAdvection adv(v1, AdvectionForm::Lie, {});
  const Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(v1->dim(), -1.0, 1.0);
  MatrixAssembler a(v1->dim(), v1->dim());
  a.begin();
  adv.add_jacobian(u, 0.01, a);
  SparseMatrix j = a.finish();
  j += mass_matrix(*v1).matrix;
  return j;
}

void BM_FactorizeLinearSolver(benchmark::State& state) {
  const SparseMatrix j = velocity_jacobian(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    LinearSolver s;
    s.factorize(j);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_FactorizeLinearSolver)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_FactorizeEigenSparseLU(benchmark::State& state) {
  SparseMatrix j = velocity_jacobian(static_cast<int>(state.range(0)));
  j.makeCompressed();
  for (auto _ : state) {
    Eigen::SparseLU<SparseMatrix> s;
    s.compute(j);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_FactorizeEigenSparseLU)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SchemeStep(benchmark::State& state) {
  const Scheme s = static_cast<Scheme>(state.range(0));
  Discretisation d(mesh(32), config(s, state.range(1) != 0));
  SchemeState st = d.initial_state(vortex);
  d.step(st);
  for (auto _ : state) d.step(st);
  state.SetLabel(to_string(s) + (state.range(1) ? " reuse" : " full newton"));
}
BENCHMARK(BM_SchemeStep)
    ->Args({static_cast<int>(Scheme::LieDerivative), 1})
    ->Args({static_cast<int>(Scheme::FluxForm), 1})
    ->Args({static_cast<int>(Scheme::Supg), 1})
    ->Args({static_cast<int>(Scheme::Supg), 0})
    ->Unit(benchmark::kMillisecond);

void BM_TendencyAnalysis(benchmark::State& state) {
  const Scheme s = static_cast<Scheme>(state.range(0));
  Discretisation d(mesh(32), config(s, true));
  const SchemeState st = d.initial_state(vortex);
  const TendencyAnalyzer a(d);
  for (auto _ : state) benchmark::DoNotOptimize(a.analyze(st, {10}));
  state.SetLabel(to_string(s));
}
BENCHMARK(BM_TendencyAnalysis)
    ->Arg(static_cast<int>(Scheme::LieDerivative))
    ->Arg(static_cast<int>(Scheme::Supg))
    ->Unit(benchmark::kMillisecond);

void BM_Fft(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Fft2 fft(n);
  std::vector<double> g(static_cast<size_t>(n) * n);
  for (size_t i = 0; i < g.size(); ++i) g[i] = std::sin(0.1 * i);
  for (auto _ : state) benchmark::DoNotOptimize(fft.forward(g));
}
BENCHMARK(BM_Fft)->Arg(64)->Arg(128)->Arg(256);

void BM_SpectralStep(benchmark::State& state) {
  SpectralConfig c;
  c.n = static_cast<int>(state.range(0));
  c.drag_tau = 100.0;
  c.forcing = [](double x, double) { return 0.1 * std::sin(32 * kPi * x); };
  const SpectralSolver s(c);
  SpectralState st = s.state_from_function([](double x, double y) { return vortex(Vec2(x, y)); });
  for (auto _ : state) s.step(st, 0.01);
}
BENCHMARK(BM_SpectralStep)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
