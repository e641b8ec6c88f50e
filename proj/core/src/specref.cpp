#include "eulerfe/specref.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace eulerfe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool finite(const std::vector<Complex>& v) {
  for (const Complex& c : v) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

}  // namespace

SpectralSolver::SpectralSolver(SpectralConfig config) : config_(std::move(config)), n_(config_.n), fft_(n_) {
  const size_t count = static_cast<size_t>(n_) * n_;
  kx_.resize(count);
  ky_.resize(count);
  k2_.resize(count);
  keep_.resize(count);
  const double k_max = max_retained_wavenumber(n_);
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i < n_; ++i) {
      const size_t idx = static_cast<size_t>(i) + static_cast<size_t>(n_) * j;
      const double kx = fft_.wavenumber(i);
      const double ky = fft_.wavenumber(j);
      kx_[idx] = kTwoPi * kx;
      ky_[idx] = kTwoPi * ky;
      k2_[idx] = kx_[idx] * kx_[idx] + ky_[idx] * ky_[idx];
      keep_[idx] = std::sqrt(kx * kx + ky * ky) <= k_max;
    }
  }
  forcing_hat_.assign(count, 0.0);
  if (config_.forcing) {
    std::vector<double> f(count);
    for (int j = 0; j < n_; ++j) {
      for (int i = 0; i < n_; ++i) f[i + static_cast<size_t>(n_) * j] = config_.forcing(double(i) / n_, double(j) / n_);
    }
    forcing_hat_ = dealias(fft_.forward(f));
  }
}

std::vector<Complex> SpectralSolver::dealias(std::vector<Complex> modes) const {
  for (size_t k = 0; k < modes.size(); ++k) {
    if (!keep_[k]) modes[k] = 0.0;
  }
  return modes;
}

SpectralState SpectralSolver::state_from_grid(const std::vector<double>& omega) const {
  SpectralState s;
  s.n = n_;
  s.omega_hat = dealias(fft_.forward(omega));
  return s;
}

SpectralState SpectralSolver::state_from_function(const std::function<double(double, double)>& omega) const {
  std::vector<double> g(static_cast<size_t>(n_) * n_);
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i < n_; ++i) g[i + static_cast<size_t>(n_) * j] = omega(double(i) / n_, double(j) / n_);
  }
  return state_from_grid(g);
}

std::vector<Complex> SpectralSolver::streamfunction(const std::vector<Complex>& omega_hat) const {
  std::vector<Complex> psi(omega_hat.size());
  for (size_t k = 0; k < psi.size(); ++k) psi[k] = k2_[k] > 0.0 ? -omega_hat[k] / k2_[k] : Complex(0.0);
  return psi;
}

std::vector<Complex> SpectralSolver::jacobian(const std::vector<Complex>& psi_hat,
                                              const std::vector<Complex>& omega_hat) const {
  const size_t count = psi_hat.size();
  const Complex i1(0.0, 1.0);
  std::vector<Complex> psx(count), psy(count), omx(count), omy(count);
  for (size_t k = 0; k < count; ++k) {
    const Complex p = keep_[k] ? psi_hat[k] : Complex(0.0);
    const Complex w = keep_[k] ? omega_hat[k] : Complex(0.0);
    psx[k] = i1 * kx_[k] * p;
    psy[k] = i1 * ky_[k] * p;
    omx[k] = i1 * kx_[k] * w;
    omy[k] = i1 * ky_[k] * w;
  }
  const std::vector<double> px = fft_.inverse_real(psx);
  const std::vector<double> py = fft_.inverse_real(psy);
  const std::vector<double> wx = fft_.inverse_real(omx);
  const std::vector<double> wy = fft_.inverse_real(omy);
  std::vector<double> j(count);
  for (size_t k = 0; k < count; ++k) j[k] = py[k] * wx[k] - px[k] * wy[k];
  return dealias(fft_.forward(j));
}

std::vector<Complex> SpectralSolver::tendency(const std::vector<Complex>& omega_hat) const {
  std::vector<Complex> rhs = jacobian(streamfunction(omega_hat), omega_hat);
  const double inv_tau = config_.drag_tau > 0.0 ? 1.0 / config_.drag_tau : 0.0;
  for (size_t k = 0; k < rhs.size(); ++k) rhs[k] = -rhs[k] + forcing_hat_[k] - inv_tau * omega_hat[k];
  return rhs;
}

void SpectralSolver::step(SpectralState& state, double dt) const {
  const std::vector<Complex>& w0 = state.omega_hat;
  const size_t count = w0.size();
  auto axpy = [&](const std::vector<Complex>& k, double a) {
    std::vector<Complex> w(count);
    for (size_t i = 0; i < count; ++i) w[i] = w0[i] + a * k[i];
    return w;
  };
  const std::vector<Complex> k1 = tendency(w0);
  const std::vector<Complex> k2 = tendency(axpy(k1, 0.5 * dt));
  const std::vector<Complex> k3 = tendency(axpy(k2, 0.5 * dt));
  const std::vector<Complex> k4 = tendency(axpy(k3, dt));
  std::vector<Complex> w(count);
  for (size_t i = 0; i < count; ++i) w[i] = w0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  if (!finite(w)) throw BlowUp("spectral solver produced non-finite values at t = " + std::to_string(state.t));
  state.omega_hat = dealias(std::move(w));
  state.t += dt;
}

double SpectralSolver::max_speed(const SpectralState& state) const {
  const std::vector<Complex> psi = streamfunction(state.omega_hat);
  const size_t count = psi.size();
  const Complex i1(0.0, 1.0);
  std::vector<Complex> ux(count), uy(count);
  for (size_t k = 0; k < count; ++k) {
    ux[k] = i1 * ky_[k] * psi[k];
    uy[k] = -i1 * kx_[k] * psi[k];
  }
  const std::vector<double> a = fft_.inverse_real(ux);
  const std::vector<double> b = fft_.inverse_real(uy);
  double m = 0.0;
  for (size_t k = 0; k < count; ++k) m = std::max(m, std::hypot(a[k], b[k]));
  return m;
}

double SpectralSolver::stable_dt(const SpectralState& state) const {
  const double u = max_speed(state);
  const double dt = u > 0.0 ? config_.cfl / (n_ * u) : config_.dt_max;
  return std::min(dt, config_.dt_max);
}

double SpectralSolver::energy(const SpectralState& state) const {
  const double scale = 1.0 / (static_cast<double>(n_) * n_ * n_ * n_);
  double e = 0.0;
  for (size_t k = 0; k < state.omega_hat.size(); ++k) {
    if (k2_[k] > 0.0) e += std::norm(state.omega_hat[k]) / k2_[k];
  }
  return 0.5 * scale * e;
}

double SpectralSolver::enstrophy(const SpectralState& state) const {
  const double scale = 1.0 / (static_cast<double>(n_) * n_ * n_ * n_);
  double z = 0.0;
  for (const Complex& c : state.omega_hat) z += std::norm(c);
  return 0.5 * scale * z;
}

std::vector<double> SpectralSolver::vorticity_grid(const SpectralState& state) const {
  return fft_.inverse_real(state.omega_hat);
}

SubgridSpectra spectral_subgrid(const SpectralSolver& solver, const SpectralState& state, int k_t) {
  const int n = solver.n();
  if (k_t < 0 || k_t > max_retained_wavenumber(n)) throw std::invalid_argument("spectral_subgrid: k_T outside [0, k_max]");
  const std::vector<Complex> psi = solver.streamfunction(state.omega_hat);
  const std::vector<Complex> j = solver.jacobian(psi, state.omega_hat);
  const std::vector<Complex> psi_t = truncate_modes(psi, n, k_t);
  const std::vector<Complex> omega_t = truncate_modes(state.omega_hat, n, k_t);
  const std::vector<Complex> j_t = solver.jacobian(psi_t, omega_t);
  SubgridSpectra r;
  r.k_t = k_t;
  r.full = tendency_spectra_from_modes(psi, state.omega_hat, j, n);
  r.truncated = tendency_spectra_from_modes(psi_t, omega_t, j_t, n);
  r.full.k_t = r.truncated.k_t = k_t;
  r.e_dot_sg.resize(r.full.e_dot.size());
  r.z_dot_sg.resize(r.full.z_dot.size());
  for (size_t k = 0; k < r.e_dot_sg.size(); ++k) {
    r.e_dot_sg[k] = r.full.e_dot[k] - r.truncated.e_dot[k];
    r.z_dot_sg[k] = r.full.z_dot[k] - r.truncated.z_dot[k];
  }
  return r;
}

ReferenceRunResult reference_tendency_run(const ReferenceRunConfig& config) {
  const SpectralSolver solver(config.solver);
  SpectralState state = solver.state_from_function(config.initial_vorticity);
  ReferenceRunResult result;
  result.k_max = max_retained_wavenumber(solver.n());
  for (const int kt : config.k_t) {
    if (kt < 0 || kt > result.k_max) throw std::invalid_argument("reference_tendency_run: k_T outside [0, k_max]");
    AveragedSubgrid a;
    a.k_t = kt;
    result.spectra.push_back(std::move(a));
  }
  const double t_end = config.t_spinup + config.t_average;
  int since_sample = 0;
  while (state.t < t_end - 1e-12) {
    const double dt = std::min(solver.stable_dt(state), t_end - state.t);
    solver.step(state, dt);
    ++result.steps;
    if (state.t < config.t_spinup) continue;
    if (++since_sample < config.sample_every) continue;
    since_sample = 0;
    for (AveragedSubgrid& a : result.spectra) {
      const SubgridSpectra s = spectral_subgrid(solver, state, a.k_t);
      a.e_dot.add(s.full.e_dot);
      a.z_dot.add(s.full.z_dot);
      a.e_dot_t.add(s.truncated.e_dot);
      a.z_dot_t.add(s.truncated.z_dot);
      a.e_dot_sg.add(s.e_dot_sg);
      a.z_dot_sg.add(s.z_dot_sg);
    }
  }
  result.final_energy = solver.energy(state);
  result.final_enstrophy = solver.enstrophy(state);
  return result;
}

}  // namespace eulerfe
