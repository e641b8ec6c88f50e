#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "eulerfe/diagnostics.hpp"
#include "eulerfe/fft.hpp"

namespace eulerfe {

class BlowUp : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pseudo-spectral vorticity state on an N x N lattice of the unit torus.
/// omega_hat is the unnormalized DFT of the lattice values; modes with
/// |k| > N / 3 are kept at zero.
struct SpectralState {
  int n = 0;
  double t = 0.0;
  std::vector<Complex> omega_hat;
};

struct SpectralConfig {
  int n = 64;
  /// Forcing f(x, y); empty for none.
  std::function<double(double, double)> forcing;
  /// Ekman drag time scale; <= 0 disables drag.
  double drag_tau = 0.0;
  double cfl = 0.2;
  double dt_max = 0.05;
};

/// omega_t + J = f - omega / tau with J = perp-grad psi . grad omega and
/// laplacian psi = omega, advanced with classical RK4 and 2/3-rule dealiasing.
class SpectralSolver {
 public:
  explicit SpectralSolver(SpectralConfig config);

  int n() const { return n_; }
  const Fft2& fft() const { return fft_; }
  const SpectralConfig& config() const { return config_; }

  SpectralState state_from_grid(const std::vector<double>& omega) const;
  SpectralState state_from_function(const std::function<double(double, double)>& omega) const;

  std::vector<Complex> streamfunction(const std::vector<Complex>& omega_hat) const;
  /// Dealiased Jacobian perp-grad psi . grad omega in spectral space.
  std::vector<Complex> jacobian(const std::vector<Complex>& psi_hat, const std::vector<Complex>& omega_hat) const;
  std::vector<Complex> dealias(std::vector<Complex> modes) const;

  /// Right-hand side -J + f - omega / tau.
  std::vector<Complex> tendency(const std::vector<Complex>& omega_hat) const;
  /// One RK4 step. Throws BlowUp on non-finite values.
  void step(SpectralState& state, double dt) const;
  /// cfl * dx / max |u|, capped at dt_max.
  double stable_dt(const SpectralState& state) const;
  double max_speed(const SpectralState& state) const;

  double energy(const SpectralState& state) const;
  double enstrophy(const SpectralState& state) const;
  std::vector<double> vorticity_grid(const SpectralState& state) const;

 private:
  SpectralConfig config_;
  int n_;
  Fft2 fft_;
  std::vector<double> kx_, ky_, k2_;
  std::vector<bool> keep_;
  std::vector<Complex> forcing_hat_;
};

/// Spectra accumulated by the reference run for one k_T.
struct AveragedSubgrid {
  int k_t = 0;
  SpectrumAverager e_dot, z_dot, e_dot_t, z_dot_t, e_dot_sg, z_dot_sg;
};

struct ReferenceRunConfig {
  SpectralConfig solver;
  std::function<double(double, double)> initial_vorticity;
  std::vector<int> k_t;
  double t_spinup = 50.0;
  double t_average = 20.0;
  int sample_every = 1;
};

struct ReferenceRunResult {
  std::vector<AveragedSubgrid> spectra;
  int k_max = 0;
  int steps = 0;
  double final_energy = 0.0;
  double final_enstrophy = 0.0;
};

/// Full and truncated spectral tendencies of the current state for one k_T.
SubgridSpectra spectral_subgrid(const SpectralSolver& solver, const SpectralState& state, int k_t);

/// Spins up, then averages the subgrid tendency spectra over the window.
ReferenceRunResult reference_tendency_run(const ReferenceRunConfig& config);

}  // namespace eulerfe
