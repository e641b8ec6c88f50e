#pragma once

#include <iosfwd>
#include <vector>

#include "config.hpp"
#include "eulerfe/diagnostics.hpp"
#include "eulerfe/manufactured.hpp"
#include "eulerfe/specref.hpp"

namespace eulerfe::app {

/// Vortex initial vorticity used by the turbulence and decay experiments.
double vortex_initial_vorticity(double x, double y);

struct ConvergenceRow {
  Scheme scheme = Scheme::Supg;
  int r = 1;
  int n = 0;
  double h = 0.0;
  double err_u = 0.0;
  double order_u = 0.0;  // NaN on the coarsest mesh
  double err_omega = 0.0;
  double order_omega = 0.0;
};

struct HistoryRow {
  double t = 0.0;
  double energy = 0.0;
  double enstrophy = 0.0;
  double source_work = 0.0;      // forcing and drag work over the last step
  double budget_residual = 0.0;  // energy change minus source work
};

struct DecayResult {
  Scheme scheme = Scheme::LieDerivative;
  std::vector<HistoryRow> history;
};

struct TurbulenceResult {
  Scheme scheme = Scheme::LieDerivative;
  int k_max = 0;
  std::vector<AveragedSubgrid> spectra;
  std::vector<HistoryRow> history;
};

struct TendencyResult {
  Scheme scheme = Scheme::LieDerivative;
  std::vector<SubgridSpectra> spectra;
};

/// Manufactured-solution convergence study on wall meshes. Writes
/// convergence.csv.
std::vector<ConvergenceRow> run_convergence(const RunConfig& config, std::ostream& log);

/// Unforced, undamped evolution from the vortex initial condition. Writes
/// decay.csv.
std::vector<DecayResult> run_decay(const RunConfig& config, std::ostream& log);

/// Forced, damped evolution with time-averaged sub-grid tendency spectra over
/// the window. Writes history_<scheme>.csv, spectra_<scheme>.csv and
/// vorticity snapshots.
std::vector<TurbulenceResult> run_turbulence(const RunConfig& config, std::ostream& log);

/// Instantaneous sub-grid tendency spectra of the state reached at t_end.
/// Writes tendencies_<scheme>.csv.
std::vector<TendencyResult> run_tendencies(const RunConfig& config, std::ostream& log);

/// Pseudo-spectral reference run. Writes specref_spectra.csv.
ReferenceRunResult run_specref(const RunConfig& config, std::ostream& log);

/// Dispatches on config.experiment.
void run_experiment(const RunConfig& config, std::ostream& log);

/// Observed order log(e_coarse / e_fine) / log(h_coarse / h_fine).
double observed_order(double e_coarse, double e_fine, double h_coarse, double h_fine);

}  // namespace eulerfe::app
