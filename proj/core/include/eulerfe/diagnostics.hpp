#pragma once

#include <optional>
#include <vector>

#include "eulerfe/fespace.hpp"
#include "eulerfe/fft.hpp"
#include "eulerfe/schemes.hpp"

namespace eulerfe {

// ---------------------------------------------------------------------------
// Scalars

/// Half the squared L2 norm by direct quadrature (vector fields: velocity
/// energy; scalar fields: enstrophy of a vorticity).
double half_square_norm(const Field& field);
/// Half the squared L2 norm of perp-grad psi.
double streamfunction_energy(const Field& psi);
/// tau_h = h / sup |u| over cell quadrature points.
double mesh_time_scale(const Field& u);

// ---------------------------------------------------------------------------
// Lattice sampling

enum class FieldTag { Streamfunction, Vorticity, Jacobian, Other };

struct GridSample {
  int n = 0;
  std::vector<double> values;  // values[i + n * j] at (i / n, j / n)
  FieldTag tag = FieldTag::Other;
};

/// Evaluation of fields of one space at the lattice x_i = i / N of a periodic
/// mesh. Lattice points that coincide with DOF nodes are copied; the rest are
/// evaluated through the basis.
class LatticeSampler {
 public:
  LatticeSampler(SpacePtr space, int n);

  int n() const { return n_; }
  const SpacePtr& space() const { return space_; }
  /// True when every DOF node lies on the lattice, so from_grid is defined.
  bool nodal() const { return nodal_; }

  GridSample sample(const Field& field, FieldTag tag = FieldTag::Other) const;
  /// Nodal interpolation of lattice values back into the space.
  Field from_grid(const GridSample& grid) const;

 private:
  SpacePtr space_;
  int n_;
  bool nodal_ = true;
  std::vector<int> lattice_dof_;           // -1 when not a DOF node
  std::vector<int> dof_lattice_;           // lattice index of each DOF
  std::vector<int> point_cell_;            // fallback evaluation
  std::vector<Vec2> point_ref_;
};

GridSample sample_uniform(const Field& field, int n, FieldTag tag = FieldTag::Other);

// ---------------------------------------------------------------------------
// Spectra

/// Lattice size associated with the stream function DOFs: (r + 1) n.
int lattice_size(int r, int n);
/// floor(N / 3).
int max_retained_wavenumber(int n);

struct TendencySpectrum {
  int n = 0;
  int k_max = 0;
  std::optional<int> k_t;
  std::vector<double> e_dot;  // shells 0..k_max
  std::vector<double> z_dot;
  int sample_count = 1;
};

/// Per-mode tendencies from DFT coefficients:
///   E_dot = Re{psi^* J} / N^4 and Z_dot = -Re{omega^* J} / N^4,
/// so that E_dot and Z_dot are the rates of change of energy and enstrophy
/// under omega_t = -J. Modes are binned into shells round(|k|) <= k_max.
TendencySpectrum tendency_spectra_from_modes(const std::vector<Complex>& psi_hat,
                                             const std::vector<Complex>& omega_hat,
                                             const std::vector<Complex>& j_hat, int n);

TendencySpectrum tendency_spectra(const GridSample& psi, const GridSample& omega, const GridSample& j);

/// Sums of the per-mode tendencies over every mode (no shell cutoff).
struct SpectralTotals {
  double e_dot = 0.0;
  double z_dot = 0.0;
};
SpectralTotals spectral_totals(const std::vector<Complex>& psi_hat, const std::vector<Complex>& omega_hat,
                               const std::vector<Complex>& j_hat, int n);

/// Zeroes every mode with |k| > k_t.
std::vector<Complex> truncate_modes(const std::vector<Complex>& modes, int n, double k_t);
GridSample truncate_spectral(const GridSample& grid, double k_t);

/// Full, truncated and subgrid spectra for one k_T.
struct SubgridSpectra {
  int k_t = 0;
  TendencySpectrum full;
  TendencySpectrum truncated;
  std::vector<double> e_dot_sg;
  std::vector<double> z_dot_sg;
};

/// Applies the tendency pipeline to states of one discretisation on a
/// periodic mesh: sample psi, omega and the numerical Jacobian on the
/// stream function lattice, truncate psi and omega (and omega_dot for SUPG),
/// map them back by nodal interpolation, recompute the Jacobian and take the
/// difference of the spectra.
class TendencyAnalyzer {
 public:
  explicit TendencyAnalyzer(const Discretisation& disc);

  int n() const { return n_; }
  int k_max() const { return max_retained_wavenumber(n_); }

  std::vector<SubgridSpectra> analyze(const SchemeState& state, const std::vector<int>& k_t) const;

  /// Grids of the full pipeline (psi, omega, J).
  struct Grids {
    GridSample psi, omega, j;
  };
  Grids full_grids(const SchemeState& state) const;
  /// State whose psi and omega are the truncations of the given grids.
  SchemeState truncated_state(const SchemeState& state, const Grids& grids, int k_t) const;

 private:
  const Discretisation& disc_;
  int n_;
  LatticeSampler psi_sampler_;
  LatticeSampler omega_sampler_;
  Fft2 fft_;
};

// ---------------------------------------------------------------------------
// Averaging

/// Running mean of equal-length vectors (Welford update) that also keeps the
/// samples for batch-means standard errors.
class SpectrumAverager {
 public:
  void add(const std::vector<double>& values);
  int count() const { return count_; }
  const std::vector<double>& mean() const { return mean_; }
  /// Standard error per entry from `batches` contiguous batch means.
  std::vector<double> standard_error(int batches = 10) const;
  /// Mean recomputed from the stored samples.
  std::vector<double> batch_mean() const;

 private:
  int count_ = 0;
  std::vector<double> mean_;
  std::vector<std::vector<double>> samples_;
};

}  // namespace eulerfe
