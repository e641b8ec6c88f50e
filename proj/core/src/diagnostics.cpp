#include "eulerfe/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eulerfe {

double half_square_norm(const Field& field) {
  const FunctionSpace& s = *field.space;
  const Mesh& mesh = s.mesh();
  const Quadrature rule = triangle_quadrature(cell_rule_degree(s));
  FEValues fv(s, rule.points);
  const int vs = s.value_size();
  double total = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    fv.reinit(c);
    const auto dofs = s.cell_dofs(c);
    const double det = mesh.cell(c).det;
    for (int q = 0; q < rule.size(); ++q) {
      for (int comp = 0; comp < vs; ++comp) {
        double v = 0.0;
        for (int i = 0; i < s.local_dim(); ++i) {
          if (dofs[i] >= 0) v += field.coeffs[dofs[i]] * fv.value(q, i, comp);
        }
        total += rule.weights[q] * det * v * v;
      }
    }
  }
  return 0.5 * total;
}

double streamfunction_energy(const Field& psi) {
  const FunctionSpace& s = *psi.space;
  if (s.value_size() != 1) throw std::invalid_argument("streamfunction_energy: scalar space required");
  const Mesh& mesh = s.mesh();
  const Quadrature rule = triangle_quadrature(cell_rule_degree(s));
  FEValues fv(s, rule.points);
  double total = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    fv.reinit(c);
    const auto dofs = s.cell_dofs(c);
    const double det = mesh.cell(c).det;
    for (int q = 0; q < rule.size(); ++q) {
      double gx = 0.0;
      double gy = 0.0;
      for (int i = 0; i < s.local_dim(); ++i) {
        if (dofs[i] < 0) continue;
        gx += psi.coeffs[dofs[i]] * fv.grad(q, i, 0, 0);
        gy += psi.coeffs[dofs[i]] * fv.grad(q, i, 0, 1);
      }
      total += rule.weights[q] * det * (gx * gx + gy * gy);
    }
  }
  return 0.5 * total;
}

double mesh_time_scale(const Field& u) {
  const FunctionSpace& s = *u.space;
  if (s.value_size() != 2) throw std::invalid_argument("mesh_time_scale: vector field required");
  const Mesh& mesh = s.mesh();
  const Quadrature rule = triangle_quadrature(cell_rule_degree(s));
  FEValues fv(s, rule.points);
  double umax = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    fv.reinit(c);
    const auto dofs = s.cell_dofs(c);
    for (int q = 0; q < rule.size(); ++q) {
      double ux = 0.0;
      double uy = 0.0;
      for (int i = 0; i < s.local_dim(); ++i) {
        if (dofs[i] < 0) continue;
        ux += u.coeffs[dofs[i]] * fv.value(q, i, 0);
        uy += u.coeffs[dofs[i]] * fv.value(q, i, 1);
      }
      umax = std::max(umax, std::hypot(ux, uy));
    }
  }
  return umax > 0.0 ? mesh.h() / umax : std::numeric_limits<double>::infinity();
}

LatticeSampler::LatticeSampler(SpacePtr space, int n) : space_(std::move(space)), n_(n) {
  if (n < 2) throw std::invalid_argument("LatticeSampler: N must be at least 2");
  if (!space_->mesh().periodic()) throw std::invalid_argument("LatticeSampler: periodic mesh required");
  const size_t count = static_cast<size_t>(n) * n;
  lattice_dof_.assign(count, -1);
  const Family fam = space_->family();
  if (fam == Family::CG) {
    const auto& pts = space_->dof_points();
    dof_lattice_.assign(pts.size(), -1);
    for (size_t d = 0; d < pts.size(); ++d) {
      const double fx = pts[d].x() * n;
      const double fy = pts[d].y() * n;
      const long ix = std::lround(fx);
      const long iy = std::lround(fy);
      if (std::abs(fx - ix) > 1e-9 || std::abs(fy - iy) > 1e-9) {
        nodal_ = false;
        continue;
      }
      const int idx = static_cast<int>((ix % n) + n * (iy % n));
      lattice_dof_[idx] = static_cast<int>(d);
      dof_lattice_[d] = idx;
    }
  } else {
    nodal_ = false;
  }
  point_cell_.assign(count, -1);
  point_ref_.assign(count, Vec2::Zero());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int idx = i + n * j;
      if (lattice_dof_[idx] >= 0) continue;
      const auto [cell, xref] = space_->mesh().locate(Vec2(double(i) / n, double(j) / n));
      point_cell_[idx] = cell;
      point_ref_[idx] = xref;
    }
  }
}

GridSample LatticeSampler::sample(const Field& field, FieldTag tag) const {
  if (field.space.get() != space_.get() && field.space->dim() != space_->dim()) {
    throw std::invalid_argument("LatticeSampler: field belongs to another space");
  }
  if (space_->value_size() != 1) throw std::invalid_argument("LatticeSampler: scalar field required");
  GridSample g;
  g.n = n_;
  g.tag = tag;
  g.values.assign(static_cast<size_t>(n_) * n_, 0.0);
  for (size_t idx = 0; idx < g.values.size(); ++idx) {
    if (lattice_dof_[idx] >= 0) {
      g.values[idx] = field.coeffs[lattice_dof_[idx]];
    } else {
      g.values[idx] = evaluate(field, point_cell_[idx], std::span<const Vec2>(&point_ref_[idx], 1))[0];
    }
  }
  return g;
}

Field LatticeSampler::from_grid(const GridSample& grid) const {
  if (!nodal_) throw std::logic_error("LatticeSampler: DOF nodes are not all on the lattice");
  if (grid.n != n_) throw std::invalid_argument("LatticeSampler: lattice size mismatch");
  Field f(space_);
  for (size_t d = 0; d < dof_lattice_.size(); ++d) f.coeffs[static_cast<Eigen::Index>(d)] = grid.values[dof_lattice_[d]];
  return f;
}

GridSample sample_uniform(const Field& field, int n, FieldTag tag) {
  return LatticeSampler(field.space, n).sample(field, tag);
}

int lattice_size(int r, int n) { return (r + 1) * n; }

int max_retained_wavenumber(int n) { return n / 3; }

namespace {

void check_sizes(const std::vector<Complex>& a, const std::vector<Complex>& b, const std::vector<Complex>& c, int n) {
  const size_t count = static_cast<size_t>(n) * n;
  if (a.size() != count || b.size() != count || c.size() != count) {
    throw std::invalid_argument("tendency spectra: mismatched lattice sizes");
  }
}

int signed_index(int i, int n) { return i <= n / 2 ? i : i - n; }

}  // namespace

TendencySpectrum tendency_spectra_from_modes(const std::vector<Complex>& psi_hat,
                                             const std::vector<Complex>& omega_hat,
                                             const std::vector<Complex>& j_hat, int n) {
  check_sizes(psi_hat, omega_hat, j_hat, n);
  TendencySpectrum s;
  s.n = n;
  s.k_max = max_retained_wavenumber(n);
  s.e_dot.assign(s.k_max + 1, 0.0);
  s.z_dot.assign(s.k_max + 1, 0.0);
  const double scale = 1.0 / (static_cast<double>(n) * n * n * n);
  for (int j = 0; j < n; ++j) {
    const int ky = signed_index(j, n);
    for (int i = 0; i < n; ++i) {
      const int kx = signed_index(i, n);
      const double k = std::sqrt(double(kx * kx + ky * ky));
      if (k > s.k_max) continue;
      const int shell = static_cast<int>(std::lround(k));
      const size_t idx = static_cast<size_t>(i) + static_cast<size_t>(n) * j;
      s.e_dot[shell] += scale * (std::conj(psi_hat[idx]) * j_hat[idx]).real();
      s.z_dot[shell] -= scale * (std::conj(omega_hat[idx]) * j_hat[idx]).real();
    }
  }
  return s;
}

TendencySpectrum tendency_spectra(const GridSample& psi, const GridSample& omega, const GridSample& j) {
  if (psi.n != omega.n || psi.n != j.n) throw std::invalid_argument("tendency_spectra: mismatched N");
  const Fft2 fft(psi.n);
  return tendency_spectra_from_modes(fft.forward(psi.values), fft.forward(omega.values), fft.forward(j.values),
                                     psi.n);
}

SpectralTotals spectral_totals(const std::vector<Complex>& psi_hat, const std::vector<Complex>& omega_hat,
                               const std::vector<Complex>& j_hat, int n) {
  check_sizes(psi_hat, omega_hat, j_hat, n);
  const double scale = 1.0 / (static_cast<double>(n) * n * n * n);
  SpectralTotals t;
  for (size_t k = 0; k < psi_hat.size(); ++k) {
    t.e_dot += scale * (std::conj(psi_hat[k]) * j_hat[k]).real();
    t.z_dot -= scale * (std::conj(omega_hat[k]) * j_hat[k]).real();
  }
  return t;
}

std::vector<Complex> truncate_modes(const std::vector<Complex>& modes, int n, double k_t) {
  if (k_t < 0.0) throw std::invalid_argument("truncate_modes: k_T must be non-negative");
  std::vector<Complex> out(modes);
  for (int j = 0; j < n; ++j) {
    const int ky = signed_index(j, n);
    for (int i = 0; i < n; ++i) {
      const int kx = signed_index(i, n);
      if (std::sqrt(double(kx * kx + ky * ky)) > k_t) out[static_cast<size_t>(i) + static_cast<size_t>(n) * j] = 0.0;
    }
  }
  return out;
}

GridSample truncate_spectral(const GridSample& grid, double k_t) {
  const Fft2 fft(grid.n);
  GridSample out = grid;
  out.values = fft.inverse_real(truncate_modes(fft.forward(grid.values), grid.n, k_t));
  return out;
}

TendencyAnalyzer::TendencyAnalyzer(const Discretisation& disc)
    : disc_(disc),
      n_(lattice_size(disc.config().r, disc.mesh().n())),
      psi_sampler_(disc.streamfunction_space(), n_),
      omega_sampler_(disc.vorticity_space(), n_),
      fft_(n_) {
  if (!psi_sampler_.nodal() || !omega_sampler_.nodal()) {
    throw std::logic_error("TendencyAnalyzer: stream function nodes do not form the lattice");
  }
}

TendencyAnalyzer::Grids TendencyAnalyzer::full_grids(const SchemeState& state) const {
  Grids g;
  g.psi = psi_sampler_.sample(disc_.streamfunction(state), FieldTag::Streamfunction);
  g.omega = omega_sampler_.sample(disc_.vorticity(state), FieldTag::Vorticity);
  g.j = omega_sampler_.sample(disc_.numerical_jacobian(state), FieldTag::Jacobian);
  return g;
}

SchemeState TendencyAnalyzer::truncated_state(const SchemeState& state, const Grids& grids, int k_t) const {
  SchemeState t;
  t.t = state.t;
  GridSample psi_t = grids.psi;
  psi_t.values = fft_.inverse_real(truncate_modes(fft_.forward(grids.psi.values), n_, k_t));
  GridSample omega_t = grids.omega;
  omega_t.values = fft_.inverse_real(truncate_modes(fft_.forward(grids.omega.values), n_, k_t));
  t.psi = psi_sampler_.from_grid(psi_t);
  t.omega = omega_sampler_.from_grid(omega_t);
  if (is_velocity_scheme(disc_.config().scheme)) {
    t.u = curl_of(t.psi, disc_.velocity_space());
    t.p = state.p;
  } else {
    GridSample dot = omega_sampler_.sample(state.omega_dot);
    dot.values = fft_.inverse_real(truncate_modes(fft_.forward(dot.values), n_, k_t));
    t.omega_dot = omega_sampler_.from_grid(dot);
  }
  return t;
}

std::vector<SubgridSpectra> TendencyAnalyzer::analyze(const SchemeState& state, const std::vector<int>& k_t) const {
  const Grids g = full_grids(state);
  const std::vector<Complex> psi_hat = fft_.forward(g.psi.values);
  const std::vector<Complex> omega_hat = fft_.forward(g.omega.values);
  const TendencySpectrum full = tendency_spectra_from_modes(psi_hat, omega_hat, fft_.forward(g.j.values), n_);
  std::vector<SubgridSpectra> out;
  out.reserve(k_t.size());
  for (const int kt : k_t) {
    if (kt < 0 || kt > k_max()) throw std::invalid_argument("TendencyAnalyzer: k_T outside [0, k_max]");
    const std::vector<Complex> psi_t = truncate_modes(psi_hat, n_, kt);
    const std::vector<Complex> omega_t = truncate_modes(omega_hat, n_, kt);
    const SchemeState ts = truncated_state(state, g, kt);
    const GridSample jt = omega_sampler_.sample(disc_.numerical_jacobian(ts), FieldTag::Jacobian);
    SubgridSpectra r;
    r.k_t = kt;
    r.full = full;
    r.full.k_t = kt;
    r.truncated = tendency_spectra_from_modes(psi_t, omega_t, fft_.forward(jt.values), n_);
    r.truncated.k_t = kt;
    r.e_dot_sg.resize(full.e_dot.size());
    r.z_dot_sg.resize(full.z_dot.size());
    for (size_t k = 0; k < full.e_dot.size(); ++k) {
      r.e_dot_sg[k] = full.e_dot[k] - r.truncated.e_dot[k];
      r.z_dot_sg[k] = full.z_dot[k] - r.truncated.z_dot[k];
    }
    out.push_back(std::move(r));
  }
  return out;
}

void SpectrumAverager::add(const std::vector<double>& values) {
  if (count_ == 0) {
    mean_.assign(values.size(), 0.0);
  } else if (values.size() != mean_.size()) {
    throw std::invalid_argument("SpectrumAverager: length mismatch");
  }
  ++count_;
  for (size_t k = 0; k < values.size(); ++k) mean_[k] += (values[k] - mean_[k]) / count_;
  samples_.push_back(values);
}

std::vector<double> SpectrumAverager::batch_mean() const {
  std::vector<double> m(mean_.size(), 0.0);
  for (const auto& s : samples_) {
    for (size_t k = 0; k < m.size(); ++k) m[k] += s[k];
  }
  for (double& v : m) v /= std::max(count_, 1);
  return m;
}

std::vector<double> SpectrumAverager::standard_error(int batches) const {
  std::vector<double> se(mean_.size(), std::numeric_limits<double>::infinity());
  batches = std::min(batches, count_);
  if (batches < 2) return se;
  const int per = count_ / batches;
  std::vector<std::vector<double>> bm(batches, std::vector<double>(mean_.size(), 0.0));
  for (int b = 0; b < batches; ++b) {
    for (int s = b * per; s < (b + 1) * per; ++s) {
      for (size_t k = 0; k < mean_.size(); ++k) bm[b][k] += samples_[s][k] / per;
    }
  }
  for (size_t k = 0; k < mean_.size(); ++k) {
    double m = 0.0;
    for (int b = 0; b < batches; ++b) m += bm[b][k];
    m /= batches;
    double var = 0.0;
    for (int b = 0; b < batches; ++b) var += (bm[b][k] - m) * (bm[b][k] - m);
    var /= batches - 1;
    se[k] = std::sqrt(var / batches);
  }
  return se;
}

}  // namespace eulerfe
