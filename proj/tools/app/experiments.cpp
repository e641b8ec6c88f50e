#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <limits>
#include <numbers>
#include <ostream>

#include "csv.hpp"

namespace eulerfe::app {

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const Mesh> make_mesh(int n, bool periodic) {
  return std::make_shared<const Mesh>(build_unit_square_mesh(n, periodic));
}

SchemeConfig scheme_config(const RunConfig& c, Scheme s) {
  SchemeConfig sc;
  sc.scheme = s;
  sc.r = c.r;
  sc.dt = c.dt;
  sc.upwind.alpha = c.alpha;
  sc.beta = c.beta;
  sc.newton.tol = c.newton_tol;
  sc.newton.max_iters = c.newton_max_iters;
  sc.newton.reuse_jacobian = c.reuse_jacobian;
  sc.drag_tau = c.tau;
  if (c.forcing_amplitude != 0.0) {
    const double a = c.forcing_amplitude;
    const double k = 2.0 * kPi * c.forcing_wavenumber;
    sc.vorticity_forcing = [a, k](const Vec2& x, double) { return a * std::sin(k * x.x()); };
  }
  return sc;
}

int step_count(double t_end, double dt) { return static_cast<int>(std::llround(t_end / dt)); }

void check_finite(double energy, Scheme s, double t) {
  if (!std::isfinite(energy)) {
    throw BlowUp(eulerfe::to_string(s) + " scheme produced a non-finite energy at t = " + std::to_string(t));
  }
}

std::filesystem::path out_path(const RunConfig& c, const std::string& name) {
  return std::filesystem::path(c.out) / name;
}

std::vector<std::string> spectra_columns() {
  return {"k_t",   "k",        "e_dot",    "e_dot_se",    "z_dot",    "z_dot_se", "e_dot_t",
          "z_dot_t", "e_dot_sg", "e_dot_sg_se", "z_dot_sg", "z_dot_sg_se", "samples"};
}

void write_spectra(const std::filesystem::path& path, const std::string& hash,
                   const std::vector<AveragedSubgrid>& spectra) {
  CsvWriter w(path, hash, spectra_columns());
  for (const AveragedSubgrid& a : spectra) {
    if (a.e_dot.count() == 0) continue;
    const auto e_se = a.e_dot.standard_error(), z_se = a.z_dot.standard_error();
    const auto esg_se = a.e_dot_sg.standard_error(), zsg_se = a.z_dot_sg.standard_error();
    for (size_t k = 0; k < a.e_dot.mean().size(); ++k) {
      w << a.k_t << static_cast<int>(k) << a.e_dot.mean()[k] << e_se[k] << a.z_dot.mean()[k] << z_se[k]
        << a.e_dot_t.mean()[k] << a.z_dot_t.mean()[k] << a.e_dot_sg.mean()[k] << esg_se[k] << a.z_dot_sg.mean()[k]
        << zsg_se[k] << a.e_dot.count();
      w.end_row();
    }
  }
}

void accumulate(AveragedSubgrid& a, const SubgridSpectra& s) {
  a.e_dot.add(s.full.e_dot);
  a.z_dot.add(s.full.z_dot);
  a.e_dot_t.add(s.truncated.e_dot);
  a.z_dot_t.add(s.truncated.z_dot);
  a.e_dot_sg.add(s.e_dot_sg);
  a.z_dot_sg.add(s.z_dot_sg);
}

void check_truncations(const RunConfig& c, int mesh_n) {
  const int k_max = max_retained_wavenumber(lattice_size(c.r, mesh_n));
  for (int k : c.k_t) {
    if (k > k_max) {
      throw ConfigError("kt: " + std::to_string(k) + " exceeds k_max = " + std::to_string(k_max) + " for r = " +
                        std::to_string(c.r) + ", n = " + std::to_string(mesh_n));
    }
  }
}

/// Steps the discretisation and records the energy history.
class Integrator {
 public:
  Integrator(Discretisation& d, SchemeState& s) : disc_(d), state_(s) {
    history_.push_back({s.t, d.energy(s), d.enstrophy(s), 0.0, 0.0});
  }

  const HistoryRow& step() {
    const SchemeState before = state_;
    disc_.step(state_);
    HistoryRow row;
    row.t = state_.t;
    row.energy = disc_.energy(state_);
    row.enstrophy = disc_.enstrophy(state_);
    check_finite(row.energy, disc_.config().scheme, row.t);
    row.source_work = disc_.source_work(before, state_);
    row.budget_residual = row.energy - history_.back().energy - row.source_work;
    history_.push_back(row);
    return history_.back();
  }

  const std::vector<HistoryRow>& history() const { return history_; }

 private:
  Discretisation& disc_;
  SchemeState& state_;
  std::vector<HistoryRow> history_;
};

}  // namespace

double vortex_initial_vorticity(double x, double y) {
  return std::sin(8 * kPi * x) * std::sin(8 * kPi * y) + 0.4 * std::cos(6 * kPi * x) * std::cos(6 * kPi * y) +
         0.3 * std::cos(10 * kPi * x) * std::cos(4 * kPi * y) + 0.01 * std::sin(2 * kPi * y) +
         0.02 * std::sin(2 * kPi * x);
}

double observed_order(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

std::vector<ConvergenceRow> run_convergence(const RunConfig& c, std::ostream& log) {
  validate(c);
  const ManufacturedSolution ms(c.sigma);
  const std::string hash = config_hash_hex(c);
  CsvWriter w(out_path(c, "convergence.csv"), hash,
              {"scheme", "r", "n", "h", "err_u", "order_u", "err_omega", "order_omega"});
  std::vector<ConvergenceRow> rows;
  for (Scheme s : c.schemes) {
    const ConvergenceRow* prev = nullptr;
    for (int n : c.n) {
      SchemeConfig sc = scheme_config(c, s);
      sc.drag_tau = 0.0;
      sc.vorticity_forcing = nullptr;
      if (is_velocity_scheme(s)) {
        sc.momentum_forcing = [&ms](const Vec2& x, double t) { return ms.momentum_forcing(x, t); };
      } else {
        sc.vorticity_forcing = [&ms](const Vec2& x, double t) { return ms.vorticity_forcing(x, t); };
      }
      Discretisation d(make_mesh(n, false), sc);
      const ScalarFunction psi0 = [&ms](const Vec2& x) { return ms.psi(x, 0.0); };
      SchemeState st = d.initial_state([&ms](const Vec2& x) { return ms.vorticity(x, 0.0); }, &psi0);
      const int steps = step_count(c.t_end, c.dt);
      for (int k = 0; k < steps; ++k) d.step(st);
      ConvergenceRow row;
      row.scheme = s;
      row.r = c.r;
      row.n = n;
      row.h = 1.0 / n;
      const double t = st.t;
      row.err_u = d.velocity_error(st, [&ms, t](const Vec2& x) { return ms.velocity(x, t); });
      row.err_omega = l2_error(d.vorticity(st), ScalarFunction([&ms, t](const Vec2& x) { return ms.vorticity(x, t); }),
                               2 * (c.r + 1) + 4);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.order_u = prev ? observed_order(prev->err_u, row.err_u, prev->h, row.h) : nan;
      row.order_omega = prev ? observed_order(prev->err_omega, row.err_omega, prev->h, row.h) : nan;
      rows.push_back(row);
      prev = &rows.back();
      log << "converge " << eulerfe::to_string(s) << " r=" << c.r << " n=" << n << " err_u=" << row.err_u
          << " err_omega=" << row.err_omega << "\n";
      w << eulerfe::to_string(s) << row.r << row.n << row.h << row.err_u << row.order_u << row.err_omega
        << row.order_omega;
      w.end_row();
    }
    prev = nullptr;
  }
  return rows;
}

std::vector<DecayResult> run_decay(const RunConfig& c, std::ostream& log) {
  validate(c);
  const std::string hash = config_hash_hex(c);
  CsvWriter w(out_path(c, "decay.csv"), hash, {"scheme", "t", "energy", "enstrophy"});
  std::vector<DecayResult> results;
  for (Scheme s : c.schemes) {
    SchemeConfig sc = scheme_config(c, s);
    sc.drag_tau = 0.0;
    sc.vorticity_forcing = nullptr;
    Discretisation d(make_mesh(c.n.front(), true), sc);
    SchemeState st = d.initial_state([](const Vec2& x) { return vortex_initial_vorticity(x.x(), x.y()); });
    Integrator integ(d, st);
    const int steps = step_count(c.t_end, c.dt);
    try {
      for (int k = 0; k < steps; ++k) integ.step();
    } catch (...) {
      for (const HistoryRow& h : integ.history()) {
        w << eulerfe::to_string(s) << h.t << h.energy << h.enstrophy;
        w.end_row();
      }
      w.flush();
      throw;
    }
    for (const HistoryRow& h : integ.history()) {
      w << eulerfe::to_string(s) << h.t << h.energy << h.enstrophy;
      w.end_row();
    }
    const auto& hist = integ.history();
    log << "decay " << eulerfe::to_string(s) << " E0=" << hist.front().energy << " E=" << hist.back().energy
        << " Z=" << hist.back().enstrophy << "\n";
    results.push_back({s, hist});
  }
  return results;
}

std::vector<TurbulenceResult> run_turbulence(const RunConfig& c, std::ostream& log) {
  validate(c);
  const std::string hash = config_hash_hex(c);
  const int mesh_n = c.n.front();
  check_truncations(c, mesh_n);
  std::vector<TurbulenceResult> results;
  for (Scheme s : c.schemes) {
    const std::string name = eulerfe::to_string(s);
    Discretisation d(make_mesh(mesh_n, true), scheme_config(c, s));
    SchemeState st = d.initial_state([](const Vec2& x) { return vortex_initial_vorticity(x.x(), x.y()); });
    const TendencyAnalyzer analyzer(d);
    const LatticeSampler sampler(d.vorticity_space(), analyzer.n());
    TurbulenceResult res;
    res.scheme = s;
    res.k_max = analyzer.k_max();
    for (int k : c.k_t) {
      AveragedSubgrid a;
      a.k_t = k;
      res.spectra.push_back(std::move(a));
    }
    CsvWriter hist(out_path(c, "history_" + name + ".csv"), hash,
                   {"t", "energy", "enstrophy", "source_work", "budget_residual", "energy_moving_average"});
    const int ma_len = std::max(1, step_count(5.0, c.dt));
    std::deque<double> ma;
    double ma_sum = 0.0;
    auto write_history = [&](const HistoryRow& h) {
      ma.push_back(h.energy);
      ma_sum += h.energy;
      if (static_cast<int>(ma.size()) > ma_len) {
        ma_sum -= ma.front();
        ma.pop_front();
      }
      hist << h.t << h.energy << h.enstrophy << h.source_work << h.budget_residual << ma_sum / ma.size();
      hist.end_row();
    };
    auto snapshot = [&](int step) {
      write_grid_csv(out_path(c, "snapshots/omega_" + name + "_" + std::to_string(step) + ".csv"), hash,
                     analyzer.n(), sampler.sample(d.vorticity(st)).values);
    };
    Integrator integ(d, st);
    write_history(integ.history().back());
    if (c.snapshot_every > 0) snapshot(0);
    const int steps = step_count(c.t_end, c.dt);
    const auto start = std::chrono::steady_clock::now();
    double spinup_ma_min = std::numeric_limits<double>::infinity(), spinup_ma_max = 0.0;
    int since_sample = 0;
    try {
      for (int k = 1; k <= steps; ++k) {
        const HistoryRow& h = integ.step();
        write_history(h);
        if (h.t < c.window_start && h.t >= 0.75 * c.window_start) {
          spinup_ma_min = std::min(spinup_ma_min, ma_sum / ma.size());
          spinup_ma_max = std::max(spinup_ma_max, ma_sum / ma.size());
        }
        if (c.snapshot_every > 0 && k % c.snapshot_every == 0) snapshot(k);
        if (h.t >= c.window_start - 1e-9 && h.t <= c.window_end + 1e-9 && ++since_sample >= c.sample_every) {
          since_sample = 0;
          const auto spectra = analyzer.analyze(st, c.k_t);
          for (size_t i = 0; i < spectra.size(); ++i) accumulate(res.spectra[i], spectra[i]);
        }
        if (k % 500 == 0) {
          const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          log << "turbulence " << name << " t=" << h.t << " E=" << h.energy << " Z=" << h.enstrophy << " ("
              << secs << " s)\n";
        }
      }
    } catch (...) {
      hist.flush();
      write_spectra(out_path(c, "spectra_" + name + ".csv"), hash, res.spectra);
      throw;
    }
    if (spinup_ma_max > 0.0) {
      log << "turbulence " << name << " energy moving-average variation over the last quarter of spin-up: "
          << 100.0 * (spinup_ma_max - spinup_ma_min) / spinup_ma_max << "%\n";
    }
    write_spectra(out_path(c, "spectra_" + name + ".csv"), hash, res.spectra);
    res.history = integ.history();
    results.push_back(std::move(res));
  }
  return results;
}

std::vector<TendencyResult> run_tendencies(const RunConfig& c, std::ostream& log) {
  validate(c);
  const std::string hash = config_hash_hex(c);
  const int mesh_n = c.n.front();
  check_truncations(c, mesh_n);
  std::vector<TendencyResult> results;
  for (Scheme s : c.schemes) {
    const std::string name = eulerfe::to_string(s);
    Discretisation d(make_mesh(mesh_n, true), scheme_config(c, s));
    SchemeState st = d.initial_state([](const Vec2& x) { return vortex_initial_vorticity(x.x(), x.y()); });
    Integrator integ(d, st);
    const int steps = step_count(c.t_end, c.dt);
    for (int k = 0; k < steps; ++k) integ.step();
    const TendencyAnalyzer analyzer(d);
    TendencyResult res;
    res.scheme = s;
    res.spectra = analyzer.analyze(st, c.k_t);
    CsvWriter w(out_path(c, "tendencies_" + name + ".csv"), hash,
                {"k_t", "k", "e_dot", "z_dot", "e_dot_t", "z_dot_t", "e_dot_sg", "z_dot_sg"});
    for (const SubgridSpectra& sp : res.spectra) {
      for (size_t k = 0; k < sp.full.e_dot.size(); ++k) {
        w << sp.k_t << static_cast<int>(k) << sp.full.e_dot[k] << sp.full.z_dot[k] << sp.truncated.e_dot[k]
          << sp.truncated.z_dot[k] << sp.e_dot_sg[k] << sp.z_dot_sg[k];
        w.end_row();
      }
    }
    log << "tendencies " << name << " t=" << st.t << " N=" << analyzer.n() << "\n";
    results.push_back(std::move(res));
  }
  return results;
}

ReferenceRunResult run_specref(const RunConfig& c, std::ostream& log) {
  validate(c);
  ReferenceRunConfig rc;
  rc.solver.n = c.spectral_n;
  rc.solver.drag_tau = c.tau;
  rc.solver.dt_max = c.dt;
  if (c.forcing_amplitude != 0.0) {
    const double a = c.forcing_amplitude;
    const double k = 2.0 * kPi * c.forcing_wavenumber;
    rc.solver.forcing = [a, k](double x, double) { return a * std::sin(k * x); };
  }
  rc.initial_vorticity = vortex_initial_vorticity;
  rc.k_t = c.k_t;
  rc.t_spinup = c.window_start;
  rc.t_average = c.window_end - c.window_start;
  rc.sample_every = c.sample_every;
  const int k_max = max_retained_wavenumber(c.spectral_n);
  for (int k : c.k_t) {
    if (k > k_max) throw ConfigError("kt: " + std::to_string(k) + " exceeds k_max = " + std::to_string(k_max));
  }
  const ReferenceRunResult r = reference_tendency_run(rc);
  write_spectra(out_path(c, "specref_spectra.csv"), config_hash_hex(c), r.spectra);
  log << "specref N=" << c.spectral_n << " steps=" << r.steps << " E=" << r.final_energy << " Z=" << r.final_enstrophy
      << "\n";
  return r;
}

void run_experiment(const RunConfig& c, std::ostream& log) {
  switch (c.experiment) {
    case Experiment::Converge: run_convergence(c, log); break;
    case Experiment::Turbulence: run_turbulence(c, log); break;
    case Experiment::Decay: run_decay(c, log); break;
    case Experiment::Tendencies: run_tendencies(c, log); break;
    case Experiment::Specref: run_specref(c, log); break;
  }
}

}  // namespace eulerfe::app
