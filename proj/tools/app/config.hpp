#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "eulerfe/schemes.hpp"

namespace eulerfe::app {

enum class Experiment { Converge, Turbulence, Decay, Tendencies, Specref };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& name);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Effective settings of one invocation. Defaults depend on the experiment;
/// see RunConfig::defaults.
struct RunConfig {
  Experiment experiment = Experiment::Turbulence;
  std::vector<Scheme> schemes{Scheme::LieDerivative};
  int r = 1;
  std::vector<int> n{32};
  double dt = 0.02;
  double alpha = 1.0;
  double beta = 1.0;
  double t_end = 80.0;
  double window_start = 60.0;
  double window_end = 80.0;
  std::vector<int> k_t{10};
  std::string out = "out";
  int snapshot_every = 0;       // steps between vorticity snapshots; 0 disables
  int sample_every = 1;         // steps between tendency samples
  double tau = 100.0;           // Ekman drag time scale; 0 disables drag
  double forcing_amplitude = 0.1;
  int forcing_wavenumber = 8;   // f = A sin(2 pi k x)
  int spectral_n = 128;         // lattice of the pseudo-spectral reference
  double sigma = 100.0;         // manufactured solution decay scale
  double newton_tol = 1e-11;
  int newton_max_iters = 30;
  bool reuse_jacobian = true;

  static RunConfig defaults(Experiment e);
  bool operator==(const RunConfig&) const = default;
};

/// Applies `key = value` lines on top of `base`. Blank lines and lines
/// starting with '#' are ignored; unknown keys and malformed values raise
/// ConfigError naming the line and key. `source` labels diagnostics.
RunConfig parse_config_text(const std::string& text, RunConfig base, const std::string& source = "config");
RunConfig parse_config_file(const std::string& path, RunConfig base);
/// Applies one key/value pair.
void set_key(RunConfig& config, const std::string& key, const std::string& value);

/// Throws ConfigError when the configuration is inconsistent.
void validate(const RunConfig& config);

/// Canonical key = value text; parse_config_text(to_text(c), defaults) == c.
std::string to_text(const RunConfig& config);
/// FNV-1a hash of to_text(config).
std::uint64_t config_hash(const RunConfig& config);
std::string config_hash_hex(const RunConfig& config);

}  // namespace eulerfe::app
