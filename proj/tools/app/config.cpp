#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace eulerfe::app {

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Converge: return "converge";
    case Experiment::Turbulence: return "turbulence";
    case Experiment::Decay: return "decay";
    case Experiment::Tendencies: return "tendencies";
    case Experiment::Specref: return "specref";
  }
  return "?";
}

Experiment parse_experiment(const std::string& name) {
  for (Experiment e : {Experiment::Converge, Experiment::Turbulence, Experiment::Decay, Experiment::Tendencies,
                       Experiment::Specref}) {
    if (to_string(e) == name) return e;
  }
  throw ConfigError("unknown experiment '" + name + "' (expected converge, turbulence, decay, tendencies or specref)");
}

RunConfig RunConfig::defaults(Experiment e) {
  RunConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::Converge:
      c.schemes = {Scheme::Supg, Scheme::LieDerivative};
      c.n = {2, 4, 6, 8};
      c.dt = 1e-3;
      c.t_end = 1.0;
      c.window_start = 0.0;
      c.window_end = 1.0;
      c.k_t = {};
      c.tau = 0.0;
      c.forcing_amplitude = 0.0;
      break;
    case Experiment::Turbulence:
      break;
    case Experiment::Decay:
      c.schemes = {Scheme::FluxForm, Scheme::LieDerivative, Scheme::Supg};
      c.t_end = 10.0;
      c.window_start = 0.0;
      c.window_end = 10.0;
      c.k_t = {};
      c.tau = 0.0;
      c.forcing_amplitude = 0.0;
      break;
    case Experiment::Tendencies:
      c.t_end = 0.0;
      c.window_start = 0.0;
      c.window_end = 0.0;
      break;
    case Experiment::Specref:
      c.dt = 0.05;
      c.t_end = 70.0;
      c.window_start = 50.0;
      c.window_end = 70.0;
      c.k_t = {21};
      c.forcing_wavenumber = 16;
      c.sample_every = 10;
      break;
  }
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  }
  return x;
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const std::string& item : split_list(v)) out.push_back(to_int(key, item));
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<Scheme> to_schemes(const std::string& key, const std::string& v) {
  if (v == "all") return {Scheme::FluxForm, Scheme::LieDerivative, Scheme::Supg};
  std::vector<Scheme> out;
  for (const std::string& item : split_list(v)) {
    try {
      out.push_back(parse_scheme(item));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("key '" + key + "': " + e.what());
    }
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty scheme list");
  return out;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

void set_key(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "experiment") {
    c.experiment = parse_experiment(v);
  } else if (key == "scheme") {
    c.schemes = to_schemes(key, v);
  } else if (key == "r") {
    c.r = to_int(key, v);
  } else if (key == "n") {
    c.n = to_int_list(key, v);
  } else if (key == "dt") {
    c.dt = to_double(key, v);
  } else if (key == "alpha") {
    c.alpha = to_double(key, v);
  } else if (key == "beta") {
    c.beta = to_double(key, v);
  } else if (key == "t_end") {
    c.t_end = to_double(key, v);
  } else if (key == "window") {
    const auto parts = split_list(v);
    if (parts.size() != 2) throw ConfigError("key 'window': expected 't0,t1', got '" + v + "'");
    c.window_start = to_double(key, parts[0]);
    c.window_end = to_double(key, parts[1]);
  } else if (key == "kt") {
    c.k_t = to_int_list(key, v);
  } else if (key == "out") {
    if (v.empty()) throw ConfigError("key 'out': empty path");
    c.out = v;
  } else if (key == "snapshot_every") {
    c.snapshot_every = to_int(key, v);
  } else if (key == "sample_every") {
    c.sample_every = to_int(key, v);
  } else if (key == "tau") {
    c.tau = to_double(key, v);
  } else if (key == "forcing_amplitude") {
    c.forcing_amplitude = to_double(key, v);
  } else if (key == "forcing_wavenumber") {
    c.forcing_wavenumber = to_int(key, v);
  } else if (key == "spectral_n") {
    c.spectral_n = to_int(key, v);
  } else if (key == "sigma") {
    c.sigma = to_double(key, v);
  } else if (key == "newton_tol") {
    c.newton_tol = to_double(key, v);
  } else if (key == "newton_max_iters") {
    c.newton_max_iters = to_int(key, v);
  } else if (key == "reuse_jacobian") {
    c.reuse_jacobian = to_bool(key, v);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

RunConfig parse_config_text(const std::string& text, RunConfig base, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    const std::string where = source + ":" + std::to_string(number) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value', got '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    try {
      set_key(base, key, t.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return base;
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), std::move(base), path);
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (c.schemes.empty()) fail("scheme: at least one scheme required");
  if (c.r != 1 && c.r != 2) fail("r: must be 1 or 2");
  if (c.n.empty()) fail("n: at least one mesh size required");
  for (int n : c.n) {
    if (n < 2) fail("n: mesh sizes must be at least 2");
  }
  if (!(c.dt > 0.0)) fail("dt: must be positive");
  if (!(c.alpha > 0.0)) fail("alpha: must be positive");
  if (c.beta < 0.0) fail("beta: must be non-negative");
  if (c.t_end < 0.0) fail("t_end: must be non-negative");
  if (c.window_start < 0.0 || c.window_start > c.window_end || c.window_end > c.t_end) {
    fail("window: must satisfy 0 <= t0 <= t1 <= t_end");
  }
  for (int k : c.k_t) {
    if (k < 0) fail("kt: wavenumbers must be non-negative");
  }
  if (c.snapshot_every < 0) fail("snapshot_every: must be non-negative");
  if (c.sample_every < 1) fail("sample_every: must be at least 1");
  if (c.tau < 0.0) fail("tau: must be non-negative (0 disables drag)");
  if (c.forcing_wavenumber < 0) fail("forcing_wavenumber: must be non-negative");
  if (c.spectral_n < 8) fail("spectral_n: must be at least 8");
  if (!(c.sigma > 0.0)) fail("sigma: must be positive");
  if (!(c.newton_tol > 0.0)) fail("newton_tol: must be positive");
  if (c.newton_max_iters < 1) fail("newton_max_iters: must be at least 1");
  if (c.experiment == Experiment::Turbulence || c.experiment == Experiment::Tendencies) {
    if (c.k_t.empty()) fail("kt: at least one truncation wavenumber required");
  }
}

std::string to_text(const RunConfig& c) {
  std::string schemes;
  for (size_t i = 0; i < c.schemes.size(); ++i) schemes += (i ? "," : "") + eulerfe::to_string(c.schemes[i]);
  std::ostringstream o;
  o << "experiment = " << to_string(c.experiment) << "\n"
    << "scheme = " << schemes << "\n"
    << "r = " << c.r << "\n"
    << "n = " << join(c.n) << "\n"
    << "dt = " << fmt(c.dt) << "\n"
    << "alpha = " << fmt(c.alpha) << "\n"
    << "beta = " << fmt(c.beta) << "\n"
    << "t_end = " << fmt(c.t_end) << "\n"
    << "window = " << fmt(c.window_start) << "," << fmt(c.window_end) << "\n"
    << "kt = " << join(c.k_t) << "\n"
    << "out = " << c.out << "\n"
    << "snapshot_every = " << c.snapshot_every << "\n"
    << "sample_every = " << c.sample_every << "\n"
    << "tau = " << fmt(c.tau) << "\n"
    << "forcing_amplitude = " << fmt(c.forcing_amplitude) << "\n"
    << "forcing_wavenumber = " << c.forcing_wavenumber << "\n"
    << "spectral_n = " << c.spectral_n << "\n"
    << "sigma = " << fmt(c.sigma) << "\n"
    << "newton_tol = " << fmt(c.newton_tol) << "\n"
    << "newton_max_iters = " << c.newton_max_iters << "\n"
    << "reuse_jacobian = " << (c.reuse_jacobian ? "true" : "false") << "\n";
  return o.str();
}

std::uint64_t config_hash(const RunConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char ch : to_text(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash_hex(const RunConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(c)));
  return buf;
}

}  // namespace eulerfe::app
