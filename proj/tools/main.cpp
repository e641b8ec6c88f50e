#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "config.hpp"
#include "eulerfe/newton.hpp"
#include "experiments.hpp"

using namespace eulerfe;
using namespace eulerfe::app;

int main(int argc, char** argv) {
  CLI::App cli{"Finite element discretisations of the 2D Euler equations and their sub-grid tendencies"};
  std::string experiment;
  std::string config_file;
  std::vector<std::string> overrides;
  bool print_config = false;
  std::optional<std::string> scheme, n, window, kt, out;
  std::optional<int> r, snapshot_every;
  std::optional<double> dt, alpha, beta, t_end;

  cli.add_option("experiment", experiment, "converge, turbulence, decay, tendencies or specref")->required();
  cli.add_option("--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);
  cli.add_option("--scheme", scheme, "flux, lie, supg, a comma list or all");
  cli.add_option("--r", r, "polynomial degree of the velocity space (1 or 2)");
  cli.add_option("--n", n, "mesh sizes, comma separated");
  cli.add_option("--dt", dt, "time step");
  cli.add_option("--alpha", alpha, "upwind coefficient");
  cli.add_option("--beta", beta, "SUPG coefficient");
  cli.add_option("--t-end", t_end, "final time");
  cli.add_option("--window", window, "averaging window t0,t1");
  cli.add_option("--kt", kt, "truncation wavenumbers, comma separated");
  cli.add_option("--out", out, "output directory");
  cli.add_option("--snapshot-every", snapshot_every, "steps between vorticity snapshots (0 disables)");
  cli.add_option("--set", overrides, "additional key=value settings");
  cli.add_flag("--print-config", print_config, "print the effective configuration and exit");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig c = RunConfig::defaults(parse_experiment(experiment));
    if (!config_file.empty()) c = parse_config_file(config_file, c);
    if (c.experiment != parse_experiment(experiment)) throw ConfigError("config file selects a different experiment");
    auto num = [](double v) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    if (scheme) set_key(c, "scheme", *scheme);
    if (r) set_key(c, "r", std::to_string(*r));
    if (n) set_key(c, "n", *n);
    if (dt) set_key(c, "dt", num(*dt));
    if (alpha) set_key(c, "alpha", num(*alpha));
    if (beta) set_key(c, "beta", num(*beta));
    if (t_end) set_key(c, "t_end", num(*t_end));
    if (window) set_key(c, "window", *window);
    if (kt) set_key(c, "kt", *kt);
    if (out) set_key(c, "out", *out);
    if (snapshot_every) set_key(c, "snapshot_every", std::to_string(*snapshot_every));
    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set: expected key=value, got '" + kv + "'");
      set_key(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    validate(c);
    if (print_config) {
      std::cout << to_text(c);
      return 0;
    }
    std::cerr << "config_hash=" << config_hash_hex(c) << "\n";
    run_experiment(c, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const NewtonFailure& e) {
    std::cerr << "newton failure: " << e.what() << "\n";
    return 3;
  } catch (const BlowUp& e) {
    std::cerr << "blow-up: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
