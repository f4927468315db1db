// radscat: scattering from radially symmetric media in two dimensions.
//
//   radscat --preset gaussian-k100 --out run1
//   radscat --config my.cfg --threads 4
//   radscat --preset random-k30 --mode residual --grid 121 121 7
//   radscat --mode selftest

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radscat/driver.hpp"
#include "radscat/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Helmholtz scattering from radially symmetric potentials"};
  std::string config_path, preset_name, mode, out;
  int threads = 0;
  double eps = 0.0, k = 0.0;
  std::vector<double> grid;
  bool list = false;
  app.add_option("--config", config_path, "configuration file (key = value)");
  app.add_option("--preset", preset_name, "built-in experiment");
  app.add_option("--mode", mode, "solve, residual, timedomain or selftest")
      ->check(CLI::IsMember({"solve", "residual", "timedomain", "selftest"}));
  app.add_option("--out", out, "output directory");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--eps", eps, "requested precision");
  app.add_option("--k", k, "wavenumber");
  app.add_option("--grid", grid, "NX NY EXTENT")->expected(3);
  app.add_flag("--list-presets", list, "print preset names and exit");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& n : radscat::preset_names()) std::cout << n << "\n";
    return 0;
  }
  try {
    // Precedence: preset, then config file, then flags.
    radscat::RunConfig cfg = preset_name.empty() ? radscat::RunConfig{} : radscat::preset(preset_name);
    if (!config_path.empty()) cfg = radscat::load_config(config_path, cfg);
    if (!mode.empty()) radscat::apply_setting(cfg, "mode", mode);
    if (!out.empty()) cfg.out = out;
    if (threads > 0) cfg.threads = threads;
    if (app.count("--eps")) cfg.eps = eps;
    if (app.count("--k")) cfg.k = k;
    if (!grid.empty()) {
      if (grid[0] != static_cast<int>(grid[0]) || grid[1] != static_cast<int>(grid[1])) {
        throw radscat::ConfigError("--grid: NX and NY must be integers");
      }
      cfg.nx = static_cast<int>(grid[0]);
      cfg.ny = static_cast<int>(grid[1]);
      cfg.extent = grid[2];
    }
    const radscat::RunReport r = radscat::run(cfg);
    std::cout << r.summary;
    return r.exit_code;
  } catch (const radscat::ConfigError& e) {
    std::cerr << "radscat: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const radscat::SolverError& e) {
    std::cerr << "radscat: solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "radscat: " << e.what() << "\n";
    return 1;
  }
}
