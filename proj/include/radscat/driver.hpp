#ifndef RADSCAT_DRIVER_HPP
#define RADSCAT_DRIVER_HPP

// Pipelines behind the command-line tool. Every run writes into cfg.out:
//   metadata.json  run description, mode counts, per-mode panel counts
//   panels.csv     m, panels, radial points (nodes per mode)
//   summary.txt    human-readable digest
//   timings.json   wall-clock phases; the only file that varies between runs
// plus the mode-specific data files.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "radscat/assembly.hpp"
#include "radscat/config.hpp"
#include "radscat/gridio.hpp"
#include "radscat/selftest.hpp"
#include "radscat/timedomain.hpp"

namespace radscat {

namespace detail {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("error writing " + path.string());
}

inline nlohmann::json describe(const RunConfig& c) {
  nlohmann::json j;
  j["mode"] = to_string(c.mode);
  j["preset"] = c.preset;
  j["potential"] = c.potential.describe();
  j["source"] = c.source.describe();
  j["k"] = c.k;
  j["eps"] = c.eps;
  j["grid"] = {{"nx", c.nx}, {"ny", c.ny}, {"extent", c.extent}};
  return j;
}

inline void write_panels(const std::filesystem::path& path, const std::vector<int>& counts, int order) {
  std::ostringstream s;
  s << "m,panels,radial_points\n";
  for (std::size_t m = 0; m < counts.size(); ++m) s << m << "," << counts[m] << "," << counts[m] * order << "\n";
  write_text(path, s.str());
}

/// 95th percentile and maximum of E - floor over unmasked points.
inline std::pair<double, double> attributed_stats(const ResidualMap& e, const ResidualMap& floor) {
  std::vector<double> d;
  for (std::size_t i = 0; i < e.values.size(); ++i) {
    if (!e.masked[i]) d.push_back(std::max(0.0, e.values[i] - floor.values[i]));
  }
  if (d.empty()) return {0.0, 0.0};
  std::sort(d.begin(), d.end());
  const std::size_t i95 = static_cast<std::size_t>(std::ceil(0.95 * d.size())) - 1;
  return {d[i95], d.back()};
}

}  // namespace detail

struct RunReport {
  int exit_code = 0;
  std::string summary;
};

inline RunReport run_solve(const RunConfig& c, bool residual) {
  namespace fs = std::filesystem;
  const fs::path out(c.out);
  fs::create_directories(out);
  detail::Stopwatch clock;
  const RadialPotential q = c.potential.build();
  const IncidentField src = c.source.build(c.k);
  SolveOptions opt;
  opt.threads = c.threads;
  const SolverState s = solve_scattering(q, src, c.k, c.eps, opt);
  const double t_solve = clock.lap();
  const Grid grid = Grid::square(c.nx, c.ny, c.extent);

  nlohmann::json meta = detail::describe(c);
  meta["mode_count"] = s.M();
  meta["orders"] = s.modes().count();
  meta["ring_samples"] = s.modes().samples;
  meta["panel_counts"] = s.panel_counts();
  meta["panel_order"] = kPanelOrder;
  nlohmann::json timings;
  timings["solve_seconds"] = t_solve;

  std::ostringstream sum;
  sum << "potential " << c.potential.describe() << ", source " << c.source.describe() << ", k = " << c.k
      << ", eps = " << c.eps << "\n";
  sum << "retained orders |m| <= " << s.M() << " (" << s.modes().count() << " modes)\n";

  if (!residual) {
    const FieldPart part = c.field == "scattered" ? FieldPart::scattered
                           : c.field == "incident" ? FieldPart::incident
                                                   : FieldPart::total;
    const WaveField w = evaluate_field(s, grid, part, c.threads);
    timings["grid_seconds"] = clock.lap();
    io::write_field(out / "field.dat", w);
    meta["files"] = {"field.dat", "panels.csv", "summary.txt"};
    meta["field"] = c.field;
    sum << c.field << " field on " << c.nx << " x " << c.ny << " grid written to field.dat\n";
  } else {
    ResidualOptions ro;
    ro.h = c.residual_h;
    ro.threads = c.threads;
    const ResidualMap e = residual_map(s, grid, ro);
    const ResidualMap f = residual_floor(s, grid, ro);
    timings["residual_seconds"] = clock.lap();
    io::write_residual(out / "residual.dat", e, c.k);
    io::write_residual(out / "floor.dat", f, c.k);
    const auto [p95, mx] = detail::attributed_stats(e, f);
    meta["files"] = {"residual.dat", "floor.dat", "panels.csv", "summary.txt"};
    meta["fd_step"] = e.h;
    meta["attributed_p95"] = p95;
    meta["attributed_max"] = mx;
    sum << "residual E - floor: 95th percentile " << p95 << ", max " << mx << " (h = " << e.h << ")\n";
  }
  detail::write_panels(out / "panels.csv", s.panel_counts(), kPanelOrder);
  detail::write_text(out / "metadata.json", meta.dump(2) + "\n");
  detail::write_text(out / "summary.txt", sum.str());
  detail::write_text(out / "timings.json", timings.dump(2) + "\n");
  return {0, sum.str()};
}

inline RunReport run_timedomain(const RunConfig& c) {
  namespace fs = std::filesystem;
  const fs::path out(c.out);
  fs::create_directories(out);
  detail::Stopwatch clock;
  const RadialPotential q = c.potential.build();
  const SourceSpectrum spec = c.spectrum();
  const Grid grid = Grid::square(c.nx, c.ny, c.extent);
  const FrequencySweep sw = build_sweep(spec, q, grid_points(grid), c.sweep, c.eps, c.threads);
  const double t_sweep = clock.lap();
  const std::vector<Frame> frames = synthesize(sw, c.times);
  io::write_frames(out / "frames", grid, spec.band_limit, frames);

  nlohmann::json meta = detail::describe(c);
  meta.erase("k");
  meta["band_limit"] = spec.band_limit;
  meta["pulse"] = {{"amplitude", spec.amplitude}, {"t0", spec.t0}, {"rate", spec.rate}};
  meta["frequency_nodes"] = sw.rule.nodes.size();
  meta["mode_counts"] = sw.mode_counts;
  nlohmann::json fr = nlohmann::json::array();
  for (const Frame& f : frames) {
    double peak = 0.0;
    for (double v : f.values) peak = std::max(peak, std::abs(v));
    fr.push_back({{"t", f.t}, {"peak", peak}, {"imag_residue", f.imag_residue}});
  }
  meta["frames"] = fr;
  detail::write_text(out / "metadata.json", meta.dump(2) + "\n");
  nlohmann::json timings;
  timings["sweep_seconds"] = t_sweep;
  timings["synthesis_seconds"] = clock.lap();
  detail::write_text(out / "timings.json", timings.dump(2) + "\n");

  std::ostringstream sum;
  sum << "time-domain sweep: " << sw.rule.nodes.size() << " frequencies in (0, " << spec.band_limit << "], max order "
      << *std::max_element(sw.mode_counts.begin(), sw.mode_counts.end()) << "\n";
  for (std::size_t i = 0; i < frames.size(); ++i) sum << "frame " << i << ": t = " << frames[i].t << "\n";
  detail::write_text(out / "summary.txt", sum.str());
  return {0, sum.str()};
}

inline RunReport run_selftest_report() {
  std::ostringstream s;
  int failed = 0;
  for (const CheckResult& r : run_selftest()) {
    s << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.value << " (limit " << r.limit << ")\n";
    failed += !r.passed;
  }
  return {failed == 0 ? 0 : 1, s.str()};
}

inline RunReport run(const RunConfig& c) {
  c.validate();
  switch (c.mode) {
    case RunMode::solve: return run_solve(c, false);
    case RunMode::residual: return run_solve(c, true);
    case RunMode::timedomain: return run_timedomain(c);
    case RunMode::selftest: return run_selftest_report();
  }
  return {2, "unknown mode\n"};
}

}  // namespace radscat

#endif  // RADSCAT_DRIVER_HPP
