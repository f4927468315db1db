// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. Arguments select a subset: `acceptance 2 5`.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "oracles.hpp"
#include "radscat/radscat.hpp"

using namespace radscat;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// 1. q = 0 produces no scattered field.
Outcome zero_field() {
  const double eps = 1e-13;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  double worst = 0.0;
  for (double k : {1.0, 10.0, 30.0}) {
    const SolverState s = solve_scattering(zero_potential(kTwoPi), plane_wave(k), k, eps);
    for (int i = 0; i < 1000; ++i) worst = std::max(worst, std::abs(s.scattered(u(rng), u(rng))));
  }
  return {worst <= 10 * eps, fmt("max |u_s| = %.3g (limit %.3g)", worst, 10 * eps)};
}

// 2. Homogeneous disk against the mode-matched series.
Outcome disk_oracle() {
  const double k = 10.0, c = 0.5, b = 1.0;
  const IncidentField inc = plane_wave(k);
  const SolverState s = solve_scattering(constant_disk(c, b), inc, k, 1e-13);
  const oracle::DiskSeries ref(k, c, b, inc.angle, 40);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ur(0.0, 2.0), ut(0.0, kTwoPi);
  double err = 0.0, nrm = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double r = ur(rng), t = ut(rng);
    const double x = r * std::cos(t), y = r * std::sin(t);
    const cplx want = ref.total(x, y);
    err = std::max(err, std::abs(s.total(x, y) - want));
    nrm = std::max(nrm, std::abs(want));
  }
  return {err / nrm <= 1e-9, fmt("relative max error %.3g (limit 1e-9)", err / nrm)};
}

// 3. Lemma-2 style check: the radial operator applied to greens_apply(g)
// returns g, with second-order finite-difference convergence.
Outcome greens_function() {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uc(1.2, 2.8), uw(0.4, 0.9), ua(-1.0, 1.0), uk(1.0, 8.0);
  std::uniform_int_distribution<int> um(0, 6);
  const double b = 4.0;
  double lo = 10.0, hi = -10.0;
  for (int trial = 0; trial < 10; ++trial) {
    const double c = uc(rng), w = uw(rng), k = uk(rng);
    const cplx amp(ua(rng), ua(rng));
    const int m = um(rng);
    auto g = [=](double t) -> cplx {
      const double s = (t - c) / w;
      return std::abs(s) < 1.0 ? amp * std::exp(-1.0 / (1.0 - s * s)) : cplx{};
    };
    const RadialField u = greens_apply(m, k, g, b);
    auto err = [&](double h) {
      double e = 0.0;
      for (int i = 0; i < 12; ++i) {
        const double r = 0.6 + 3.0 * i / 11.0;
        const cplx d2 = (u(r + h) - 2.0 * u(r) + u(r - h)) / (h * h);
        const cplx d1 = (u(r + h) - u(r - h)) / (2.0 * h);
        e = std::max(e, std::abs(d2 + d1 / r + (k * k - double(m) * m / (r * r)) * u(r) - g(r)));
      }
      return e;
    };
    const double order = std::log2(err(0.02) / err(0.01));
    lo = std::min(lo, order);
    hi = std::max(hi, order);
  }
  return {lo >= 1.8 && hi <= 2.2, fmt("observed orders in [%.4f, %.4f] (want 2.0 +- 0.2)", lo, hi)};
}

// 4. Hierarchical density against one dense solve on a refined global grid.
Outcome hierarchical_vs_monolithic() {
  const double k = 20.0;
  const RadialPotential q = gaussian_bump();
  double worst = 0.0;
  std::string parts;
  for (int m : {0, 5, 17}) {
    const auto data = solve_unit_mode(m, k, q, {});
    const oracle::MonolithicNystrom ref(m, k, [&](double r) { return q(r); }, q.support_radius(), 80, 24);
    double err = 0.0, nrm = 0.0;
    for (std::size_t i = 0; i < ref.nodes().size(); ++i) {
      err = std::max(err, std::abs(data->density(ref.nodes()[i]) - ref.rho()[i]));
      nrm = std::max(nrm, std::abs(ref.rho()[i]));
    }
    worst = std::max(worst, err / nrm);
    parts += fmt(" m=%g: %.3g", m, err / nrm);
  }
  return {worst <= 1e-11, "relative density difference" + parts + " (limit 1e-11)"};
}

// 5. Retained mode counts for the plane wave on the 2 pi disk.
Outcome mode_counts() {
  const int m100 = ring_modes(plane_wave(100.0), kTwoPi, 1e-13).M;
  const int m30 = ring_modes(plane_wave(30.0), kTwoPi, 1e-13).M;
  const double d100 = std::abs(m100 - 711.0) / 711.0, d30 = std::abs(m30 - 245.0) / 245.0;
  const auto t0 = std::chrono::steady_clock::now();
  const SolverState s = solve_scattering(gaussian_bump(), plane_wave(100.0), 100.0, 1e-13);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {d100 <= 0.05 && d30 <= 0.05,
          fmt("M = %g at k=100 (711, %.2f%%), ", m100, 100 * d100) + fmt("M = %g at k=30 (245, %.2f%%); ", m30, 100 * d30) +
              fmt("Gaussian k=100 solve %.1f s, M = %g", secs, s.M())};
}

// 6. Residual of the Gaussian k = 30 solution above the finite-difference floor.
Outcome residual_gaussian() {
  const double k = 30.0;
  const SolverState s = solve_scattering(gaussian_bump(), plane_wave(k), k, 1e-13);
  // 2.5 / 180 = 0.0139 spacing: 15.1 points per wavelength.
  const Grid g = Grid::square(361, 361, 2.5);
  const double ppw = kTwoPi / k / g.dx();
  const ResidualMap e = residual_map(s, g);
  const ResidualMap f = residual_floor(s, g);
  std::vector<double> d;
  for (std::size_t i = 0; i < e.values.size(); ++i) d.push_back(std::max(0.0, e.values[i] - f.values[i]));
  std::sort(d.begin(), d.end());
  const double p95 = d[static_cast<std::size_t>(std::ceil(0.95 * d.size())) - 1];
  return {p95 <= 1e-8 && ppw >= 15.0,
          fmt("95th percentile of E - floor %.3g, max %.3g (limit 1e-8), %.1f points per wavelength", p95, d.back(), ppw)};
}

// 7. Discontinuous medium: off-node integral-equation residual per mode and
// continuity of u_s across every breakpoint.
Outcome discontinuous_medium() {
  const double k = 30.0;
  const RadialPotential q = random_discontinuous(1234);
  std::mt19937_64 rng(17);
  double worst_ie = 0.0;
  std::string parts;
  for (int m : {0, 10, 100}) {
    const auto d = solve_unit_mode(m, k, q, {});
    double rho_max = 0.0;
    for (const auto& p : d->panels) {
      for (int i = 0; i <= 400; ++i) rho_max = std::max(rho_max, std::abs(p.rho(p.lo + (p.hi - p.lo) * i / 400.0)));
    }
    std::uniform_real_distribution<double> ur(d->inner_radius(), d->b);
    const cplx c(0.0, -std::numbers::pi / 2.0);
    double worst = 0.0;
    for (int s = 0; s < 40; ++s) {
      const double r = ur(rng);
      const double jr = oracle::J(m, k * r);
      const cplx hr = oracle::H(m, k * r);
      cplx integral = 0.0;
      for (const auto& p : d->panels) {
        auto piece = [&](double a, double b) {
          if (b <= a) return cplx{};
          auto f = [&](double t) {
            const cplx g = t < r ? c * oracle::J(m, k * t) * hr : c * jr * oracle::H(m, k * t);
            return g * t * p.rho(t);
          };
          auto fr = [&](double t) { return std::real(f(t)); };
          auto fi = [&](double t) { return std::imag(f(t)); };
          using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
          return cplx(GK::integrate(fr, a, b, 6, 1e-15), GK::integrate(fi, a, b, 6, 1e-15));
        };
        if (r > p.lo && r < p.hi) {
          integral += piece(p.lo, r) + piece(r, p.hi);
        } else {
          integral += piece(p.lo, p.hi);
        }
      }
        const int i = d->locate(r);
      const cplx res = d->panels[i].rho(r) + k * k * q(r) * (integral + oracle::J(m, k * r));
      worst = std::max(worst, std::abs(res) / rho_max);
    }
    worst_ie = std::max(worst_ie, worst);
    parts += fmt(" m=%g: %.3g", m, worst);
  }

  const SolverState s = solve_scattering(q, plane_wave(k), k, 1e-13);
  double us = 0.0;
  std::uniform_real_distribution<double> ub(0.0, kTwoPi);
  for (int i = 0; i < 400; ++i) {
    const double r = ub(rng), t = ub(rng);
    us = std::max(us, std::abs(s.scattered(r * std::cos(t), r * std::sin(t))));
  }
  double jump = 0.0;
  for (double rb : q.breakpoints()) {
    for (int a = 0; a < 16; ++a) {
      const double th = kTwoPi * a / 16;
      cplx diff = 0.0;
      for (int m = -s.M(); m <= s.M(); ++m) {
        const ModeData& d = s.unit(m);
        if (d.negligible || rb < d.inner_radius()) continue;
        int left = -1, right = -1;
        for (std::size_t i = 0; i < d.panels.size(); ++i) {
          if (d.panels[i].hi == rb) left = static_cast<int>(i);
          if (d.panels[i].lo == rb) right = static_cast<int>(i);
        }
        if (left < 0 || right < 0) throw std::runtime_error("breakpoint is not a panel endpoint");
        diff += s.modes().c(m) * (d.value_on_panel(left, rb) - d.value_on_panel(right, rb)) * std::exp(cplx(0.0, m * th));
      }
      jump = std::max(jump, std::abs(diff) / kTwoPi);
    }
  }
  const bool ok = worst_ie <= 1e-10 && jump <= 1e-10 * us;
  return {ok, "IE residual / ||rho||" + parts + fmt(" (limit 1e-10); breakpoint jump / ||u_s|| %.3g (limit 1e-10)", jump / us)};
}

// 8. Time-domain synthesis for the Luneburg lens.
Outcome time_domain() {
  const SourceSpectrum spec = gaussian_pulse_spectrum();
  // Observation points on the lens: centre plus rings.
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
  for (double r : {1.5, 3.0, 4.5, 6.0}) {
    for (int a = 0; a < 8; ++a) pts.emplace_back(r * std::cos(a * kTwoPi / 8 + 0.3), r * std::sin(a * kTwoPi / 8 + 0.3));
  }
  const RadialPotential q = luneburg_lens();
  const FrequencySweep base = build_sweep(spec, q, pts, SweepLayout{});
  const FrequencySweep fine = build_sweep(spec, q, pts, SweepLayout{}.doubled());

  // Arrival at the lens rim from (10, 10) at unit exterior speed, minus five
  // pulse widths (width 1/sqrt(rate)).
  const double t_c = spec.t0 + (std::hypot(spec.x0, spec.y0) - kTwoPi) - 5.0 / std::sqrt(spec.rate);
  double early = 0.0, peak = 0.0, imag = 0.0;
  for (double t = 0.0; t <= 50.0; t += 0.125) {
    const Frame f = synthesize(base, t);
    double mx = 0.0;
    for (double v : f.values) mx = std::max(mx, std::abs(v));
    (t <= t_c ? early : peak) = std::max(t <= t_c ? early : peak, mx);
    imag = std::max(imag, f.imag_residue);
  }
  peak = std::max(peak, early);
  double change = 0.0;
  for (double t : {13.6, 19.0, 28.0, 34.0, 37.0}) {
    const Frame a = synthesize(base, t), b = synthesize(fine, t);
    for (std::size_t p = 0; p < pts.size(); ++p) change = std::max(change, std::abs(a.values[p] - b.values[p]));
  }

  // Free space against direct convolution.
  const std::vector<std::pair<double, double>> fp{{0.0, 0.0}, {3.0, -2.0}, {-4.0, 5.0}, {6.0, 6.0}, {0.0, 7.0}};
  const std::vector<double> ft{28.0, 24.0, 30.0, 20.0, 34.0};
  const FrequencySweep free = build_sweep(spec, zero_potential(kTwoPi), fp, SweepLayout{});
  double free_err = 0.0;
  for (std::size_t i = 0; i < fp.size(); ++i) {
    const double R = std::hypot(fp[i].first - spec.x0, fp[i].second - spec.y0);
    const double want = oracle::free_space_pulse([&](double s) { return spec.profile(s); }, R, ft[i], spec.t0 - 3.5);
    free_err = std::max(free_err, std::abs(synthesize(free, ft[i]).values[i] - want));
  }
  const bool ok = imag <= 1e-10 * peak && early <= 1e-6 * peak && change <= 1e-8 * peak && free_err <= 1e-6;
  std::ostringstream s;
  s.precision(3);
  s << "imag residue/peak " << imag / peak << " (1e-10); pre-arrival (t <= " << t_c << ") max/peak " << early / peak
    << " (1e-6); doubling change/peak " << change / peak << " (1e-8); free-space error " << free_err << " (1e-6); "
    << base.rule.nodes.size() << " nodes, sweep " << base.seconds << " s + doubled " << fine.seconds << " s";
  return {ok, s.str()};
}

// 9. Wronskian of the Bessel pair.
Outcome wronskian() {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<int> um(0, 200);
  std::uniform_real_distribution<double> ux(std::log(1e-2), std::log(2e3));
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const int m = um(rng);
    const double x = std::exp(ux(rng));
    const auto p = specfun::bessel_jy_scaled(m, x);
    const double w = 2.0 / (std::numbers::pi * x);
    worst = std::max(worst, std::abs(p.j * p.yp - p.jp * p.y - w) / w);
  }
  return {worst <= 1e-12, fmt("max relative Wronskian error %.3g over 10000 samples (limit 1e-12)", worst)};
}

// 10. Two CLI runs of the same preset give identical files.
Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::path(RADSCAT_TEST_WORKDIR) / "determinism";
  fs::remove_all(root);
  for (const char* run : {"a", "b"}) {
    const std::string cmd = std::string(RADSCAT_CLI) + " --preset gaussian-k100 --out " + (root / run).string() + " > " +
                            (root.string() + "_" + run + ".log") + " 2>&1";
    fs::create_directories(root);
    if (std::system(cmd.c_str()) != 0) return {false, "CLI run failed: " + cmd};
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  std::set<std::string> names;
  for (const char* run : {"a", "b"}) {
    for (const auto& e : fs::recursive_directory_iterator(root / run)) {
      if (e.is_regular_file()) names.insert(fs::relative(e.path(), root / run).string());
    }
  }
  int compared = 0;
  for (const auto& n : names) {
    if (n == "timings.json") continue;
    if (!fs::exists(root / "a" / n) || !fs::exists(root / "b" / n)) return {false, "file only in one run: " + n};
    if (slurp(root / "a" / n) != slurp(root / "b" / n)) return {false, "files differ: " + n};
    ++compared;
  }
  return {compared >= 4, fmt("%g files bit-identical (timings.json excluded)", compared)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria{
      {1, {"zero potential", zero_field}},
      {2, {"disk oracle", disk_oracle}},
      {3, {"green's function", greens_function}},
      {4, {"hierarchical vs monolithic", hierarchical_vs_monolithic}},
      {5, {"mode counts", mode_counts}},
      {6, {"residual map", residual_gaussian}},
      {7, {"discontinuous medium", discontinuous_medium}},
      {8, {"time domain", time_domain}},
      {9, {"special functions", wronskian}},
      {10, {"determinism", determinism}},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& [id, c] : criteria) {
    if (!pick.empty() && !pick.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s: %s: %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", c.first, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
