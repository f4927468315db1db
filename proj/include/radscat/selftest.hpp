#ifndef RADSCAT_SELFTEST_HPP
#define RADSCAT_SELFTEST_HPP

// Quick invariant checks run by `radscat selftest`.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "radscat/assembly.hpp"
#include "radscat/modesolver.hpp"
#include "radscat/reference.hpp"
#include "radscat/specfun.hpp"

namespace radscat {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
};

namespace selftest {

/// Largest relative defect of J_m Y_m' - J_m' Y_m = 2/(pi x), evaluated on
/// the scaled pair so that it stays finite below the turning point.
inline double wronskian_defect(int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> md(0, 200);
  std::uniform_real_distribution<double> lx(std::log(1e-2), std::log(2e3));
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const int m = md(rng);
    const double x = std::exp(lx(rng));
    const auto p = specfun::bessel_jy_scaled(m, x);
    const double w = 2.0 / (std::numbers::pi * x);
    const double p1 = p.j * p.yp, p2 = p.jp * p.y;
    const double scale = std::max({std::abs(p1), std::abs(p2), w});
    worst = std::max(worst, std::abs(p1 - p2 - w) / scale);
  }
  return worst;
}

/// Max |u_s| for q = 0 and a plane wave.
inline double zero_potential_field(double k, double eps) {
  const RadialPotential q = zero_potential(1.0);
  const SolverState s = solve_scattering(q, plane_wave(k), k, eps);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double r = 0.05 * i, th = 0.37 * i;
    worst = std::max(worst, std::abs(s.scattered(r * std::cos(th), r * std::sin(th))));
  }
  return worst;
}

/// Relative error of the total field against the disk series.
inline double disk_error(double k, double c, double b) {
  const SolverState s = solve_scattering(constant_disk(c, b), plane_wave(k), k, 1e-13);
  const IncidentField inc = plane_wave(k);
  double err = 0.0, nrm = 0.0;
  for (int i = 0; i < 40; ++i) {
    const double r = 0.05 * i + 0.013, th = 0.71 * i;
    const double x = r * std::cos(th), y = r * std::sin(th);
    cplx ref = inc(x, y);
    for (int m = -40; m <= 40; ++m) {
      ref += disk_mode(m, k, c, b, inc.analytic_modes(m)).scattered(r) * std::exp(cplx(0.0, m * th)) / kTwoPi;
    }
    err = std::max(err, std::abs(s.total(x, y) - ref));
    nrm = std::max(nrm, std::abs(ref));
  }
  return err / nrm;
}

/// Applies the radial operator by central differences to greens_apply(g) and
/// returns the error at steps h and h/2.
inline std::pair<double, double> greens_errors(int m, double k) {
  const double b = 3.0;
  auto g = [](double t) -> cplx {
    if (t <= 0.5 || t >= 2.5) return 0.0;
    const double s = (t - 0.5) / 2.0;
    return std::exp(-1.0 / (s * (1.0 - s))) * cplx(1.0, 0.5 * t);
  };
  const RadialField u = greens_apply(m, k, g, b);
  auto err = [&](double h) {
    double e = 0.0;
    for (double r : {0.9, 1.3, 1.7, 2.1}) {
      const cplx d2 = (u(r + h) - 2.0 * u(r) + u(r - h)) / (h * h);
      const cplx d1 = (u(r + h) - u(r - h)) / (2.0 * h);
      e = std::max(e, std::abs(d2 + d1 / r + (k * k - double(m) * m / (r * r)) * u(r) - g(r)));
    }
    return e;
  };
  return {err(0.02), err(0.01)};
}

/// Relative difference between the hierarchical density and one dense solve
/// over the same panels.
inline double merge_vs_dense(int m, double k) {
  const RadialPotential q([](double r) { return 1.0 - r * r; }, 1.0, {}, "parabolic");
  ModeOptions opt;
  const auto data = solve_unit_mode(m, k, q, opt);
  Partition part = adaptive_partition(m, k, q, q.support_radius(), opt.eps, opt);
  const int P = static_cast<int>(part.panels.size());
  const int n = part.panels.empty() ? 0 : part.panels[0].panel.size();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(P * n, P * n);
  Eigen::VectorXcd rhs(P * n);
  for (int a = 0; a < P; ++a) {
    const PanelSamples& sa = part.panels[a];
    for (int b = 0; b < P; ++b) {
      const PanelSamples& sb = part.panels[b];
      Eigen::MatrixXcd K;
      if (a == b) {
        K = detail::local_operator(sa.panel, sa.j, sa.hs);
      } else {
        K.resize(n, n);
        const auto& w = sb.panel.weights();
        const auto& t = sb.panel.nodes();
        // Panels are ordered outside in: b > a means b lies inside a.
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            K(i, j) = b > a ? sa.hs[i] * sb.j[j] * w[j] * t[j] : sa.j[i] * sb.hs[j] * w[j] * t[j];
          }
        }
      }
      for (int i = 0; i < n; ++i) A.block(a * n + i, b * n, 1, n) += k * k * sa.q[i] * K.row(i);
    }
    for (int i = 0; i < n; ++i) rhs[a * n + i] = -k * k * sa.q[i] * sa.j[i];
  }
  const Eigen::VectorXcd rho = A.partialPivLu().solve(rhs);
  double err = 0.0;
  for (int a = 0; a < P; ++a) {
    const auto& nodes = part.panels[a].panel.nodes();
    for (int i = 1; i + 1 < n; ++i) err = std::max(err, std::abs(data->density(nodes[i]) - rho[a * n + i]));
  }
  return err / std::max(rho.cwiseAbs().maxCoeff(), 1e-300);
}

}  // namespace selftest

/// Runs the invariant suite.
inline std::vector<CheckResult> run_selftest() {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, double v, double lim) { out.push_back({std::move(name), v <= lim, v, lim}); };
  add("wronskian", selftest::wronskian_defect(2000, 7), 1e-12);
  add("zero potential", selftest::zero_potential_field(10.0, 1e-13), 1e-12);
  add("disk series", selftest::disk_error(10.0, 0.5, 1.0), 1e-9);
  {
    const auto [e1, e2] = selftest::greens_errors(3, 4.0);
    const double order = std::log2(e1 / e2);
    out.push_back({"green's function order", std::abs(order - 2.0) <= 0.2, order, 2.0});
  }
  add("merge vs dense", selftest::merge_vs_dense(6, 8.0), 1e-11);
  return out;
}

}  // namespace radscat

#endif  // RADSCAT_SELFTEST_HPP
