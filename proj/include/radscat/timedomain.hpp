#ifndef RADSCAT_TIMEDOMAIN_HPP
#define RADSCAT_TIMEDOMAIN_HPP

// Time-dependent scattering by Fourier synthesis over frequency.
//
// The field solves Delta u - (1 + q) u_tt = f(t) delta(x - x0) with zero
// initial data. Transform pair:
//   f^(k) = (1/2pi) int f(t) e^{ikt} dt,     u(t) = int u~(k) e^{-ikt} dk,
// under which u~ solves Delta u~ + k^2 (1 + q) u~ = f^ delta and the outgoing
// H^(1) solutions of the frequency-domain solver give a causal u. For a real
// source u~(-k) = conj(u~(k)), so only k > 0 is solved.

#include <chrono>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "radscat/assembly.hpp"
#include "radscat/incident.hpp"
#include "radscat/modesolver.hpp"
#include "radscat/parallel.hpp"

namespace radscat {

/// n-point Gauss-Legendre rule on [a, b] (Newton iteration on P_n).
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  std::vector<double> x(n), w(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  // P_n(z) and P_n'(z) by the three-term recurrence.
  auto legendre = [n](double z) {
    double p0 = 1.0, p1 = z;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, n * (z * p1 - p0) / (z * z - 1.0)};
  };
  for (int i = 0; i < n / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(z);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double dp = legendre(z).second;
    x[i] = mid - half * z;
    x[n - 1 - i] = mid + half * z;
    w[i] = w[n - 1 - i] = half * 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (n % 2 == 1) {
    const double dp = n == 1 ? 1.0 : legendre(0.0).second;
    x[n / 2] = mid;
    w[n / 2] = half * 2.0 / (dp * dp);
  }
  return {x, w};
}

/// Point source with Gaussian time profile amplitude e^{-rate (t - t0)^2}.
struct SourceSpectrum {
  double amplitude = std::sqrt(8.0);
  double t0 = 10.0;
  double rate = 4.0;
  double x0 = 10.0, y0 = 10.0;
  double band_limit = 16.0;

  double profile(double t) const { return amplitude * std::exp(-rate * (t - t0) * (t - t0)); }

  /// f^(k) = (A / 2pi) sqrt(pi / rate) e^{-k^2 / (4 rate)} e^{i k t0}.
  cplx operator()(double k) const {
    return amplitude / kTwoPi * std::sqrt(std::numbers::pi / rate) * std::exp(-k * k / (4.0 * rate)) *
           std::exp(cplx(0.0, k * t0));
  }

  /// |f^(K)| / |f^(0)|.
  double band_limit_ratio() const { return std::exp(-band_limit * band_limit / (4.0 * rate)); }
};

inline SourceSpectrum gaussian_pulse_spectrum(double amplitude = std::sqrt(8.0), double t0 = 10.0, double rate = 4.0) {
  if (!(rate > 0.0)) throw std::invalid_argument("gaussian_pulse_spectrum: rate must be positive");
  SourceSpectrum s;
  s.amplitude = amplitude;
  s.t0 = t0;
  s.rate = rate;
  return s;
}

/// Frequency layout on (0, K]: Gauss-Legendre on [2, K] and [1, 2], then
/// dyadic panels [2^-j, 2^{1-j}] for j = 1..levels and a final [0, 2^-levels].
/// The high band needs about 400 nodes: echoes from the rim of a lens arrive
/// with delays past 50, and 200 nodes alias them into early frames at 1e-5.
struct SweepLayout {
  int high = 400;
  int mid = 32;
  int per_level = 16;
  int levels = 30;

  SweepLayout doubled() const { return {2 * high, 2 * mid, 2 * per_level, levels}; }
};

struct FrequencyRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline FrequencyRule frequency_rule(double K, const SweepLayout& layout = {}) {
  if (!(K > 2.0)) throw std::invalid_argument("frequency_rule: band limit must exceed 2");
  FrequencyRule r;
  auto add = [&](int n, double a, double b) {
    auto [x, w] = gauss_legendre(n, a, b);
    r.nodes.insert(r.nodes.end(), x.begin(), x.end());
    r.weights.insert(r.weights.end(), w.begin(), w.end());
  };
  add(layout.per_level, 0.0, std::ldexp(1.0, -layout.levels));
  for (int j = layout.levels; j >= 1; --j) add(layout.per_level, std::ldexp(1.0, -j), std::ldexp(1.0, 1 - j));
  add(layout.mid, 1.0, 2.0);
  add(layout.high, 2.0, K);
  return r;
}

/// Total field u~(x, k_j) at fixed target points for every frequency node.
struct FrequencySweep {
  FrequencyRule rule;
  std::vector<std::pair<double, double>> targets;
  std::vector<std::vector<cplx>> values;  // values[j][p]
  std::vector<int> mode_counts;
  double seconds = 0.0;
};

/// Solves the frequency-domain problem at every node and records the total
/// field at the targets. Unit mode solutions are source independent; the
/// point source enters through its closed-form mode coefficients.
inline FrequencySweep build_sweep(const SourceSpectrum& spec, const RadialPotential& q,
                                  std::vector<std::pair<double, double>> targets, const SweepLayout& layout = {},
                                  double eps = 1e-13, int threads = 1) {
  const double b = q.support_radius();
  if (std::hypot(spec.x0, spec.y0) <= b) throw std::invalid_argument("build_sweep: source inside the scatterer ball");
  FrequencySweep sw;
  sw.rule = frequency_rule(spec.band_limit, layout);
  sw.targets = std::move(targets);
  const int n = static_cast<int>(sw.rule.nodes.size());
  sw.values.assign(n, {});
  sw.mode_counts.assign(n, 0);
  const auto t0 = std::chrono::steady_clock::now();
  // Frequencies are independent; each node is solved single-threaded.
  parallel_for(n, threads, [&](int j) {
    const double k = sw.rule.nodes[j];
    const IncidentField src = point_source_incident(k, spec.x0, spec.y0, spec(k));
    SolveOptions opt;
    opt.eps = eps;
    try {
      const SolverState st = solve_scattering(q, src, k, eps, opt);
      std::vector<cplx> v(sw.targets.size());
      for (std::size_t p = 0; p < v.size(); ++p) v[p] = st.total(sw.targets[p].first, sw.targets[p].second);
      sw.values[j] = std::move(v);
      sw.mode_counts[j] = st.M();
    } catch (const std::exception& e) {
      throw std::runtime_error("frequency node " + std::to_string(j) + " (k = " + std::to_string(k) + "): " + e.what());
    }
  });
  sw.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sw;
}

/// One synthesized frame: u(x, t) at every target, plus the imaginary part
/// of the explicitly two-sided sum as a realness diagnostic.
struct Frame {
  double t = 0.0;
  std::vector<double> values;
  double imag_residue = 0.0;
};

/// u(x, t) = sum_j w_j [e^{-i k_j t} u~(k_j) + e^{i k_j t} conj(u~(k_j))].
inline Frame synthesize(const FrequencySweep& sw, double t) {
  Frame f;
  f.t = t;
  const std::size_t P = sw.targets.size();
  std::vector<cplx> acc(P, cplx{});
  for (std::size_t j = 0; j < sw.rule.nodes.size(); ++j) {
    const cplx e = std::exp(cplx(0.0, -sw.rule.nodes[j] * t));
    const double w = sw.rule.weights[j];
    const auto& v = sw.values[j];
    for (std::size_t p = 0; p < P; ++p) acc[p] += w * (e * v[p] + std::conj(e) * std::conj(v[p]));
  }
  f.values.resize(P);
  for (std::size_t p = 0; p < P; ++p) {
    f.values[p] = acc[p].real();
    f.imag_residue = std::max(f.imag_residue, std::abs(acc[p].imag()));
  }
  return f;
}

inline std::vector<Frame> synthesize(const FrequencySweep& sw, const std::vector<double>& times) {
  std::vector<Frame> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(synthesize(sw, t));
  return out;
}

/// Grid points in row-major order, for sweeps whose targets are a grid.
inline std::vector<std::pair<double, double>> grid_points(const Grid& g) {
  std::vector<std::pair<double, double>> p;
  p.reserve(g.size());
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) p.emplace_back(g.x(i), g.y(j));
  }
  return p;
}

}  // namespace radscat

#endif  // RADSCAT_TIMEDOMAIN_HPP
