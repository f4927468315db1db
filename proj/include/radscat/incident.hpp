#ifndef RADSCAT_INCIDENT_HPP
#define RADSCAT_INCIDENT_HPP

// Incident fields and their angular mode coefficients.
//
// Mode convention: an incident field regular at the origin is written as
//   u_i(r, theta) = (1/2pi) sum_m c_m J_|m|(kr) e^{i m theta},
// so c_m J_|m|(kr) = int_0^{2pi} e^{-i m theta} u_i(r, theta) dtheta.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "radscat/chebyshev.hpp"
#include "radscat/potentials.hpp"
#include "radscat/specfun.hpp"

namespace radscat {

enum class SourceKind { plane_wave, gaussian_beam, point_source, custom };

inline std::string to_string(SourceKind k) {
  switch (k) {
    case SourceKind::plane_wave: return "plane";
    case SourceKind::gaussian_beam: return "beam";
    case SourceKind::point_source: return "point";
    case SourceKind::custom: return "custom";
  }
  return "unknown";
}

struct IncidentField {
  SourceKind kind = SourceKind::custom;
  double k = 0.0;
  std::string label;
  std::function<cplx(double, double)> eval;
  std::function<cplx(int)> analytic_modes;  // c_m in closed form, if known

  double angle = 0.0;             // plane wave direction
  double x0 = 0.0, y0 = 0.0;      // point source location
  cplx amplitude = 1.0;           // point source strength

  cplx operator()(double x, double y) const { return eval(x, y); }
  bool has_analytic_modes() const { return static_cast<bool>(analytic_modes); }
};

inline cplx i_pow(int n) {
  static constexpr cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[((n % 4) + 4) % 4];
}

/// exp(ik(x cos a + y sin a)); the default direction is (1/2, sqrt(3)/2).
inline IncidentField plane_wave(double k, double angle = std::numbers::pi / 3.0) {
  if (!(k > 0.0)) throw std::invalid_argument("plane_wave: k must be positive");
  IncidentField f;
  f.kind = SourceKind::plane_wave;
  f.k = k;
  f.angle = angle;
  f.label = "plane(" + std::to_string(angle) + ")";
  const double cx = std::cos(angle), sy = std::sin(angle);
  f.eval = [k, cx, sy](double x, double y) { return std::exp(cplx(0.0, k * (x * cx + y * sy))); };
  f.analytic_modes = [angle](int m) {
    return kTwoPi * i_pow(std::abs(m)) * std::exp(cplx(0.0, -m * angle));
  };
  return f;
}

namespace detail {

/// H_0^(1)(z) e^{-shift} for complex z, Re z > 0. Large |z| uses Hankel's
/// expansion with the exponential combined with the shift so that beams with
/// large imaginary source offsets stay in range; small |z| uses the
/// ascending series in long double.
inline cplx hankel0_complex(cplx z, double shift = 0.0) {
  const double az = std::abs(z);
  if (az == 0.0) throw std::domain_error("hankel0: zero argument");
  if (az > 17.0) {
    // sum_k i^k a_k / z^k, a_k = prod_{j=1..k} (-(2j-1)^2) / (k! 8^k)
    cplx sum = 1.0, term = 1.0;
    double prev = 1.0;
    for (int n = 1; n < 60; ++n) {
      const double c = -double(2 * n - 1) * (2 * n - 1) / (8.0 * n);
      term *= cplx(0.0, c) / z;
      const double a = std::abs(term);
      if (a > prev) break;
      sum += term;
      prev = a;
      if (a < 1e-18) break;
    }
    const cplx phase = std::exp(cplx(0.0, 1.0) * (z - std::numbers::pi / 4.0) - shift);
    return std::sqrt(2.0 / (std::numbers::pi * z)) * phase * sum;
  }
  using ld = long double;
  using lc = std::complex<long double>;
  const lc zz(z.real(), z.imag());
  const lc q = -zz * zz / ld(4);
  lc term = 1, j0 = 1, y0sum = 0;
  ld harmonic = 0;
  for (int n = 1; n < 200; ++n) {
    term *= q / ld(ld(n) * n);
    harmonic += ld(1) / n;
    j0 += term;
    y0sum -= harmonic * term;
    if (std::abs(term) * harmonic < 1e-22L * std::abs(j0)) break;
  }
  constexpr ld euler = 0.5772156649015328606065120900824024L;
  const ld two_pi = 2.0L / std::numbers::pi_v<ld>;
  const lc y0 = two_pi * ((std::log(zz / ld(2)) + euler) * j0 - y0sum);
  const lc h = (j0 + lc(0, 1) * y0) * std::exp(-ld(shift));
  return {static_cast<double>(h.real()), static_cast<double>(h.imag())};
}

}  // namespace detail

/// Complex-source beam H_0(k sqrt((x + 16 - 8i)^2 + y^2)) e^{-7.859 k}.
inline IncidentField gaussian_beam(double k) {
  if (!(k > 0.0)) throw std::invalid_argument("gaussian_beam: k must be positive");
  IncidentField f;
  f.kind = SourceKind::gaussian_beam;
  f.k = k;
  f.label = "beam";
  f.eval = [k](double x, double y) {
    const cplx a = cplx(x + 16.0, -8.0);
    const cplx s = std::sqrt(a * a + y * y);
    if (s.real() <= 0.0) throw std::domain_error("gaussian_beam: point on the branch cut");
    return detail::hankel0_complex(k * s, 7.859 * k);
  };
  return f;
}

/// Outgoing point source A (-i/4) H_0(k |x - x0|), so (Delta + k^2) u = A delta.
inline IncidentField point_source_incident(double k, double x0, double y0, cplx amplitude) {
  if (!(k > 0.0)) throw std::invalid_argument("point_source_incident: k must be positive");
  IncidentField f;
  f.kind = SourceKind::point_source;
  f.k = k;
  f.x0 = x0;
  f.y0 = y0;
  f.amplitude = amplitude;
  f.label = "point(" + std::to_string(x0) + "," + std::to_string(y0) + ")";
  const cplx g = amplitude * cplx(0.0, -0.25);
  f.eval = [k, x0, y0, g](double x, double y) {
    const double d = std::hypot(x - x0, y - y0);
    if (d == 0.0) throw std::domain_error("point source: evaluation at the source");
    return g * specfun::hankel1(0, k * d);
  };
  // Graf's addition theorem: H_0(k|x - x0|) = sum_m H_m(k r0) J_m(kr) e^{im(theta - theta0)}.
  const double r0 = std::hypot(x0, y0);
  const double th0 = std::atan2(y0, x0);
  f.analytic_modes = [k, r0, th0, g](int m) {
    return kTwoPi * g * specfun::hankel1(std::abs(m), k * r0) * std::exp(cplx(0.0, -m * th0));
  };
  return f;
}

/// Mode data of an incident field.
struct RingModes {
  int M = 0;                 // retained orders |m| <= M
  int samples = 0;           // ring samples used
  double radius = 0.0;
  std::vector<cplx> ring;    // ring coefficients at `radius`, index m + M
  std::vector<cplx> coeffs;  // c_m, index m + M

  cplx c(int m) const { return std::abs(m) > M ? cplx{} : coeffs[m + M]; }
  int count() const { return 2 * M + 1; }
};

/// ũ_m = (2pi/n) sum_j u(R, theta_j) e^{-i m theta_j} for all m (FFT order).
inline std::vector<cplx> ring_fft(const IncidentField& f, double R, int n, double* field_max = nullptr) {
  std::vector<cplx> v(n);
  double vmax = 0.0;
  for (int j = 0; j < n; ++j) {
    const double th = kTwoPi * j / n;
    v[j] = f(R * std::cos(th), R * std::sin(th));
    vmax = std::max(vmax, std::abs(v[j]));
  }
  if (field_max) *field_max = vmax;
  Eigen::FFT<double> fft;
  std::vector<cplx> out;
  fft.fwd(out, v);
  const double scale = kTwoPi / n;
  for (auto& c : out) c *= scale;
  return out;
}

/// Smallest M with |ũ_j| / 2pi < (eps/10) max_theta |u| for every FFT index j
/// in [M, n - M], or nullopt if none exists below n/2. The threshold is
/// relative to the field's peak on the ring, so it does not depend on the
/// source amplitude, and it sits above the rounding noise of the samples.
inline std::optional<int> truncation_order(const std::vector<cplx>& u, double eps, double field_max) {
  const int n = static_cast<int>(u.size());
  if (field_max == 0.0) return 0;
  const double thresh = eps / 10.0 * field_max * kTwoPi;
  const int half = n / 2;
  int last_big = -1;
  for (int m = 0; m <= half; ++m) {
    if (std::abs(u[m]) >= thresh || std::abs(u[(n - m) % n]) >= thresh) last_big = m;
  }
  if (last_big >= half - 1) return std::nullopt;
  return last_big + 1;
}

struct RingOptions {
  int n0 = 4000;
  int max_doublings = 4;
  std::vector<double> probe_factors = {1.0, 1.05, 1.15};
};

/// Samples u_i on the circle of radius R, chooses the truncation order M and
/// computes c_m for |m| <= M. With a closed form available c_m comes from it;
/// otherwise by least squares over the probe radii so that zeros of J_m at a
/// single radius do no harm.
inline RingModes ring_modes(const IncidentField& f, double R, double eps, const RingOptions& opt = {}) {
  if (!(R > 0.0)) throw std::invalid_argument("ring_modes: radius must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("ring_modes: eps must be positive");
  int n = opt.n0;
  std::vector<cplx> u;
  std::optional<int> M;
  for (int d = 0; d <= opt.max_doublings; ++d, n *= 2) {
    double umax = 0.0;
    u = ring_fft(f, R, n, &umax);
    M = truncation_order(u, eps, umax);
    if (M) break;
  }
  if (!M) throw std::runtime_error("ring_modes: incident field is not resolved by " + std::to_string(n / 2) + " samples");
  RingModes out;
  out.M = *M;
  out.samples = static_cast<int>(u.size());
  out.radius = R;
  const int N = out.samples;
  out.ring.resize(2 * out.M + 1);
  for (int m = -out.M; m <= out.M; ++m) out.ring[m + out.M] = u[(m + N) % N];
  out.coeffs.assign(2 * out.M + 1, cplx{});
  if (f.has_analytic_modes()) {
    for (int m = -out.M; m <= out.M; ++m) out.coeffs[m + out.M] = f.analytic_modes(m);
    return out;
  }
  std::vector<std::vector<cplx>> probes;
  std::vector<double> radii;
  for (double fac : opt.probe_factors) {
    radii.push_back(fac * R);
    probes.push_back(fac == 1.0 ? u : ring_fft(f, fac * R, N));
  }
  for (int m = -out.M; m <= out.M; ++m) {
    cplx num = 0.0;
    double den = 0.0;
    for (std::size_t p = 0; p < radii.size(); ++p) {
      const double jm = specfun::bessel_j(std::abs(m), f.k * radii[p]);
      num += jm * probes[p][(m + N) % N];
      den += jm * jm;
    }
    out.coeffs[m + out.M] = den > 0.0 ? num / den : cplx{};
  }
  return out;
}

/// Coefficients from the sampled field even when a closed form exists; used to
/// cross-check the two.
inline RingModes ring_modes_sampled(IncidentField f, double R, double eps, const RingOptions& opt = {}) {
  f.analytic_modes = nullptr;
  return ring_modes(f, R, eps, opt);
}

}  // namespace radscat

#endif  // RADSCAT_INCIDENT_HPP
