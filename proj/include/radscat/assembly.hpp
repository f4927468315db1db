#ifndef RADSCAT_ASSEMBLY_HPP
#define RADSCAT_ASSEMBLY_HPP

// Full two-dimensional solve: mode extraction, per-mode solves, field
// assembly on grids and the PDE residual map.

#include <chrono>
#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "radscat/incident.hpp"
#include "radscat/modesolver.hpp"
#include "radscat/parallel.hpp"
#include "radscat/potentials.hpp"

namespace radscat {

struct SolveOptions {
  double eps = 1e-13;
  int threads = 1;
  bool keep_density = false;
  RingOptions ring;
};

/// A solved scattering problem; immutable and shareable across threads.
class SolverState {
 public:
  SolverState(RadialPotential q, IncidentField src, double eps, RingModes modes,
              std::vector<std::shared_ptr<const ModeData>> unit, double seconds)
      : q_(std::move(q)), src_(std::move(src)), eps_(eps), modes_(std::move(modes)), unit_(std::move(unit)),
        seconds_(seconds) {}

  const RadialPotential& potential() const { return q_; }
  const IncidentField& source() const { return src_; }
  double k() const { return src_.k; }
  double eps() const { return eps_; }
  double b() const { return q_.support_radius(); }
  const RingModes& modes() const { return modes_; }
  int M() const { return modes_.M; }
  double solve_seconds() const { return seconds_; }
  const ModeData& unit(int m) const { return *unit_.at(std::abs(m)); }

  ModeSolution mode(int m) const {
    if (std::abs(m) > modes_.M) throw std::out_of_range("SolverState: mode outside the retained range");
    return {unit_[std::abs(m)], m, modes_.c(m)};
  }

  /// Panel counts per non-negative order.
  std::vector<int> panel_counts() const {
    std::vector<int> n;
    for (const auto& u : unit_) n.push_back(static_cast<int>(u->panels.size()));
    return n;
  }

  /// u_s = (1/2pi) sum_{|m| <= M} c_m u_|m|(r) e^{i m theta}.
  cplx scattered(double x, double y) const {
    const double r = std::hypot(x, y);
    const int M = modes_.M;
    std::vector<cplx> radial(M + 1);
    if (r >= b()) {
      const auto t = specfun::bessel_jy_all(M, k() * r);
      for (int m = 0; m <= M; ++m) radial[m] = unit_[m]->negligible ? cplx{} : unit_[m]->mu * cplx(t.j[m], t.y[m]);
    } else {
      specfun::BesselTable t;
      bool have_table = false;
      for (int m = 0; m <= M; ++m) {
        const ModeData& d = *unit_[m];
        if (d.negligible) continue;
        const int i = d.locate(r);
        if (i >= 0) {
          radial[m] = d.panels[i].u(r);
          continue;
        }
        if (r == 0.0) {
          radial[m] = m == 0 ? d.beta : cplx{};
          continue;
        }
        if (!have_table) {
          t = specfun::bessel_jy_all(M, k() * r);
          have_table = true;
        }
        radial[m] = d.beta * t.j[m];
      }
    }
    return sum_modes(radial, std::atan2(y, x));
  }

  /// u_s and its radial derivative for r >= b, from the exterior form.
  std::pair<cplx, cplx> scattered_exterior(double x, double y) const {
    const double r = std::hypot(x, y);
    if (r < b()) throw std::domain_error("scattered_exterior: point inside the support");
    const int M = modes_.M;
    const auto t = specfun::bessel_jy_all(M + 1, k() * r);
    std::vector<cplx> val(M + 1), der(M + 1);
    for (int m = 0; m <= M; ++m) {
      if (unit_[m]->negligible) continue;
      const cplx h(t.j[m], t.y[m]);
      const cplx h1(t.j[m + 1], t.y[m + 1]);
      val[m] = unit_[m]->mu * h;
      der[m] = unit_[m]->mu * k() * (m / (k() * r) * h - h1);
    }
    const double th = std::atan2(y, x);
    return {sum_modes(val, th), sum_modes(der, th)};
  }

  cplx incident(double x, double y) const { return src_(x, y); }
  cplx total(double x, double y) const { return incident(x, y) + scattered(x, y); }

 private:
  cplx sum_modes(const std::vector<cplx>& radial, double theta) const {
    const int M = modes_.M;
    const cplx step = std::exp(cplx(0.0, theta));
    cplx e = 1.0;  // e^{i m theta}
    cplx sum = radial[0] == cplx{} ? cplx{} : modes_.c(0) * radial[0];
    for (int m = 1; m <= M; ++m) {
      if (m % 64 == 0) {
        e = std::exp(cplx(0.0, m * theta));
      } else {
        e *= step;
      }
      // Orders whose radial part vanishes may carry huge or infinite c_m.
      if (radial[m] == cplx{}) continue;
      sum += radial[m] * (modes_.c(m) * e + modes_.c(-m) * std::conj(e));
    }
    return sum / kTwoPi;
  }

  RadialPotential q_;
  IncidentField src_;
  double eps_;
  RingModes modes_;
  std::vector<std::shared_ptr<const ModeData>> unit_;
  double seconds_;
};

/// Unit-source solutions for orders 0..M.
inline std::vector<std::shared_ptr<const ModeData>> solve_unit_modes(int M, double k, const RadialPotential& q,
                                                                    const ModeOptions& mopt, int threads) {
  std::vector<std::shared_ptr<const ModeData>> unit(M + 1);
  parallel_for(M + 1, threads, [&](int m) { unit[m] = solve_unit_mode(m, k, q, mopt); });
  return unit;
}

inline SolverState solve_scattering(const RadialPotential& q, const IncidentField& src, double k, double eps,
                                    SolveOptions opt = {}) {
  if (!(k > 0.0)) throw std::invalid_argument("solve_scattering: k must be positive");
  if (std::abs(src.k - k) > 1e-14 * k) throw std::invalid_argument("solve_scattering: source built for another k");
  opt.eps = eps;
  const auto t0 = std::chrono::steady_clock::now();
  RingModes modes = ring_modes(src, q.support_radius(), eps, opt.ring);
  ModeOptions mopt;
  mopt.eps = eps;
  mopt.keep_density = opt.keep_density;
  auto unit = solve_unit_modes(modes.M, k, q, mopt, opt.threads);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {q, src, eps, std::move(modes), std::move(unit), secs};
}

/// Regular lattice; point (i, j) is (xmin + i dx, ymin + j dy).
struct Grid {
  int nx = 2, ny = 2;
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;

  static Grid square(int nx, int ny, double extent) {
    Grid g{nx, ny, -extent, extent, -extent, extent};
    g.validate();
    return g;
  }

  void validate() const {
    if (nx < 2 || ny < 2) throw std::invalid_argument("grid: need at least 2 points per axis");
    if (!(xmax > xmin) || !(ymax > ymin)) throw std::invalid_argument("grid: extent must be positive");
  }
  double dx() const { return (xmax - xmin) / (nx - 1); }
  double dy() const { return (ymax - ymin) / (ny - 1); }
  double x(int i) const { return i == nx - 1 ? xmax : xmin + i * dx(); }
  double y(int j) const { return j == ny - 1 ? ymax : ymin + j * dy(); }
  std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
  std::size_t index(int i, int j) const { return std::size_t(j) * nx + i; }
};

enum class FieldPart { scattered, total, incident };

struct WaveField {
  Grid grid;
  double k = 0.0;
  std::vector<cplx> values;  // row-major in y, index(i, j)
};

inline WaveField evaluate_field(const SolverState& s, const Grid& grid, FieldPart part, int threads = 1) {
  grid.validate();
  WaveField f{grid, s.k(), std::vector<cplx>(grid.size())};
  parallel_for(grid.ny, threads, [&](int j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.x(i), y = grid.y(j);
      cplx v;
      switch (part) {
        case FieldPart::scattered: v = s.scattered(x, y); break;
        case FieldPart::incident: v = s.incident(x, y); break;
        default: v = s.total(x, y); break;
      }
      f.values[grid.index(i, j)] = v;
    }
  });
  return f;
}

inline std::vector<cplx> eval_scattered(const SolverState& s, const std::vector<std::pair<double, double>>& pts,
                                        int threads = 1) {
  std::vector<cplx> out(pts.size());
  parallel_for(static_cast<int>(pts.size()), threads, [&](int i) { out[i] = s.scattered(pts[i].first, pts[i].second); });
  return out;
}

struct ResidualOptions {
  double h = 0.0;           // FD step; 0 picks 0.1 / k
  bool extrapolate = true;  // Richardson over h, h/2, h/4
  double exclusion = 2.0;   // mask points within exclusion * h of a breakpoint or of r = b
  int threads = 1;
};

struct ResidualMap {
  Grid grid;
  double h = 0.0;
  std::vector<double> values;  // E = |(1/k^2) Delta u + (1 + q) u|
  std::vector<bool> masked;    // near a jump of q
};

namespace detail {

template <typename Field>
cplx laplacian_5pt(const Field& u, double x, double y, double h, cplx centre) {
  return (u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h) - 4.0 * centre) / (h * h);
}

/// 5-point Laplacian, optionally extrapolated over h, h/2, h/4 to sixth order.
template <typename Field>
cplx laplacian(const Field& u, double x, double y, double h, bool extrapolate, cplx centre) {
  const cplx l1 = laplacian_5pt(u, x, y, h, centre);
  if (!extrapolate) return l1;
  const cplx l2 = laplacian_5pt(u, x, y, h / 2, centre);
  const cplx l3 = laplacian_5pt(u, x, y, h / 4, centre);
  const cplx a = (4.0 * l2 - l1) / 3.0;
  const cplx b = (4.0 * l3 - l2) / 3.0;
  return (16.0 * b - a) / 15.0;
}

/// True within `width` of a breakpoint of q, or of r = b when q jumps there.
inline bool near_jump(const RadialPotential& q, double r, double width) {
  if (q.identically_zero()) return false;
  const double b = q.support_radius();
  if (std::abs(r - b) < width && std::abs(q(std::nextafter(b, 0.0))) > 1e-12) return true;
  for (double bp : q.breakpoints()) {
    if (std::abs(r - bp) < width) return true;
  }
  return false;
}

}  // namespace detail

/// E(x) = |(1/k^2) Delta_h u + (1 + q) u| for a field u and contrast q.
template <typename Field>
ResidualMap residual_of(const Field& u, const RadialPotential& q, double k, const Grid& grid, ResidualOptions opt) {
  grid.validate();
  if (opt.h <= 0.0) opt.h = 0.1 / k;
  ResidualMap out{grid, opt.h, std::vector<double>(grid.size()), std::vector<bool>(grid.size())};
  std::vector<char> mask(grid.size());
  parallel_for(grid.ny, opt.threads, [&](int j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.x(i), y = grid.y(j);
      const double r = std::hypot(x, y);
      const cplx c = u(x, y);
      const cplx lap = detail::laplacian(u, x, y, opt.h, opt.extrapolate, c);
      out.values[grid.index(i, j)] = std::abs(lap / (k * k) + (1.0 + q(r)) * c);
      mask[grid.index(i, j)] = detail::near_jump(q, r, opt.exclusion * opt.h);
    }
  });
  for (std::size_t n = 0; n < mask.size(); ++n) out.masked[n] = mask[n] != 0;
  return out;
}

/// Residual of the total field of a solved problem.
inline ResidualMap residual_map(const SolverState& s, const Grid& grid, ResidualOptions opt = {}) {
  auto u = [&s](double x, double y) { return s.total(x, y); };
  return residual_of(u, s.potential(), s.k(), grid, opt);
}

/// Finite-difference floor: the same residual applied to the incident field
/// with q = 0.
inline ResidualMap residual_floor(const SolverState& s, const Grid& grid, ResidualOptions opt = {}) {
  auto u = [&s](double x, double y) { return s.incident(x, y); };
  return residual_of(u, zero_potential(s.b()), s.k(), grid, opt);
}

/// Net outgoing flux Im int conj(u_s) d_r u_s ds over the circle of radius
/// rho >= b, by the trapezoidal rule with n points.
inline double outgoing_flux(const SolverState& s, double rho, int n = 0) {
  if (n <= 0) n = 4 * s.M() + 64;
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    const double th = kTwoPi * j / n;
    const auto [u, ur] = s.scattered_exterior(rho * std::cos(th), rho * std::sin(th));
    total += std::imag(std::conj(u) * ur);
  }
  return total * rho * kTwoPi / n;
}

}  // namespace radscat

#endif  // RADSCAT_ASSEMBLY_HPP
