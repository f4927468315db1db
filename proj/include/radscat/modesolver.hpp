#ifndef RADSCAT_MODESOLVER_HPP
#define RADSCAT_MODESOLVER_HPP

// Per-mode solver. For a fixed angular order m the scattered mode u_m is
// represented as u_m(r) = int G_m(r, t) rho(t) dt with
//
//   G_m(r, t) = -(i pi / 2) J_m(k min(r, t)) H_m(k max(r, t)) t,
//
// and rho solves the second-kind equation rho + k^2 q (G rho) = -k^2 q f with
// f = J_m(kr) (unit incident mode). The radial range is cut into panels; each
// panel is solved locally and the panels are coupled through 2x2 scattering
// matrices.
//
// Notation on a panel A = [a, c]:
//   Hs(r)   = -(i pi / 2) H_m(kr)
//   phi_l   = int_0^a J rho t dt          (incoming from inside)
//   phi_r   = int_c^inf Hs rho t dt       (incoming from outside)
//   alpha_l = int_A J rho t dt,  alpha_r = int_A Hs rho t dt
// so that on A: rho = -phi_l sol_H - phi_r sol_J + V and alpha = S phi + chi.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "radscat/chebyshev.hpp"
#include "radscat/error.hpp"
#include "radscat/potentials.hpp"
#include "radscat/specfun.hpp"

namespace radscat {

using Vec2 = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2cd;
using Vec4 = Eigen::Matrix<cplx, 4, 1>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Mat42 = Eigen::Matrix<cplx, 4, 2>;

inline constexpr cplx kMinusHalfIPi{0.0, -std::numbers::pi / 2.0};

/// G_m(r, t) = -(i pi/2) J_m(k min) H_m(k max) t for r, t > 0. Evaluated with
/// scaled Bessel pairs so that J underflow and Y overflow cancel.
inline cplx kernel(int m, double k, double r, double t) {
  if (!(r > 0.0) || !(t > 0.0)) throw std::domain_error("kernel: r and t must be positive");
  if (!(k > 0.0)) throw std::domain_error("kernel: k must be positive");
  const int am = std::abs(m);
  const auto a = specfun::bessel_jy_scaled(am, k * std::min(r, t));
  const auto b = specfun::bessel_jy_scaled(am, k * std::max(r, t));
  const double jj = std::ldexp(a.j * b.j, -a.exponent - b.exponent);
  const double jy = std::ldexp(a.j * b.y, b.exponent - a.exponent);
  return kMinusHalfIPi * cplx(jj, jy) * t;
}

/// Solver tolerances and switches.
struct ModeOptions {
  double eps = 1e-13;
  bool keep_density = true;  // retain the rho expansions
  double min_panel = 1e-14;  // relative to the panel's outer radius: smaller is a failure
  double merge_remainder = 1e-12;  // relative to b: shorter leftovers are absorbed
};

/// Samples of q, J_m(kr) and Hs(r) at the nodes of one panel.
struct PanelSamples {
  ChebPanel panel;
  std::vector<double> q;
  std::vector<double> j;
  std::vector<cplx> hs;
  bool q_zero = true;
};

namespace detail {

/// q at the panel nodes; endpoints are taken from inside the panel so that a
/// jump located at an endpoint never leaks into the neighbouring panel.
inline std::vector<double> sample_potential(const RadialPotential& q, const ChebPanel& panel) {
  std::vector<double> v(panel.size());
  const auto& x = panel.nodes();
  for (int i = 0; i < panel.size(); ++i) {
    double r = x[i];
    if (i == 0) r = std::nextafter(panel.lo(), panel.hi());
    if (i == panel.size() - 1) r = std::nextafter(panel.hi(), panel.lo());
    v[i] = q(r);
    if (!std::isfinite(v[i])) throw SolverError("potential is not finite at r = " + std::to_string(r));
  }
  return v;
}

/// J_m(kr) and -(i pi/2) H_m(kr) at the nodes. A node at r = 0 gets Hs = 0;
/// it only ever multiplies a vanishing integral or the weight t = 0.
inline void sample_bessel(int m, double k, const ChebPanel& panel, std::vector<double>& j, std::vector<cplx>& hs) {
  const int n = panel.size();
  j.resize(n);
  hs.resize(n);
  for (int i = 0; i < n; ++i) {
    const double r = panel.nodes()[i];
    if (r == 0.0) {
      j[i] = (m == 0) ? 1.0 : 0.0;
      hs[i] = 0.0;
      continue;
    }
    const auto p = specfun::bessel_jy(m, k * r);
    j[i] = p.j;
    hs[i] = kMinusHalfIPi * cplx(p.j, p.y);
  }
}

inline double dense_abs_max(const RadialPotential& q, const ChebPanel& panel, const std::vector<double>& at_nodes,
                            int samples = 128) {
  double best = 0.0;
  for (double v : at_nodes) best = std::max(best, std::abs(v));
  for (int i = 1; i < samples; ++i) {
    const double r = panel.lo() + panel.length() * i / samples;
    best = std::max(best, std::abs(q(r)));
  }
  return best;
}

}  // namespace detail

inline PanelSamples sample_panel(int m, double k, const RadialPotential& q, const ChebPanel& panel) {
  PanelSamples s;
  s.panel = panel;
  s.q = detail::sample_potential(q, panel);
  if (!std::all_of(s.q.begin(), s.q.end(), [](double v) { return std::isfinite(v); })) {
    throw SolverError("potential is not finite on the panel", m, panel.lo(), panel.hi());
  }
  s.q_zero = q.identically_zero() || std::all_of(s.q.begin(), s.q.end(), [](double v) { return v == 0.0; });
  detail::sample_bessel(std::abs(m), k, panel, s.j, s.hs);
  return s;
}

/// Largest of the three scaled coefficient tails (q, J, H) on a sampled panel.
/// On a panel touching r = 0 the H test is applied to t H_m(kt), the form in
/// which H enters every integral, because H itself is unbounded there.
inline double panel_tail(const RadialPotential& q, const PanelSamples& s) {
  const ChebPanel& p = s.panel;
  const double len = p.length();
  double worst = 0.0;
  if (!s.q_zero) {
    const double qmax = detail::dense_abs_max(q, p, s.q);
    const auto c = cheb_coeffs_of(p.rule(), std::span<const double>(s.q));
    worst = std::max(worst, resolved_coeffs(c, qmax, len, 0.0).tail);
  }
  {
    std::vector<cplx> jv(s.j.begin(), s.j.end());
    const ChebExpansion e = cheb_coeffs(p, jv);
    worst = std::max(worst, resolved_coeffs(e.coeffs, interpolant_max(e, jv), len, 0.0).tail);
  }
  {
    std::vector<cplx> hv = s.hs;
    if (p.lo() == 0.0) {
      for (int i = 0; i < p.size(); ++i) hv[i] *= p.nodes()[i];
    }
    const ChebExpansion e = cheb_coeffs(p, hv);
    worst = std::max(worst, resolved_coeffs(e.coeffs, interpolant_max(e, hv), len, 0.0).tail);
  }
  return worst;
}

/// R_min = sup{rho : |J_m(kr)| < eps/10 for all r <= rho}, capped at b.
/// |J_m| increases monotonically on [0, m], so bisection on that range finds
/// the crossing.
inline double compute_r_min(int m, double k, double b, double eps) {
  m = std::abs(m);
  if (m == 0) return 0.0;
  const double thresh = eps / 10.0;
  const double xmax = std::min(double(m), k * b);
  if (std::abs(specfun::bessel_j(m, xmax)) < thresh) {
    return xmax >= k * b ? b : xmax / k;
  }
  double lo = 0.0, hi = xmax;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::abs(specfun::bessel_j(m, mid)) < thresh) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo / k;
}

/// Running maximum of the local argument k r sqrt(1 + max(q, 0)) on a grid
/// over [0, b]. Where q > 0 the mode turns oscillatory at smaller r than
/// J_m(kr) suggests, so the inner cutoff must use this argument instead.
class EffectiveArgument {
 public:
  EffectiveArgument(double k, const RadialPotential& q, double b, int n = 8192) : b_(b) {
    // Uniform points plus a geometric approach to 0, where R_min lives for
    // low orders.
    for (int j = 60; j >= 1; --j) {
      if (std::ldexp(b, -j) < b / n) rs_.push_back(std::ldexp(b, -j));
    }
    for (int i = 1; i <= n; ++i) rs_.push_back(i == n ? b : b * i / n);
    xs_.resize(rs_.size());
    auto local = [&](double r) {
      const double v = q(r);
      return std::isfinite(v) ? std::sqrt(1.0 + std::max(v, 0.0)) : std::numeric_limits<double>::infinity();
    };
    // Both one-sided values are used so a jump at a grid point is seen;
    // between grid points the argument is assumed monotone.
    double run = 0.0;
    for (std::size_t i = 0; i < rs_.size(); ++i) {
      const double r = rs_[i];
      double x = k * r;
      if (!q.identically_zero()) x *= std::max(local(std::nextafter(r, 0.0)), r < b ? local(r) : 0.0);
      run = std::max(run, x);
      xs_[i] = run;
    }
    // Breakpoints can hide a narrow high-q layer between grid points.
    if (!q.identically_zero()) {
      for (double bp : q.breakpoints()) {
        if (bp <= 0.0 || bp >= b) continue;
        const double x = k * bp * std::max(local(std::nextafter(bp, 0.0)), local(bp));
        for (auto i = index(bp); i < xs_.size(); ++i) xs_[i] = std::max(xs_[i], x);
      }
    }
  }

  /// Upper bound of the local argument over [0, r].
  double operator()(double r) const {
    if (r <= 0.0) return 0.0;
    return xs_[std::min(index(r), xs_.size() - 1)];
  }

  double b() const { return b_; }

 private:
  std::size_t index(double r) const { return std::lower_bound(rs_.begin(), rs_.end(), r) - rs_.begin(); }

  double b_;
  std::vector<double> rs_, xs_;
};

/// Inner cutoff for a general medium: the largest rho with
/// |J_m(X(rho))| < eps/10 and X(rho) <= m, where X is the running maximum of
/// the local argument. Never exceeds the free-space cutoff.
inline double compute_r_min(int m, const EffectiveArgument& X, double k, double eps) {
  m = std::abs(m);
  if (m == 0) return 0.0;
  const double thresh = eps / 10.0;
  auto below = [&](double rho) {
    const double x = X(rho);
    return x <= m && std::abs(specfun::bessel_j(m, x)) < thresh;
  };
  const double cap = compute_r_min(m, k, X.b(), eps);
  if (below(cap)) return cap;
  double lo = 0.0, hi = cap;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (below(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

/// Result of the adaptive march: panels ordered from the outside in, with
/// their node samples.
struct Partition {
  double b = 0.0;
  double r_min = 0.0;
  std::vector<PanelSamples> panels;  // panels[0] ends at b

  std::vector<double> radii() const {
    std::vector<double> r;
    r.reserve(panels.size() + 1);
    r.push_back(b);
    for (const auto& p : panels) r.push_back(p.panel.lo());
    return r;
  }
};

/// Marches inward from b in steps of at most pi/k, halving each candidate
/// panel until the tail measure is at most eps/10. Breakpoints of q are
/// always panel endpoints.
inline Partition adaptive_partition(int m, double k, const RadialPotential& q, double b, double eps,
                                    const ModeOptions& opt = {}) {
  if (!(b > 0.0)) throw std::invalid_argument("adaptive_partition: b must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("adaptive_partition: eps must be positive");
  if (!(k > 0.0)) throw std::invalid_argument("adaptive_partition: k must be positive");
  m = std::abs(m);
  Partition part;
  part.b = b;
  part.r_min = compute_r_min(m, EffectiveArgument(k, q, b), k, eps);
  if (part.r_min >= b) return part;

  const double tol = eps / 10.0;
  const double absorb = opt.merge_remainder * b;
  const auto& bps = q.breakpoints();
  double R = b;
  while (R > part.r_min) {
    double floor = part.r_min;
    auto it = std::lower_bound(bps.begin(), bps.end(), R);
    if (it != bps.begin()) floor = std::max(floor, *(it - 1));
    if (R - floor <= absorb) floor = part.r_min;  // only reachable if a breakpoint sits within absorb of R
    double r = std::max(R - std::numbers::pi / k, floor);
    if (r - floor < absorb) r = floor;
    PanelSamples s;
    for (;;) {
      s = sample_panel(m, k, q, ChebPanel(r, R));
      if (panel_tail(q, s) <= tol) break;
      r = 0.5 * (R + r);
      // Relative to R so the grading toward r = 0 for low orders is allowed.
      if (R - r < opt.min_panel * R) throw SolverError("adaptive partition did not resolve the potential", m, r, R);
    }
    part.panels.push_back(std::move(s));
    R = r;
  }
  return part;
}

/// Local solve data for one panel.
struct IntervalData {
  ChebPanel panel;
  std::vector<double> q, j;
  std::vector<cplx> hs;
  Eigen::VectorXcd sol_h, sol_j, v;  // F^{-1}(k^2 q Hs), F^{-1}(k^2 q J), V = -F^{-1}(k^2 q f)
  Mat2 s = Mat2::Zero();
  Vec2 chi = Vec2::Zero();
  Vec2 phi = Vec2::Zero();
  Vec2 alpha = Vec2::Zero();
  bool q_zero = true;
};

namespace detail {

/// Discretization of the local operator (G rho)(r_i) = sum_j K_ij rho_j via
/// spectral indefinite integration, which handles the kink of G at t = r.
inline Eigen::MatrixXcd local_operator(const ChebPanel& p, std::span<const double> j, std::span<const cplx> hs) {
  const int n = p.size();
  const Eigen::MatrixXd P = p.integration_matrix();
  const auto& w = p.weights();
  const auto& t = p.nodes();
  Eigen::MatrixXcd K(n, n);
  for (int jj = 0; jj < n; ++jj) {
    const double jt = j[jj] * t[jj];
    const cplx ht = hs[jj] * t[jj];
    for (int i = 0; i < n; ++i) K(i, jj) = hs[i] * (P(i, jj) * jt) + j[i] * ((w[jj] - P(i, jj)) * ht);
  }
  return K;
}

/// Applies the local operator without forming it.
inline Eigen::VectorXcd apply_local(const ChebPanel& p, std::span<const double> j, std::span<const cplx> hs,
                                    const Eigen::VectorXcd& rho) {
  const int n = p.size();
  const Eigen::MatrixXd P = p.integration_matrix();
  const auto& w = p.weights();
  const auto& t = p.nodes();
  Eigen::VectorXcd a(n), c(n);
  for (int i = 0; i < n; ++i) {
    a[i] = j[i] * t[i] * rho[i];
    c[i] = hs[i] * t[i] * rho[i];
  }
  const Eigen::VectorXcd left = P * a;
  cplx total_c = 0.0;
  for (int i = 0; i < n; ++i) total_c += w[i] * c[i];
  const Eigen::VectorXcd right = Eigen::VectorXcd::Constant(n, total_c) - P * c;
  Eigen::VectorXcd out(n);
  for (int i = 0; i < n; ++i) out[i] = hs[i] * left[i] + j[i] * right[i];
  return out;
}

template <typename A, typename B>
cplx weighted_dot(const ChebPanel& p, const A& f, const B& g) {
  cplx s = 0.0;
  for (int i = 0; i < p.size(); ++i) s += p.weights()[i] * p.nodes()[i] * cplx(f[i]) * cplx(g[i]);
  return s;
}

inline bool all_finite(const Eigen::MatrixXcd& a) { return a.allFinite(); }

}  // namespace detail

/// Builds the local solve for one sampled panel.
inline IntervalData build_interval(int m, double k, PanelSamples samples, bool include_source) {
  IntervalData d;
  d.panel = samples.panel;
  d.q = std::move(samples.q);
  d.j = std::move(samples.j);
  d.hs = std::move(samples.hs);
  d.q_zero = samples.q_zero;
  const int n = d.panel.size();
  d.sol_h = Eigen::VectorXcd::Zero(n);
  d.sol_j = Eigen::VectorXcd::Zero(n);
  d.v = Eigen::VectorXcd::Zero(n);
  if (d.q_zero) return d;

  const double k2 = k * k;
  Eigen::MatrixXcd F = detail::local_operator(d.panel, d.j, d.hs);
  for (int i = 0; i < n; ++i) F.row(i) *= k2 * d.q[i];
  F.diagonal().array() += 1.0;
  Eigen::MatrixXcd rhs(n, 2);
  for (int i = 0; i < n; ++i) {
    rhs(i, 0) = k2 * d.q[i] * d.hs[i];
    rhs(i, 1) = k2 * d.q[i] * d.j[i];
  }
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(F);
  const Eigen::MatrixXcd sol = lu.solve(rhs);
  if (!detail::all_finite(sol)) throw SolverError("singular panel matrix", m, d.panel.lo(), d.panel.hi());
  d.sol_h = sol.col(0);
  d.sol_j = sol.col(1);
  d.s(0, 0) = -detail::weighted_dot(d.panel, d.j, d.sol_h);
  d.s(0, 1) = -detail::weighted_dot(d.panel, d.j, d.sol_j);
  d.s(1, 0) = -detail::weighted_dot(d.panel, d.hs, d.sol_h);
  d.s(1, 1) = -detail::weighted_dot(d.panel, d.hs, d.sol_j);
  if (include_source) {
    // The source is the unit incident mode f = J_m, so V = -sol_J.
    d.v = -d.sol_j;
    d.chi = d.s.col(1);
  }
  return d;
}

inline IntervalData build_interval(int m, double k, const ChebPanel& panel, const RadialPotential& q,
                                   bool include_source) {
  return build_interval(m, k, sample_panel(m, k, q, panel), include_source);
}

/// Coupling data of one merge of an inner interval A with an outer one B.
struct MergeResult {
  Mat2 s;
  Vec2 chi;
  Mat42 coupling;  // K^{-1} diag(S_A, S_B) L
  Vec4 source;     // K^{-1} (chi_A, chi_B)
};

/// Merges inner interval A with outer interval B (shared endpoint).
inline MergeResult merge(const Mat2& sa, const Vec2& chia, const Mat2& sb, const Vec2& chib) {
  Mat4 K = Mat4::Identity();
  K(0, 3) = -sa(0, 1);
  K(1, 3) = -sa(1, 1);
  K(2, 0) = -sb(0, 0);
  K(3, 0) = -sb(1, 0);
  Mat42 DL;
  DL.topRows<2>() = sa;
  DL.bottomRows<2>() = sb;
  Vec4 chi;
  chi << chia, chib;
  const Eigen::PartialPivLU<Mat4> lu(K);
  MergeResult r;
  r.coupling = lu.solve(DL);
  r.source = lu.solve(chi);
  if (!r.coupling.allFinite() || !r.source.allFinite()) throw SolverError("singular merge matrix");
  r.s = r.coupling.topRows<2>() + r.coupling.bottomRows<2>();
  r.chi = r.source.head<2>() + r.source.tail<2>();
  return r;
}

/// Merge tree for intervals ordered from the outside in: node i joins
/// interval i+1 (inner) with the union of intervals 0..i (outer).
struct MergeTree {
  std::vector<MergeResult> nodes;
  Mat2 s = Mat2::Zero();
  Vec2 chi = Vec2::Zero();
};

inline MergeTree merge_sweep(std::span<const IntervalData> outer_first) {
  MergeTree t;
  if (outer_first.empty()) return t;
  t.s = outer_first[0].s;
  t.chi = outer_first[0].chi;
  t.nodes.reserve(outer_first.size() - 1);
  for (std::size_t i = 1; i < outer_first.size(); ++i) {
    MergeResult r = merge(outer_first[i].s, outer_first[i].chi, t.s, t.chi);
    t.s = r.s;
    t.chi = r.chi;
    t.nodes.push_back(std::move(r));
  }
  return t;
}

/// Distributes the root incoming coefficients down the tree, filling phi and
/// alpha of every interval.
inline void downward_pass(const MergeTree& tree, std::span<IntervalData> outer_first, const Vec2& root_phi) {
  if (outer_first.empty()) return;
  Vec2 phi = root_phi;
  for (std::size_t i = outer_first.size() - 1; i >= 1; --i) {
    const MergeResult& node = tree.nodes[i - 1];
    const Vec4 a = node.coupling * phi + node.source;
    IntervalData& inner = outer_first[i];
    inner.phi = Vec2(phi[0], phi[1] + a[3]);
    inner.alpha = a.head<2>();
    phi = Vec2(phi[0] + a[0], phi[1]);
  }
  outer_first[0].phi = phi;
  outer_first[0].alpha = outer_first[0].s * phi + outer_first[0].chi;
}

/// Solution of one panel.
struct PanelSolution {
  double lo = 0.0, hi = 0.0;
  Mat2 s = Mat2::Zero();
  Vec2 chi = Vec2::Zero();
  Vec2 phi = Vec2::Zero();
  Vec2 alpha = Vec2::Zero();
  bool q_zero = true;
  ChebExpansion rho;
  ChebExpansion u;
};

/// Unit-source solution of one non-negative order.
struct ModeData {
  int m = 0;
  double k = 0.0;
  double b = 0.0;
  double eps = 0.0;
  double r_min = 0.0;
  bool negligible = false;              // R_min >= b: the mode does not scatter
  std::vector<PanelSolution> panels;    // increasing radius
  cplx mu = 0.0;                        // u(r >= b) = mu H_m(kr)
  cplx beta = 0.0;                      // u(r <= R_N) = beta J_m(kr)
  Mat2 s_root = Mat2::Zero();
  Vec2 chi_root = Vec2::Zero();
  bool keeps_density = true;

  double inner_radius() const { return panels.empty() ? b : panels.front().lo; }

  /// Index of the panel containing r, or -1 outside [R_N, b].
  int locate(double r) const {
    if (panels.empty() || r < panels.front().lo || r > panels.back().hi) return -1;
    auto it = std::upper_bound(panels.begin(), panels.end(), r, [](double v, const PanelSolution& p) { return v < p.lo; });
    return static_cast<int>(it - panels.begin()) - 1;
  }

  cplx exterior(double r) const { return mu * specfun::hankel1(m, k * r); }
  cplx interior(double r) const { return beta * specfun::bessel_j(m, k * r); }

  /// u(r) for r >= 0.
  cplx value(double r) const {
    if (negligible) return 0.0;
    if (r >= b) return exterior(r);
    const int i = locate(r);
    if (i < 0) return interior(r);
    return panels[i].u(r);
  }

  /// u(r) using the expansion of panel i, for one-sided checks at endpoints.
  cplx value_on_panel(int i, double r) const { return panels.at(i).u(r); }

  cplx density(double r) const {
    if (!keeps_density) throw std::logic_error("ModeData: density was not retained");
    const int i = locate(r);
    if (negligible || i < 0) return 0.0;
    return panels[i].rho(r);
  }
};

/// Solves the unit-source problem for order |m|.
inline std::shared_ptr<const ModeData> solve_unit_mode(int m, double k, const RadialPotential& q,
                                                      const ModeOptions& opt = {}) {
  m = std::abs(m);
  auto data = std::make_shared<ModeData>();
  data->m = m;
  data->k = k;
  data->b = q.support_radius();
  data->eps = opt.eps;
  data->keeps_density = opt.keep_density;
  if (q.identically_zero()) {
    data->negligible = true;
    data->r_min = data->b;
    return data;
  }
  Partition part = adaptive_partition(m, k, q, data->b, opt.eps, opt);
  data->r_min = part.r_min;
  if (part.panels.empty()) {
    data->negligible = true;
    return data;
  }

  std::vector<IntervalData> ivs;
  ivs.reserve(part.panels.size());
  for (auto& s : part.panels) ivs.push_back(build_interval(m, k, std::move(s), true));
  part.panels.clear();

  const MergeTree tree = merge_sweep(ivs);
  downward_pass(tree, ivs, Vec2::Zero());
  data->s_root = tree.s;
  data->chi_root = tree.chi;
  data->mu = kMinusHalfIPi * tree.chi[0];
  data->beta = tree.chi[1];

  // Recompute the far-field coefficients by direct sums over the densities.
  // The merged values carry rounding from the 4x4 solves, which Hs amplifies
  // near R_min; the sums are exactly zero across panels where q vanishes.
  const std::size_t np = ivs.size();
  std::vector<Eigen::VectorXcd> rhos(np);
  std::vector<Vec2> alphas(np);
  for (std::size_t i = 0; i < np; ++i) {
    const IntervalData& d = ivs[i];
    rhos[i] = -d.phi[0] * d.sol_h - d.phi[1] * d.sol_j + d.v;
    alphas[i] = Vec2(detail::weighted_dot(d.panel, d.j, rhos[i]), detail::weighted_dot(d.panel, d.hs, rhos[i]));
  }
  {
    cplx left = 0.0;
    for (std::size_t i = np; i-- > 0;) {
      ivs[i].phi[0] = left;
      left += alphas[i][0];
    }
    cplx right = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
      ivs[i].phi[1] = right;
      ivs[i].alpha = alphas[i];
      right += alphas[i][1];
    }
  }

  data->panels.resize(ivs.size());
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    IntervalData& d = ivs[i];
    PanelSolution& ps = data->panels[ivs.size() - 1 - i];
    ps.lo = d.panel.lo();
    ps.hi = d.panel.hi();
    ps.s = d.s;
    ps.chi = d.chi;
    ps.phi = d.phi;
    ps.alpha = d.alpha;
    ps.q_zero = d.q_zero;
    const int n = d.panel.size();
    const Eigen::VectorXcd& rho = rhos[i];
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(n);
    if (!d.q_zero) u = detail::apply_local(d.panel, d.j, d.hs, rho);
    for (int r = 0; r < n; ++r) u[r] += d.phi[0] * d.hs[r] + d.phi[1] * d.j[r];
    ps.u = cheb_coeffs(d.panel, std::span<const cplx>(u.data(), n));
    ps.u.trim(1e-17);
    if (opt.keep_density) {
      ps.rho = cheb_coeffs(d.panel, std::span<const cplx>(rho.data(), n));
      ps.rho.trim(1e-17);
    }
    d = IntervalData{};  // release panel memory early
  }
  return data;
}

/// Solution of one signed order m with incident-mode scale c_m. Orders m and
/// -m share their unit data: the equations only involve |m|.
class ModeSolution {
 public:
  ModeSolution() = default;
  ModeSolution(std::shared_ptr<const ModeData> data, int m, cplx scale)
      : data_(std::move(data)), m_(m), scale_(scale) {
    if (!data_ || data_->m != std::abs(m)) throw std::invalid_argument("ModeSolution: order mismatch");
  }

  int m() const { return m_; }
  cplx source_scale() const { return scale_; }
  const ModeData& data() const { return *data_; }
  const std::shared_ptr<const ModeData>& shared_data() const { return data_; }

  cplx exterior_coeff() const { return scale_ * data_->mu; }
  cplx interior_coeff() const { return scale_ * data_->beta; }

  /// The same unit data under another order sign and scale.
  ModeSolution reflected(cplx scale) const { return {data_, -m_, scale}; }

  std::vector<double> partition() const {
    std::vector<double> r;
    for (auto it = data_->panels.rbegin(); it != data_->panels.rend(); ++it) r.push_back(it->hi);
    if (!data_->panels.empty()) r.push_back(data_->panels.front().lo);
    return r;
  }

 private:
  std::shared_ptr<const ModeData> data_;
  int m_ = 0;
  cplx scale_ = 0.0;
};

inline ModeSolution solve_mode(int m, double k, const RadialPotential& q, double eps, cplx c_m,
                               ModeOptions opt = {}) {
  opt.eps = eps;
  return {solve_unit_mode(m, k, q, opt), m, c_m};
}

/// u_m(r): panel expansion on [R_N, b], mu H_m(kr) beyond b, beta J_m(kr)
/// inside R_N.
inline cplx eval_mode(const ModeSolution& sol, double r) {
  if (r < 0.0) throw std::domain_error("eval_mode: negative radius");
  return sol.source_scale() * sol.data().value(r);
}

inline cplx eval_density(const ModeSolution& sol, double r) { return sol.source_scale() * sol.data().density(r); }

/// Radial function given by panel expansions on [0, b] and mu H_m(kr) beyond.
struct RadialField {
  int m = 0;
  double k = 0.0;
  double b = 0.0;
  cplx mu = 0.0;
  std::vector<ChebExpansion> pieces;  // increasing radius, covering [0, b]

  cplx operator()(double r) const {
    if (r >= b) return mu * specfun::hankel1(m, k * r);
    auto it = std::upper_bound(pieces.begin(), pieces.end(), r, [](double v, const ChebExpansion& e) { return v < e.lo; });
    if (it == pieces.begin()) throw std::domain_error("RadialField: negative radius");
    return (*(it - 1))(r);
  }
};

/// u(r) = int_0^b G_m(r, t) g(t) dt for g supported in [0, b], by panel
/// quadrature on `panels` equal panels (0 picks a wavelength-based count).
/// Panels on which the samples of g are not resolved to `eps` are bisected.
inline RadialField greens_apply(int m, double k, const std::function<cplx(double)>& g, double b, int panels = 0,
                                double eps = 1e-13) {
  if (!(b > 0.0) || !(k > 0.0)) throw std::invalid_argument("greens_apply: b and k must be positive");
  m = std::abs(m);
  if (panels <= 0) panels = std::max(4, static_cast<int>(std::ceil(2.0 * k * b / std::numbers::pi)));
  std::vector<ChebPanel> ps;
  std::vector<Eigen::VectorXcd> gs;
  {
    auto sample = [&](const ChebPanel& c) {
      Eigen::VectorXcd v(c.size());
      for (int i = 0; i < c.size(); ++i) v[i] = g(c.nodes()[i]);
      return v;
    };
    std::vector<std::pair<ChebPanel, Eigen::VectorXcd>> todo;
    double gmax = 0.0;
    for (int p = panels; p-- > 0;) {
      ChebPanel c(b * p / panels, p + 1 == panels ? b : b * (p + 1) / panels);
      Eigen::VectorXcd v = sample(c);
      gmax = std::max(gmax, v.cwiseAbs().maxCoeff());
      todo.emplace_back(std::move(c), std::move(v));
    }
    while (!todo.empty()) {
      auto [c, v] = std::move(todo.back());
      todo.pop_back();
      const bool ok = c.length() < 1e-8 * b ||
                      resolved(c, std::span<const cplx>(v.data(), v.size()), gmax, eps).resolved;
      if (ok) {
        ps.push_back(std::move(c));
        gs.push_back(std::move(v));
        continue;
      }
      const double mid = 0.5 * (c.lo() + c.hi());
      ChebPanel right(mid, c.hi()), left(c.lo(), mid);
      Eigen::VectorXcd vr = sample(right), vl = sample(left);
      todo.emplace_back(std::move(right), std::move(vr));
      todo.emplace_back(std::move(left), std::move(vl));
    }
  }
  const int P = static_cast<int>(ps.size());
  std::vector<std::vector<double>> js(P);
  std::vector<std::vector<cplx>> hss(P);
  std::vector<cplx> left_total(P), right_total(P);
  for (int p = 0; p < P; ++p) {
    detail::sample_bessel(m, k, ps[p], js[p], hss[p]);
    left_total[p] = detail::weighted_dot(ps[p], js[p], gs[p]);
    right_total[p] = detail::weighted_dot(ps[p], hss[p], gs[p]);
  }
  RadialField out;
  out.m = m;
  out.k = k;
  out.b = b;
  cplx inner = 0.0;  // int_0^{lo} J g t
  cplx outer = 0.0;  // int_{hi}^b Hs g t
  for (int p = 0; p < P; ++p) outer += right_total[p];
  for (int p = 0; p < P; ++p) {
    outer -= right_total[p];
    const int n = ps[p].size();
    Eigen::VectorXcd u = detail::apply_local(ps[p], js[p], hss[p], gs[p]);
    for (int i = 0; i < n; ++i) u[i] += inner * hss[p][i] + outer * js[p][i];
    out.pieces.push_back(cheb_coeffs(ps[p], std::span<const cplx>(u.data(), n)));
    inner += left_total[p];
  }
  out.mu = kMinusHalfIPi * inner;
  return out;
}

}  // namespace radscat

#endif  // RADSCAT_MODESOLVER_HPP
