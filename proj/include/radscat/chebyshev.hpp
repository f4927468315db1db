#ifndef RADSCAT_CHEBYSHEV_HPP
#define RADSCAT_CHEBYSHEV_HPP

// Chebyshev panels: nodes, Clenshaw-Curtis weights, interpolation, spectral
// indefinite integration and the coefficient-tail resolution test.
//
// Nodes are Chebyshev points of the second kind (the extrema of T_{n-1}),
// ordered increasingly, so every panel contains its endpoints.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace radscat {

using cplx = std::complex<double>;

inline constexpr int kPanelOrder = 48;

/// First coefficient (0-based) of the resolution tail. Coefficients are
/// numbered 1..48 in the adaptivity rule, whose tail is 13..48.
inline constexpr int kTailStart = 12;

/// Reference rule on [-1, 1].
struct ChebRule {
  int n = 0;
  std::vector<double> nodes;    // increasing
  std::vector<double> weights;  // Clenshaw-Curtis
  Eigen::MatrixXd to_coeffs;    // values -> Chebyshev coefficients
  Eigen::MatrixXd integrate;    // values -> int_{-1}^{x_i} f
};

namespace detail {

inline ChebRule make_rule(int n) {
  if (n < 2) throw std::invalid_argument("chebyshev: need at least two nodes");
  ChebRule r;
  r.n = n;
  const int N = n - 1;
  // theta_k for the increasing node x_k = cos(theta_k).
  std::vector<double> theta(n);
  for (int k = 0; k < n; ++k) theta[k] = std::numbers::pi * double(N - k) / N;
  r.nodes.resize(n);
  for (int k = 0; k < n; ++k) r.nodes[k] = std::cos(theta[k]);
  r.nodes.front() = -1.0;
  r.nodes.back() = 1.0;
  if (n % 2 == 1) r.nodes[N / 2] = 0.0;

  // Clenshaw-Curtis weights (Waldvogel's formulation).
  r.weights.assign(n, 0.0);
  if (N == 1) {
    r.weights = {1.0, 1.0};
  } else {
    for (int k = 0; k < n; ++k) {
      double v = 1.0;
      const int half = N / 2;
      if (N % 2 == 0) {
        for (int j = 1; j < half; ++j) v -= 2.0 * std::cos(2.0 * j * theta[k]) / (4.0 * j * j - 1.0);
        v -= std::cos(N * theta[k]) / (double(N) * N - 1.0);
      } else {
        for (int j = 1; j <= half; ++j) v -= 2.0 * std::cos(2.0 * j * theta[k]) / (4.0 * j * j - 1.0);
      }
      r.weights[k] = 2.0 * v / N;
    }
    const double end = (N % 2 == 0) ? 1.0 / (double(N) * N - 1.0) : 1.0 / (double(N) * N);
    r.weights.front() = end;
    r.weights.back() = end;
  }

  // c_j = (2/N) sum'' f_k T_j(x_k), first and last coefficient halved.
  r.to_coeffs.resize(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double v = 2.0 / N * std::cos(j * theta[k]);
      if (k == 0 || k == N) v *= 0.5;
      if (j == 0 || j == N) v *= 0.5;
      r.to_coeffs(j, k) = v;
    }
  }

  // A(i, l) = int_{-1}^{x_i} T_l(s) ds.
  Eigen::MatrixXd antider(n, n);
  for (int i = 0; i < n; ++i) {
    const double th = theta[i];
    const double x = r.nodes[i];
    for (int l = 0; l < n; ++l) {
      double v;
      if (l == 0) {
        v = x + 1.0;
      } else if (l == 1) {
        v = 0.5 * (x * x - 1.0);
      } else {
        auto prim = [&](double tp1, double tm1) { return 0.5 * (tp1 / (l + 1) - tm1 / (l - 1)); };
        const double at_x = prim(std::cos((l + 1) * th), std::cos((l - 1) * th));
        const double sgn = (l % 2 == 0) ? -1.0 : 1.0;  // T_{l+-1}(-1) = (-1)^{l+1}
        const double at_m1 = prim(sgn, sgn);
        v = at_x - at_m1;
      }
      antider(i, l) = v;
    }
  }
  r.integrate = antider * r.to_coeffs;
  r.integrate.row(0).setZero();
  return r;
}

}  // namespace detail

/// The shared 48-point reference rule.
inline const ChebRule& panel_rule() {
  static const ChebRule rule = detail::make_rule(kPanelOrder);
  return rule;
}

/// A Chebyshev panel on [lo, hi].
class ChebPanel {
 public:
  ChebPanel() = default;

  ChebPanel(double lo, double hi, int n = kPanelOrder) : lo_(lo), hi_(hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw std::invalid_argument("ChebPanel: invalid interval");
    }
    if (n == kPanelOrder) {
      rule_ = std::shared_ptr<const ChebRule>(std::shared_ptr<const ChebRule>{}, &panel_rule());
    } else {
      rule_ = std::make_shared<const ChebRule>(detail::make_rule(n));
    }
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    nodes_.resize(n);
    weights_.resize(n);
    for (int k = 0; k < n; ++k) {
      nodes_[k] = mid + half * rule_->nodes[k];
      weights_[k] = half * rule_->weights[k];
    }
    nodes_.front() = lo;
    nodes_.back() = hi;
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double length() const { return hi_ - lo_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const ChebRule& rule() const { return *rule_; }

  /// Maps r in [lo, hi] to [-1, 1].
  double to_reference(double r) const { return (2.0 * r - lo_ - hi_) / (hi_ - lo_); }

  /// Matrix P with (P f)_i = int_lo^{r_i} f(t) dt.
  Eigen::MatrixXd integration_matrix() const { return (0.5 * length()) * rule_->integrate; }

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::shared_ptr<const ChebRule> rule_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

inline ChebPanel cheb_nodes_weights(double lo, double hi, int n = kPanelOrder) { return ChebPanel(lo, hi, n); }

/// Chebyshev coefficients of a function sampled on a panel.
struct ChebExpansion {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<cplx> coeffs;

  /// Clenshaw evaluation; r must lie in [lo, hi] up to rounding.
  cplx operator()(double r) const {
    const double span = hi - lo;
    if (r < lo - 1e-12 * span || r > hi + 1e-12 * span) {
      throw std::out_of_range("ChebExpansion: evaluation point outside the panel");
    }
    const double x = std::clamp((2.0 * r - lo - hi) / span, -1.0, 1.0);
    return clenshaw(x);
  }

  cplx clenshaw(double x) const {
    cplx b1 = 0.0, b2 = 0.0;
    const double two_x = 2.0 * x;
    for (int j = static_cast<int>(coeffs.size()) - 1; j >= 1; --j) {
      const cplx b0 = two_x * b1 - b2 + coeffs[j];
      b2 = b1;
      b1 = b0;
    }
    return x * b1 - b2 + (coeffs.empty() ? cplx{} : coeffs[0]);
  }

  /// Drops trailing coefficients below rel * max |c|.
  void trim(double rel) {
    double cmax = 0.0;
    for (const auto& c : coeffs) cmax = std::max(cmax, std::abs(c));
    std::size_t keep = coeffs.size();
    while (keep > 1 && std::abs(coeffs[keep - 1]) <= rel * cmax) --keep;
    coeffs.resize(keep);
    coeffs.shrink_to_fit();
  }
};

template <typename T>
std::vector<cplx> cheb_coeffs_of(const ChebRule& rule, std::span<const T> samples) {
  if (static_cast<int>(samples.size()) != rule.n) {
    throw std::invalid_argument("cheb_coeffs: sample count does not match the panel");
  }
  std::vector<cplx> c(rule.n, cplx{});
  for (int j = 0; j < rule.n; ++j) {
    cplx s = 0.0;
    for (int k = 0; k < rule.n; ++k) s += rule.to_coeffs(j, k) * cplx(samples[k]);
    c[j] = s;
  }
  return c;
}

inline ChebExpansion cheb_coeffs(const ChebPanel& panel, std::span<const cplx> samples) {
  return {panel.lo(), panel.hi(), cheb_coeffs_of(panel.rule(), samples)};
}

inline ChebExpansion cheb_coeffs(const ChebPanel& panel, std::span<const double> samples) {
  return {panel.lo(), panel.hi(), cheb_coeffs_of(panel.rule(), samples)};
}

inline cplx cheb_eval(const ChebExpansion& e, double r) { return e(r); }

/// Outcome of the coefficient-tail test.
struct Resolution {
  double tail = 0.0;  // E = length * max_{j >= 12} |c_j| / fn_max
  bool resolved = true;
};

/// Scaled tail E = panel_length * max_{j=12..n-1} |c_j| / fn_max, compared
/// with eps/10 (or a roundoff floor). A function with fn_max == 0 is resolved with E = 0.
inline Resolution resolved_coeffs(std::span<const cplx> coeffs, double fn_max, double panel_length, double eps) {
  Resolution r;
  if (fn_max <= 0.0) return r;
  double tail = 0.0;
  for (std::size_t j = kTailStart; j < coeffs.size(); ++j) tail = std::max(tail, std::abs(coeffs[j]));
  r.tail = panel_length * tail / fn_max;
  // Coefficients at roundoff level count as zero whatever eps asks for.
  const double floor = 8.0 * std::numeric_limits<double>::epsilon() * panel_length;
  r.resolved = r.tail <= std::max(eps / 10.0, floor);
  return r;
}

template <typename T>
Resolution resolved(const ChebPanel& panel, std::span<const T> fn_samples, double fn_max, double eps) {
  const auto c = cheb_coeffs_of(panel.rule(), fn_samples);
  return resolved_coeffs(c, fn_max, panel.length(), eps);
}

/// Max of |f| over the interpolant at `samples` equispaced points plus the
/// nodes themselves.
inline double interpolant_max(const ChebExpansion& e, std::span<const cplx> node_values, int samples = 128) {
  double best = 0.0;
  for (const auto& v : node_values) best = std::max(best, std::abs(v));
  for (int i = 1; i < samples; ++i) {
    const double x = -1.0 + 2.0 * i / samples;
    best = std::max(best, std::abs(e.clenshaw(x)));
  }
  return best;
}

}  // namespace radscat

#endif  // RADSCAT_CHEBYSHEV_HPP
