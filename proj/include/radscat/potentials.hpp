#ifndef RADSCAT_POTENTIALS_HPP
#define RADSCAT_POTENTIALS_HPP

// Radially symmetric, compactly supported contrasts q(r).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace radscat {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// q(r) with support radius b and the radii in (0, b) where q is not smooth.
class RadialPotential {
 public:
  using Profile = std::function<double(double)>;

  RadialPotential(Profile profile, double support_radius, std::vector<double> breakpoints, std::string label)
      : profile_(std::make_shared<const Profile>(std::move(profile))),
        b_(support_radius),
        breakpoints_(std::move(breakpoints)),
        label_(std::move(label)) {
    if (!(b_ > 0.0) || !std::isfinite(b_)) throw std::invalid_argument("RadialPotential: support radius must be positive");
    std::sort(breakpoints_.begin(), breakpoints_.end());
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
      const double r = breakpoints_[i];
      if (!(r > 0.0 && r < b_)) throw std::invalid_argument("RadialPotential: breakpoints must lie in (0, b)");
      if (i > 0 && !(r > breakpoints_[i - 1])) throw std::invalid_argument("RadialPotential: breakpoints must be distinct");
    }
  }

  /// q(r); exactly zero for r > b.
  double operator()(double r) const {
    if (r > b_) return 0.0;
    return (*profile_)(r);
  }

  double support_radius() const { return b_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::string& label() const { return label_; }

  /// True when q vanishes identically (used to short-circuit solves).
  bool identically_zero() const { return zero_; }

  RadialPotential& mark_zero() {
    zero_ = true;
    return *this;
  }

 private:
  std::shared_ptr<const Profile> profile_;
  double b_;
  std::vector<double> breakpoints_;
  std::string label_;
  bool zero_ = false;
};

/// q(r) = exp(-r^2) truncated at b = 2 pi.
inline RadialPotential gaussian_bump() {
  return {[](double r) { return std::exp(-r * r); }, kTwoPi, {}, "gaussian"};
}

/// SplitMix64: state += 0x9E3779B97F4A7C15; z = state;
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9; z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
/// return z ^ (z >> 31). Uniform doubles use the top 53 bits.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

inline constexpr int kRandomMediumPoints = 20;

/// Piecewise constant medium on [0, 2 pi]: 20 sorted uniform switch points,
/// q = 0 on [0, first point) and alternating 0/1 afterwards.
inline RadialPotential random_discontinuous(std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> pts;
  while (static_cast<int>(pts.size()) < kRandomMediumPoints) {
    const double r = kTwoPi * rng.uniform();
    if (r <= 0.0 || r >= kTwoPi) continue;
    if (std::find(pts.begin(), pts.end(), r) != pts.end()) continue;
    pts.push_back(r);
  }
  std::sort(pts.begin(), pts.end());
  auto switches = std::make_shared<const std::vector<double>>(pts);
  auto profile = [switches](double r) {
    // Right-continuous. Panel samplers evaluate endpoints from the inside,
    // so a panel ending on a switch point sees its own side's value.
    const auto crossed = std::upper_bound(switches->begin(), switches->end(), r) - switches->begin();
    return (crossed % 2 == 1) ? 1.0 : 0.0;
  };
  return {profile, kTwoPi, pts, "random(" + std::to_string(seed) + ")"};
}

namespace detail {

// Eaton relation s^2 = A/s + sqrt((A/s)^2 - 1), A = 2 pi / r, s = sqrt(1 + q),
// squared out to s^4 - 2 A s + 1 = 0 on its root in [1, A]. The square-root
// form loses digits near the rim where its derivative blows up.
inline double eaton_residual(double s, double A) {
  const double s2 = s * s;
  return s2 * s2 - 2.0 * A * s + 1.0;
}

inline double eaton_solve(double r) {
  const double A = kTwoPi / r;
  if (A < 1.0) throw std::domain_error("eaton_lens: relation has no real solution for r > 2 pi");
  double lo = 1.0, hi = A;
  if (eaton_residual(lo, A) >= 0.0) return 1.0;
  // Bisection is safe on the whole bracket; a few Newton-free iterations
  // reach full precision since the bracket shrinks by half each step.
  for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eaton_residual(mid, A) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double s = 0.5 * (lo + hi);
  if (!std::isfinite(s)) throw std::runtime_error("eaton_lens: bisection did not converge");
  return s;
}

}  // namespace detail

/// Eaton lens of radius 2 pi: 1 + q = 2 pi/(sqrt(1+q) r) + sqrt((2 pi/(sqrt(1+q) r))^2 - 1).
/// q diverges like r^{-2/3} at the origin; evaluation is capped at
/// r = 1e-14 * b.
inline RadialPotential eaton_lens() {
  auto profile = [](double r) {
    const double rr = std::max(r, 1e-14 * kTwoPi);
    const double s = detail::eaton_solve(rr);
    return s * s - 1.0;
  };
  return {profile, kTwoPi, {}, "eaton"};
}

/// Residual of the Eaton relation at radius r for a given q, relative to
/// the size of its terms (for checks).
inline double eaton_relation_residual(double r, double q) {
  const double s = std::sqrt(1.0 + q);
  const double s2 = s * s;
  return detail::eaton_residual(s, kTwoPi / r) / (s2 * s2 + 1.0);
}

/// Luneburg lens of radius 2 pi: q = 1 - r^2 / (4 pi^2).
inline RadialPotential luneburg_lens() {
  return {[](double r) { return 1.0 - r * r / (kTwoPi * kTwoPi); }, kTwoPi, {}, "luneburg"};
}

/// q = c on [0, b].
inline RadialPotential constant_disk(double c, double b) {
  if (!(1.0 + c > 0.0)) throw std::invalid_argument("constant_disk: need 1 + c > 0");
  RadialPotential p([c](double) { return c; }, b, {}, "disk");
  if (c == 0.0) p.mark_zero();
  return p;
}

/// q = 0.
inline RadialPotential zero_potential(double b = kTwoPi) {
  RadialPotential p([](double) { return 0.0; }, b, {}, "zero");
  p.mark_zero();
  return p;
}

/// Tabulated q: piecewise linear through (r_i, q_i). Every sample radius is a
/// breakpoint so each panel sees a polynomial. Declared breakpoints mark
/// jumps: a repeated radius gives the left and right limits.
///
/// File grammar (one item per line, '#' starts a comment):
///   support <b>
///   <r> <q>
inline RadialPotential table_potential(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("table potential: cannot open " + path);
  double b = -1.0;
  std::vector<std::pair<double, double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;
    if (first == "support") {
      if (!(ss >> b)) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad support line");
      continue;
    }
    double r, q;
    try {
      r = std::stod(first);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected '<r> <q>'");
    }
    if (!(ss >> q)) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected '<r> <q>'");
    if (!rows.empty() && r < rows.back().first) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": radii must be non-decreasing");
    }
    rows.emplace_back(r, q);
  }
  if (rows.size() < 2) throw std::runtime_error(path + ": need at least two samples");
  if (b <= 0.0) b = rows.back().first;
  std::vector<double> bps;
  for (const auto& [r, q] : rows) {
    if (r > 0.0 && r < b && (bps.empty() || r > bps.back())) bps.push_back(r);
  }
  auto data = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(rows));
  auto profile = [data](double r) {
    const auto& d = *data;
    if (r <= d.front().first) return d.front().second;
    if (r >= d.back().first) return d.back().second;
    // Right-continuous at repeated radii.
    auto it = std::upper_bound(d.begin(), d.end(), r, [](double v, const auto& e) { return v < e.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    if (hi.first == lo.first) return hi.second;
    const double t = (r - lo.first) / (hi.first - lo.first);
    return lo.second + t * (hi.second - lo.second);
  };
  return {profile, b, bps, "table(" + path + ")"};
}

}  // namespace radscat

#endif  // RADSCAT_POTENTIALS_HPP
