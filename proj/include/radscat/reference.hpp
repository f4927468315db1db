#ifndef RADSCAT_REFERENCE_HPP
#define RADSCAT_REFERENCE_HPP

// Closed-form mode solution for a homogeneous disk, used as a check.

#include <cmath>
#include <complex>
#include <numbers>

#include "radscat/specfun.hpp"

namespace radscat {

/// Scattered mode for q = c on [0, b] with incident mode c_m J_m(kr):
/// inside A J_m(kappa r) - c_m J_m(kr), outside mu H_m(kr), kappa = k sqrt(1 + c).
struct DiskMode {
  int m = 0;
  double k = 0.0, kappa = 0.0, b = 0.0;
  std::complex<double> scale = 0.0, a = 0.0, mu = 0.0;

  std::complex<double> scattered(double r) const {
    if (r >= b) return mu * specfun::hankel1(m, k * r);
    return a * specfun::bessel_j(m, kappa * r) - scale * specfun::bessel_j(m, k * r);
  }
};

inline DiskMode disk_mode(int m, double k, double c, double b, std::complex<double> scale = 1.0) {
  DiskMode d;
  d.m = std::abs(m);
  d.k = k;
  d.kappa = k * std::sqrt(1.0 + c);
  d.b = b;
  d.scale = scale;
  const auto out = specfun::bessel_jy(d.m, k * b);
  const auto in = specfun::bessel_jy(d.m, d.kappa * b);
  // Continuity of value and radial derivative at r = b.
  const std::complex<double> den = d.kappa * in.jp * out.h() - k * out.hp() * in.j;
  d.mu = scale * (k * out.jp * in.j - d.kappa * in.jp * out.j) / den;
  d.a = scale * std::complex<double>(0.0, -2.0 / (std::numbers::pi * b)) / den;
  return d;
}

}  // namespace radscat

#endif  // RADSCAT_REFERENCE_HPP
