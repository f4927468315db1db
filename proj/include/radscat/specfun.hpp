#ifndef RADSCAT_SPECFUN_HPP
#define RADSCAT_SPECFUN_HPP

// Cylindrical Bessel functions J_m, Y_m and H_m = J_m + iY_m of integer order
// m >= 0 and real argument x >= 0.
//
// Evaluation strategy:
//   * J_0, J_1, Y_0, Y_1 come from Hankel's asymptotic expansion for x >= 25
//     and from Steed's method (CF1 + CF2, Temme's series for x < 2) otherwise.
//   * Y_m is obtained by upward recurrence, which is stable for all x.
//   * J_m is obtained by upward recurrence while m <= x and otherwise from
//     the continued fraction for J_m'/J_m combined with the Wronskian
//     J_m Y_m' - J_m' Y_m = 2/(pi x).
// Below the turning point J_m underflows and Y_m overflows long before the
// Wronskian stops being meaningful, so the core routine returns both with a
// shared binary exponent.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace radscat::specfun {

inline constexpr double kUnderflow = 1e-300;

/// Values of J_m, Y_m and their derivatives at one argument.
struct BesselPair {
  double j = 0.0;
  double y = 0.0;
  double jp = 0.0;
  double yp = 0.0;

  std::complex<double> h() const { return {j, y}; }
  std::complex<double> hp() const { return {jp, yp}; }
};

/// Same as BesselPair but with J = j * 2^-exponent and Y = y * 2^exponent.
/// The Wronskian j*yp - jp*y is exponent free.
struct ScaledBesselPair {
  double j = 0.0;
  double y = 0.0;
  double jp = 0.0;
  double yp = 0.0;
  int exponent = 0;
};

namespace detail {

inline constexpr double kEps = 1e-16;
inline constexpr double kFpMin = 1e-300;
inline constexpr int kMaxIter = 100000;
inline constexpr double kAsymptoticThreshold = 25.0;

struct Order01 {
  double j0, j1, y0, y1;
};

// Hankel asymptotic expansion of order nu in {0, 1}; valid to full precision
// for x >= 25 where the smallest term is ~exp(-2x).
inline void hankel_asymptotic(int nu, double x, double& jv, double& yv) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  double last = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double a = 2.0 * k - 1.0;
    term *= (mu - a * a) / (k * 8.0 * x);
    if (std::abs(term) > last) break;  // asymptotic series started diverging
    last = std::abs(term);
    // Odd k contribute to Q, even k to P, with alternating signs per pair.
    const int s = ((k / 2) % 2 == 0) ? 1 : -1;
    if (k % 2 == 1) {
      q += s * term;
    } else {
      p += s * term;
    }
    if (last < 1e-18 * std::max(std::abs(p), std::abs(q) + 1e-300)) break;
  }
  // cos/sin of x - (nu/2 + 1/4) pi expressed through cos x and sin x so the
  // argument reduction is done exactly by libm.
  const double c = std::cos(x);
  const double s = std::sin(x);
  constexpr double r2 = std::numbers::sqrt2 / 2.0;
  double cchi, schi;
  if (nu == 0) {
    cchi = r2 * (c + s);
    schi = r2 * (s - c);
  } else {
    cchi = r2 * (s - c);
    schi = -r2 * (s + c);
  }
  const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
  jv = amp * (p * cchi - q * schi);
  yv = amp * (p * schi + q * cchi);
}

// Continued fraction CF1 for J_nu'(x)/J_nu(x) (modified Lentz). Also returns
// the sign of J_nu relative to the start of the backward recurrence.
inline double cf1_ratio(double nu, double x, int* sign = nullptr) {
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;
  int isign = 1;
  double h = nu * xi;
  if (h < kFpMin) h = kFpMin;
  double b = xi2 * nu;
  double d = 0.0;
  double c = h;
  int i = 1;
  for (; i <= kMaxIter; ++i) {
    b += xi2;
    d = b - d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = b - 1.0 / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = c * d;
    h *= del;
    if (d < 0.0) isign = -isign;
    if (std::abs(del - 1.0) < kEps) break;
  }
  if (i > kMaxIter) throw std::runtime_error("bessel: CF1 failed to converge");
  if (sign) *sign = isign;
  return h;
}

// Steed's method at order zero (x < 25): J_0, Y_0 and their derivatives.
inline Order01 steed_order0(double x) {
  const double xi = 1.0 / x;
  const double w = 2.0 * xi / std::numbers::pi;
  int isign = 1;
  const double f = cf1_ratio(0.0, x, &isign);
  double rjmu, rymu, rymup;
  if (x < 2.0) {
    // Temme's series with mu = 0: gam1 = -gamma, gam2 = gampl = gammi = 1.
    const double x2 = 0.5 * x;
    const double dlog = -std::log(x2);
    double ff = 2.0 / std::numbers::pi * (-std::numbers::egamma + dlog);
    double p = 1.0 / std::numbers::pi;
    double q = 1.0 / std::numbers::pi;
    double c = 1.0;
    const double dd = -x2 * x2;
    double sum = ff;
    double sum1 = p;
    for (int i = 1; i <= kMaxIter; ++i) {
      ff = (i * ff + p + q) / (double(i) * i);
      c *= dd / i;
      p /= i;
      q /= i;
      const double del = c * ff;
      sum += del;
      const double del1 = c * p - i * del;
      sum1 += del1;
      if (std::abs(del) < (1.0 + std::abs(sum)) * kEps) break;
    }
    rymu = -sum;
    const double ry1 = -sum1 * 2.0 * xi;
    rymup = -ry1;
    rjmu = w / (rymup - f * rymu);
  } else {
    // Steed's CF2 for p + iq = (J' + iY')/(J + iY) at order zero.
    double a = 0.25;
    double p = -0.5 * xi;
    double q = 1.0;
    const double br = 2.0 * x;
    double bi = 2.0;
    double fact = a * xi / (p * p + q * q);
    double cr = br + q * fact;
    double ci = bi + p * fact;
    double den = br * br + bi * bi;
    double dr = br / den;
    double di = -bi / den;
    double dlr = cr * dr - ci * di;
    double dli = cr * di + ci * dr;
    double temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    int i = 2;
    for (; i <= kMaxIter; ++i) {
      a += 2 * (i - 1);
      bi += 2.0;
      dr = a * dr + br;
      di = a * di + bi;
      if (std::abs(dr) + std::abs(di) < kFpMin) dr = kFpMin;
      fact = a / (cr * cr + ci * ci);
      cr = br + cr * fact;
      ci = bi - ci * fact;
      if (std::abs(cr) + std::abs(ci) < kFpMin) cr = kFpMin;
      den = dr * dr + di * di;
      dr /= den;
      di /= -den;
      dlr = cr * dr - ci * di;
      dli = cr * di + ci * dr;
      temp = p * dlr - q * dli;
      q = p * dli + q * dlr;
      p = temp;
      if (std::abs(dlr - 1.0) + std::abs(dli) < kEps) break;
    }
    if (i > kMaxIter) throw std::runtime_error("bessel: CF2 failed to converge");
    const double gam = (p - f) / q;
    rjmu = std::sqrt(w / ((p - f) * gam + q));
    rjmu = isign > 0 ? rjmu : -rjmu;
    rymu = rjmu * gam;
    rymup = rymu * (p + q / gam);
  }
  const double rjp = f * rjmu;
  return {rjmu, -rjp, rymu, -rymup};
}

inline Order01 order01(double x) {
  if (x >= kAsymptoticThreshold) {
    Order01 r{};
    hankel_asymptotic(0, x, r.j0, r.y0);
    hankel_asymptotic(1, x, r.j1, r.y1);
    return r;
  }
  return steed_order0(x);
}

inline double ldexp_flush(double v, int e) {
  const double r = std::ldexp(v, e);
  return std::abs(r) < kUnderflow ? 0.0 : r;
}

}  // namespace detail

/// J_m, Y_m, J_m', Y_m' at x > 0 with a shared binary exponent.
inline ScaledBesselPair bessel_jy_scaled(int m, double x) {
  if (m < 0) throw std::domain_error("bessel: negative order");
  if (!(x > 0.0)) throw std::domain_error("bessel: argument must be positive");
  const detail::Order01 base = detail::order01(x);
  ScaledBesselPair out;
  if (m == 0) {
    out.j = base.j0;
    out.y = base.y0;
    out.jp = -base.j1;
    out.yp = -base.y1;
    return out;
  }
  const double xi2 = 2.0 / x;
  // Upward recurrence for Y with renormalisation to keep values in range.
  double ym1 = base.y0;  // Y_{n-1}
  double yn = base.y1;   // Y_n
  int exponent = 0;
  for (int n = 1; n < m; ++n) {
    const double next = n * xi2 * yn - ym1;
    ym1 = yn;
    yn = next;
    if (std::abs(yn) > 0x1p64) {
      const int e = std::ilogb(yn);
      yn = std::ldexp(yn, -e);
      ym1 = std::ldexp(ym1, -e);
      exponent += e;
    }
  }
  out.y = yn;
  out.yp = ym1 - m / x * yn;
  out.exponent = exponent;

  if (m <= x) {
    double jm1 = base.j0;
    double jn = base.j1;
    for (int n = 1; n < m; ++n) {
      const double next = n * xi2 * jn - jm1;
      jm1 = jn;
      jn = next;
    }
    // Unscaled J is O(1) here; exponent is 0 because Y stays O(1) too.
    out.j = std::ldexp(jn, exponent);
    out.jp = std::ldexp(jm1 - m / x * jn, exponent);
  } else {
    const double f = detail::cf1_ratio(double(m), x);
    const double w = 2.0 / (std::numbers::pi * x);
    out.j = w / (out.yp - f * out.y);
    out.jp = f * out.j;
  }
  return out;
}

/// J_m, Y_m and derivatives at x > 0. J values below 1e-300 are flushed to
/// zero; Y overflows to -inf only where |Y_m(x)| exceeds the double range.
inline BesselPair bessel_jy(int m, double x) {
  const ScaledBesselPair s = bessel_jy_scaled(m, x);
  BesselPair b;
  b.j = detail::ldexp_flush(s.j, -s.exponent);
  b.jp = detail::ldexp_flush(s.jp, -s.exponent);
  b.y = std::ldexp(s.y, s.exponent);
  b.yp = std::ldexp(s.yp, s.exponent);
  return b;
}

/// J_m(x) for m >= 0, x >= 0.
inline double bessel_j(int m, double x) {
  if (m < 0) throw std::domain_error("bessel_j: negative order");
  if (x < 0.0 || std::isnan(x)) throw std::domain_error("bessel_j: negative argument");
  if (x == 0.0) return m == 0 ? 1.0 : 0.0;
  return bessel_jy(m, x).j;
}

/// Y_m(x) for m >= 0, x > 0.
inline double bessel_y(int m, double x) {
  if (m < 0) throw std::domain_error("bessel_y: negative order");
  if (!(x > 0.0)) throw std::domain_error("bessel_y: argument must be positive");
  return bessel_jy(m, x).y;
}

/// H_m(x) = J_m(x) + i Y_m(x).
inline std::complex<double> hankel1(int m, double x) { return bessel_jy(m, x).h(); }

/// J_n(x), Y_n(x) for every n in [0, nmax] at one argument x > 0.
struct BesselTable {
  std::vector<double> j, y;
};

inline BesselTable bessel_jy_all(int nmax, double x) {
  if (nmax < 0) throw std::domain_error("bessel_jy_all: negative order");
  if (!(x > 0.0)) throw std::domain_error("bessel_jy_all: argument must be positive");
  BesselTable t;
  t.j.assign(nmax + 1, 0.0);
  t.y.assign(nmax + 1, 0.0);
  const detail::Order01 base = detail::order01(x);
  const double xi2 = 2.0 / x;
  t.y[0] = base.y0;
  if (nmax >= 1) t.y[1] = base.y1;
  for (int n = 1; n < nmax; ++n) t.y[n + 1] = n * xi2 * t.y[n] - t.y[n - 1];

  // Upward J while the recurrence is stable, downward from a scaled top
  // value beyond that.
  const int nup = std::min(nmax, static_cast<int>(x));
  t.j[0] = base.j0;
  if (nmax >= 1) t.j[1] = base.j1;
  for (int n = 1; n < nup; ++n) t.j[n + 1] = n * xi2 * t.j[n] - t.j[n - 1];
  if (nup < nmax) {
    const ScaledBesselPair top = bessel_jy_scaled(nmax, x);
    // Scaled downward recurrence; values stay representable relative to top.
    double jn = top.j;
    double jm1 = top.jp + nmax / x * top.j;  // J_{nmax-1}
    int e = -top.exponent;
    t.j[nmax] = detail::ldexp_flush(jn, e);
    for (int n = nmax - 1; n > nup; --n) {
      t.j[n] = detail::ldexp_flush(jm1, e);
      const double prev = n * xi2 * jm1 - jn;
      jn = jm1;
      jm1 = prev;
      if (std::abs(jm1) > 0x1p64) {
        const int s = std::ilogb(jm1);
        jm1 = std::ldexp(jm1, -s);
        jn = std::ldexp(jn, -s);
        e += s;
      }
    }
  }
  return t;
}

/// Max of |J_m(x)| over 128 equispaced samples plus the endpoints of
/// [x_lo, x_hi].
inline double bessel_j_scan_max(int m, double x_lo, double x_hi, int samples = 128) {
  if (!(x_lo >= 0.0) || !(x_hi > x_lo)) throw std::domain_error("bessel_j_scan_max: need 0 <= x_lo < x_hi");
  double best = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / samples;
    best = std::max(best, std::abs(bessel_j(m, x)));
  }
  return best;
}

/// Max of |H_m(x)| over the same sampling; requires x_lo > 0.
inline double hankel_scan_max(int m, double x_lo, double x_hi, int samples = 128) {
  if (!(x_lo > 0.0) || !(x_hi > x_lo)) throw std::domain_error("hankel_scan_max: need 0 < x_lo < x_hi");
  double best = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / samples;
    best = std::max(best, std::abs(hankel1(m, x)));
  }
  return best;
}

}  // namespace radscat::specfun

#endif  // RADSCAT_SPECFUN_HPP
