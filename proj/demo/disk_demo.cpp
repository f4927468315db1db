// Plane wave on a homogeneous disk: compares the solver with the closed-form
// mode series and prints the scattered field along a ray.

#include <cstdio>

#include "radscat/radscat.hpp"

int main() {
  using namespace radscat;
  const double k = 10.0, c = 0.5, b = 1.0;
  const IncidentField inc = plane_wave(k);
  const SolverState s = solve_scattering(constant_disk(c, b), inc, k, 1e-13);
  std::printf("k = %g, disk q = %g on r < %g, retained |m| <= %d, solve %.3f s\n", k, c, b, s.M(), s.solve_seconds());
  std::printf("%6s %24s %24s %10s\n", "r", "Re u_s", "Im u_s", "|err|");
  const double th = 0.4;
  for (int i = 0; i <= 10; ++i) {
    const double r = 0.2 * i;
    const double x = r * std::cos(th), y = r * std::sin(th);
    cplx ref = 0.0;
    for (int m = -40; m <= 40; ++m) {
      ref += disk_mode(m, k, c, b, inc.analytic_modes(m)).scattered(r) * std::exp(cplx(0.0, m * th)) / kTwoPi;
    }
    const cplx u = s.scattered(x, y);
    std::printf("%6.2f %24.16e %24.16e %10.2e\n", r, u.real(), u.imag(), std::abs(u - ref));
  }
  std::printf("outgoing flux through r = 2: %.12g\n", outgoing_flux(s, 2.0));
}
