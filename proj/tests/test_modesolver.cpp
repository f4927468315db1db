#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "radscat/assembly.hpp"
#include "radscat/modesolver.hpp"
#include "radscat/selftest.hpp"

using namespace radscat;

TEST(ModeSolver, KernelContinuousOnDiagonal) {
  for (int m : {0, 3, 12}) {
    const double r = 1.7, d = 1e-9;
    const cplx a = kernel(m, 4.0, r, r - d), b = kernel(m, 4.0, r, r + d);
    EXPECT_LT(std::abs(a - b), 1e-7 * std::abs(a)) << m;
  }
}

TEST(ModeSolver, KernelValue) {
  const cplx want = cplx(0.0, -std::numbers::pi / 2) * oracle::J(0, 1.0) * oracle::H(0, 2.0) * 1.0;
  EXPECT_LT(std::abs(kernel(0, 1.0, 2.0, 1.0) - want), 1e-14);
  // Symmetric in the roles of min and max, up to the weight t.
  EXPECT_LT(std::abs(kernel(2, 3.0, 1.0, 2.0) / 2.0 - kernel(2, 3.0, 2.0, 1.0) / 1.0), 1e-14);
}

TEST(ModeSolver, GreensApplyOfZero) {
  const RadialField u = greens_apply(3, 5.0, [](double) { return cplx{}; }, 2.0);
  for (double r : {0.1, 1.0, 1.9, 3.0}) EXPECT_EQ(u(r), cplx(0.0));
}

TEST(ModeSolver, GreensFunctionSecondOrder) {
  for (auto [m, k] : {std::pair{0, 2.0}, {3, 4.0}, {7, 9.0}}) {
    const auto [e1, e2] = selftest::greens_errors(m, k);
    EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2) << m;
  }
}

TEST(ModeSolver, ZeroPanelInterval) {
  const RadialPotential z = zero_potential(3.0);
  const IntervalData d = build_interval(4, 6.0, cheb_nodes_weights(1.0, 2.0), z, true);
  EXPECT_TRUE(d.q_zero);
  EXPECT_EQ(d.s, Mat2::Zero());
  EXPECT_EQ(d.chi, Vec2::Zero());
  for (int i = 0; i < d.panel.size(); ++i) {
    EXPECT_EQ(d.sol_j[i], cplx(0.0));
    EXPECT_EQ(d.sol_h[i], cplx(0.0));
  }
}

TEST(ModeSolver, MergeOfTransparentIntervals) {
  const Vec2 a(cplx(1.0, 2.0), cplx(-0.5, 0.25)), b(cplx(3.0, -1.0), cplx(0.125, 4.0));
  const MergeResult r = merge(Mat2::Zero(), a, Mat2::Zero(), b);
  EXPECT_EQ(r.s, Mat2::Zero());
  EXPECT_LT((r.chi - (a + b)).norm(), 1e-15);
}

TEST(ModeSolver, DownwardPassOfZeroData) {
  std::vector<IntervalData> ivs(5);
  const MergeTree tree = merge_sweep(ivs);
  downward_pass(tree, ivs, Vec2::Zero());
  for (const auto& d : ivs) {
    EXPECT_EQ(d.phi, Vec2::Zero());
    EXPECT_EQ(d.alpha, Vec2::Zero());
  }
}

TEST(ModeSolver, ZeroPotentialMode) {
  const ModeSolution s = solve_mode(4, 10.0, zero_potential(2.0), 1e-13, 1.0);
  EXPECT_TRUE(s.data().negligible);
  EXPECT_EQ(s.data().mu, cplx(0.0));
  EXPECT_EQ(s.data().beta, cplx(0.0));
  for (double r : {0.0, 0.5, 1.9, 2.5}) EXPECT_EQ(eval_mode(s, r), cplx(0.0));
}

TEST(ModeSolver, FreeSpaceInnerCutoff) {
  const double k = 30.0, eps = 1e-13;
  for (int m : {5, 60, 200}) {
    const double r = compute_r_min(m, k, kTwoPi, eps);
    EXPECT_LT(std::abs(specfun::bessel_j(m, k * r)), eps / 10);
    if (r < kTwoPi) EXPECT_GE(std::abs(specfun::bessel_j(m, k * r * (1 + 1e-9))), eps / 10 * 0.999);
  }
  EXPECT_EQ(compute_r_min(0, k, kTwoPi, eps), 0.0);
}

TEST(ModeSolver, CutoffMovesInwardInsideDenseMedia) {
  // With 1 + q > 1 the mode oscillates further in than J_m(kr) suggests.
  const RadialPotential q = luneburg_lens();
  const double free = compute_r_min(20, 10.0, kTwoPi, 1e-13);
  const double inner = compute_r_min(20, EffectiveArgument(10.0, q, kTwoPi), 10.0, 1e-13);
  EXPECT_LT(inner, free);
  EXPECT_NEAR(inner, free / std::sqrt(2.0), 0.02 * free);
}

TEST(ModeSolver, BreakpointsArePanelEnds) {
  const RadialPotential q = random_discontinuous(1234);
  const auto d = solve_unit_mode(40, 30.0, q, {});
  std::vector<double> ends;
  for (const auto& p : d->panels) ends.push_back(p.lo);
  ends.push_back(d->panels.back().hi);
  for (double bp : q.breakpoints()) {
    if (bp <= d->inner_radius()) continue;
    EXPECT_NE(std::find(ends.begin(), ends.end(), bp), ends.end()) << bp;
  }
}

TEST(ModeSolver, LowOrderGradesTowardOrigin) {
  // At tight eps the cutoff for m = 1 sits near 1e-16, far below 1e-14 b.
  const RadialPotential q = luneburg_lens();
  const Partition part = adaptive_partition(1, 4.675514, q, kTwoPi, 1e-14);
  ASSERT_FALSE(part.panels.empty());
  EXPECT_EQ(part.panels.back().panel.lo(), part.r_min);
  EXPECT_LT(part.r_min, 1e-15);
  EXPECT_NO_THROW(solve_unit_mode(1, 4.675514, q, ModeOptions{1e-14}));
}

TEST(ModeSolver, NonFinitePotentialIsReported) {
  const RadialPotential q([](double r) { return r < 1.2345 ? std::nan("") : 0.5; }, 2.0, {}, "broken");
  EXPECT_THROW(adaptive_partition(0, 3.0, q, 2.0, 1e-13), SolverError);
}

TEST(ModeSolver, PanelCountRegression) {
  // Frozen counts for eps = 1e-13.
  struct Row {
    RadialPotential q;
    double k;
    int m;
    std::size_t panels;
  };
  const Row rows[] = {
      {gaussian_bump(), 30.0, 0, 159},
      {gaussian_bump(), 30.0, 50, 125},
      {gaussian_bump(), 30.0, 150, 44},
      {random_discontinuous(1234), 30.0, 0, 166},
      {random_discontinuous(1234), 30.0, 100, 103},
      {luneburg_lens(), 10.0, 20, 65},
  };
  for (const auto& r : rows) EXPECT_EQ(solve_unit_mode(r.m, r.k, r.q, {})->panels.size(), r.panels) << r.q.label() << " m=" << r.m;
}

TEST(ModeSolver, MergeMatchesDenseSolve) { EXPECT_LT(selftest::merge_vs_dense(6, 8.0), 1e-11); }

TEST(ModeSolver, HierarchicalMatchesMonolithicSmall) {
  const RadialPotential q([](double r) { return std::exp(-r * r); }, 3.0, {}, "bump");
  for (int m : {0, 4}) {
    const auto d = solve_unit_mode(m, 8.0, q, {});
    const oracle::MonolithicNystrom ref(m, 8.0, [&](double r) { return q(r); }, 3.0, 20, 20);
    double err = 0.0, nrm = 0.0;
    for (std::size_t i = 0; i < ref.nodes().size(); ++i) {
      err = std::max(err, std::abs(d->density(ref.nodes()[i]) - ref.rho()[i]));
      nrm = std::max(nrm, std::abs(ref.rho()[i]));
    }
    EXPECT_LT(err / nrm, 1e-11) << m;
  }
}

TEST(ModeSolverProperty, ScatteringRelationsAtEveryPanel) {
  // alpha = S phi + chi on each panel, and the incoming coefficients are
  // prefix sums of the outgoing ones.
  const auto d = solve_unit_mode(12, 20.0, gaussian_bump(), {});
  double scale = 0.0;
  for (const auto& p : d->panels) scale = std::max(scale, p.alpha.cwiseAbs().maxCoeff());
  cplx inner = 0.0;
  for (const auto& p : d->panels) {
    EXPECT_LT((p.alpha - (p.s * p.phi + p.chi)).cwiseAbs().maxCoeff(), 1e-10 * scale);
    EXPECT_LT(std::abs(p.phi[0] - inner), 1e-12 * scale);
    inner += p.alpha[0];
  }
}

TEST(ModeSolverProperty, ContinuityAtPanelEnds) {
  for (const auto& q : {gaussian_bump(), random_discontinuous(1234)}) {
    for (int m : {0, 30, 120}) {
      const auto d = solve_unit_mode(m, 30.0, q, {});
      double umax = 0.0;
      for (std::size_t i = 0; i < d->panels.size(); ++i) {
        for (int j = 0; j <= 20; ++j) {
          const auto& p = d->panels[i];
          umax = std::max(umax, std::abs(d->value_on_panel(static_cast<int>(i), p.lo + (p.hi - p.lo) * j / 20)));
        }
      }
      for (std::size_t i = 0; i + 1 < d->panels.size(); ++i) {
        const double r = d->panels[i].hi;
        EXPECT_LT(std::abs(d->value_on_panel(static_cast<int>(i), r) - d->value_on_panel(static_cast<int>(i + 1), r)),
                  1e-11 * umax);
      }
      const double b = d->b, rn = d->inner_radius();
      EXPECT_LT(std::abs(d->value_on_panel(static_cast<int>(d->panels.size()) - 1, b) - d->exterior(b)), 1e-11 * umax);
      if (rn > 0.0) EXPECT_LT(std::abs(d->value_on_panel(0, rn) - d->interior(rn)), 1e-11 * umax);
    }
  }
}

TEST(ModeSolverProperty, ExteriorIsOutgoingHankel) {
  const auto d = solve_unit_mode(7, 15.0, gaussian_bump(), {});
  const double b = d->b;
  for (int i = 0; i < 10; ++i) {
    const double r = b * (1.0 + i / 9.0);
    const cplx ratio = d->value(r) / oracle::H(7, 15.0 * r);
    EXPECT_LT(std::abs(ratio - d->mu), 1e-11 * std::abs(d->mu));
  }
}

TEST(ModeSolverProperty, ReflectedOrderScalesUnitSolution) {
  const RadialPotential q = gaussian_bump();
  const ModeSolution plus = solve_mode(9, 12.0, q, 1e-13, cplx(0.3, 0.4));
  const ModeSolution minus = plus.reflected(cplx(-1.1, 0.2));
  EXPECT_EQ(&plus.data(), &minus.data());
  EXPECT_EQ(minus.m(), -9);
  const ModeSolution direct = solve_mode(-9, 12.0, q, 1e-13, cplx(-1.1, 0.2));
  for (double r : {0.5, 2.0, 4.0, 7.0}) {
    const cplx want = cplx(-1.1, 0.2) / cplx(0.3, 0.4) * eval_mode(plus, r);
    EXPECT_LT(std::abs(eval_mode(minus, r) - want), 1e-14 * std::abs(want) + 1e-300);
    EXPECT_EQ(eval_mode(direct, r), eval_mode(minus, r));
  }
}

TEST(ModeSolverProperty, PerModeOdeResidual) {
  // u'' + u'/r + (k^2 (1 + q) - m^2/r^2) u = -k^2 q J_m(kr) away from the
  // inner cutoff, by central differences on the panel expansions.
  const double k = 10.0;
  const RadialPotential q = gaussian_bump();
  for (int m : {0, 6, 25}) {
    const auto d = solve_unit_mode(m, k, q, {});
    double worst = 0.0, umax = 0.0;
    for (int i = 0; i < 40; ++i) {
      const double r = std::max(d->inner_radius(), 0.3) + 0.12 * i + 0.013;
      if (r > 5.5) break;
      auto u = [&](double s) { return d->value(s); };
      const double h = 1e-3;
      const cplx d2 = (-u(r + 2 * h) + 16.0 * u(r + h) - 30.0 * u(r) + 16.0 * u(r - h) - u(r - 2 * h)) / (12 * h * h);
      const cplx d1 = (-u(r + 2 * h) + 8.0 * u(r + h) - 8.0 * u(r - h) + u(r - 2 * h)) / (12 * h);
      const cplx res = d2 + d1 / r + (k * k * (1 + q(r)) - double(m) * m / (r * r)) * u(r) + k * k * q(r) * oracle::J(m, k * r);
      worst = std::max(worst, std::abs(res));
      umax = std::max(umax, std::abs(u(r)));
    }
    EXPECT_LT(worst / (k * k * std::max(umax, 1e-3)), 1e-6) << m;
  }
}
