#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "radscat/chebyshev.hpp"

using namespace radscat;

namespace {

template <typename F>
std::vector<cplx> samples(const ChebPanel& p, F f) {
  std::vector<cplx> v;
  for (double r : p.nodes()) v.push_back(f(r));
  return v;
}

template <typename F>
cplx quad(const ChebPanel& p, F f) {
  cplx s = 0.0;
  for (int i = 0; i < p.size(); ++i) s += p.weights()[i] * cplx(f(p.nodes()[i]));
  return s;
}

}  // namespace

TEST(Chebyshev, WeightsIntegrateOne) {
  const ChebPanel p = cheb_nodes_weights(-1.0, 1.0);
  EXPECT_EQ(p.size(), 48);
  double s = 0.0;
  for (double w : p.weights()) s += w;
  EXPECT_NEAR(s, 2.0, 1e-14);
}

TEST(Chebyshev, PolynomialExactness) {
  const ChebPanel p = cheb_nodes_weights(0.0, 1.0);
  EXPECT_NEAR(quad(p, [](double r) { return std::pow(r, 10); }).real(), 1.0 / 11.0, 1e-13);
}

TEST(Chebyshev, IntegratesSine) {
  const ChebPanel p = cheb_nodes_weights(0.0, std::numbers::pi);
  EXPECT_NEAR(quad(p, [](double r) { return std::sin(r); }).real(), 2.0, 1e-12);
}

TEST(Chebyshev, NodesAreClosedAndIncreasing) {
  const ChebPanel p = cheb_nodes_weights(2.0, 3.0);
  EXPECT_EQ(p.nodes().front(), 2.0);
  EXPECT_EQ(p.nodes().back(), 3.0);
  for (int i = 1; i < p.size(); ++i) EXPECT_LT(p.nodes()[i - 1], p.nodes()[i]);
}

TEST(Chebyshev, ConstantCoefficients) {
  const ChebPanel p = cheb_nodes_weights(0.0, 2.0);
  const auto v = samples(p, [](double) { return 1.0; });
  const ChebExpansion e = cheb_coeffs(p, v);
  EXPECT_NEAR(std::abs(e.coeffs[0] - 1.0), 0.0, 1e-14);
  for (std::size_t j = 1; j < e.coeffs.size(); ++j) EXPECT_LT(std::abs(e.coeffs[j]), 1e-14);
  EXPECT_NEAR(std::abs(cheb_eval(e, 1.234) - 1.0), 0.0, 1e-14);
}

TEST(Chebyshev, BasisFunctionT5) {
  const ChebPanel p = cheb_nodes_weights(1.0, 3.0);
  const auto v = samples(p, [&](double r) { return std::cos(5.0 * std::acos(p.to_reference(r))); });
  const ChebExpansion e = cheb_coeffs(p, v);
  for (std::size_t j = 0; j < e.coeffs.size(); ++j) EXPECT_NEAR(std::abs(e.coeffs[j]), j == 5 ? 1.0 : 0.0, 1e-13);
}

TEST(Chebyshev, T1VanishesAtMidpoint) {
  const ChebExpansion e{0.0, 4.0, {0.0, 1.0}};
  EXPECT_EQ(cheb_eval(e, 2.0), cplx(0.0));
}

TEST(Chebyshev, ExponentialReconstruction) {
  const ChebPanel p = cheb_nodes_weights(0.0, 1.0);
  const ChebExpansion e = cheb_coeffs(p, samples(p, [](double r) { return std::exp(r); }));
  EXPECT_LT(std::abs(e.coeffs[20]), 1e-15);
  EXPECT_NEAR(cheb_eval(e, 0.3).real(), std::exp(0.3), 1e-13);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 17; ++i) {
    const double r = u(rng);
    EXPECT_LT(std::abs(e(r) - std::exp(r)) / std::exp(r), 1e-13);
  }
}

TEST(Chebyshev, EvaluationOutsideThrows) {
  const ChebExpansion e{0.0, 1.0, {1.0}};
  EXPECT_THROW(e(1.5), std::out_of_range);
}

TEST(Chebyshev, ResolvedPolynomial) {
  const ChebPanel p = cheb_nodes_weights(0.0, 1.0);
  const auto v = samples(p, [](double r) { return 1.0 + r - 3.0 * std::pow(r, 5); });
  const Resolution res = resolved(p, std::span<const cplx>(v), 3.0, 1e-15);
  EXPECT_TRUE(res.resolved);
  EXPECT_LT(res.tail, 1e-15);
}

TEST(Chebyshev, UnresolvedOscillationThenHalving) {
  auto f = [](double r) { return std::cos(40.0 * std::numbers::pi * r); };
  double hi = 1.0;
  ChebPanel p = cheb_nodes_weights(0.0, hi);
  auto v = samples(p, f);
  const Resolution first = resolved(p, std::span<const cplx>(v), 1.0, 1e-13);
  EXPECT_FALSE(first.resolved);
  EXPECT_GT(first.tail, 1e-2);
  int halvings = 0;
  for (; halvings < 20; ++halvings) {
    p = cheb_nodes_weights(0.0, hi);
    v = samples(p, f);
    if (resolved(p, std::span<const cplx>(v), 1.0, 1e-13).resolved) break;
    hi /= 2.0;
  }
  EXPECT_GT(halvings, 0);
  EXPECT_LT(halvings, 20);
}

TEST(Chebyshev, ZeroFunctionIsResolved) {
  const ChebPanel p = cheb_nodes_weights(0.0, 1.0);
  const std::vector<cplx> v(p.size(), 0.0);
  const Resolution r = resolved(p, std::span<const cplx>(v), 0.0, 1e-13);
  EXPECT_TRUE(r.resolved);
  EXPECT_EQ(r.tail, 0.0);
}

TEST(ChebyshevProperty, RoundTrip) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  const ChebPanel p = cheb_nodes_weights(-0.7, 2.2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<cplx> v(p.size());
    double vmax = 0.0;
    for (auto& x : v) {
      x = cplx(g(rng), g(rng));
      vmax = std::max(vmax, std::abs(x));
    }
    const ChebExpansion e = cheb_coeffs(p, v);
    for (int i = 0; i < p.size(); ++i) ASSERT_LT(std::abs(e(p.nodes()[i]) - v[i]) / vmax, 1e-13);
  }
}

TEST(ChebyshevProperty, WeightsMatchInterpolantIntegral) {
  // The integral of the interpolant from its coefficients: int T_j = 2/(1 - j^2)
  // for even j on [-1, 1].
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  const ChebPanel p = cheb_nodes_weights(1.0, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<cplx> v(p.size());
    for (auto& x : v) x = g(rng);
    const ChebExpansion e = cheb_coeffs(p, v);
    cplx exact = 0.0;
    for (std::size_t j = 0; j < e.coeffs.size(); j += 2) exact += e.coeffs[j] * (2.0 / (1.0 - double(j * j)));
    exact *= 0.5 * p.length();
    cplx dot = 0.0;
    double scale = 0.0;
    for (int i = 0; i < p.size(); ++i) {
      dot += p.weights()[i] * v[i];
      scale += std::abs(p.weights()[i] * v[i]);
    }
    ASSERT_LT(std::abs(dot - exact) / scale, 1e-14);
  }
}

TEST(ChebyshevProperty, ResolutionIsMonotoneUnderRefinement) {
  const std::vector<std::function<cplx(double)>> fns = {
      [](double r) { return std::exp(r); },
      [](double r) { return std::sin(15.0 * r); },
      [](double r) { return std::exp(-8.0 * (r - 1.3) * (r - 1.3)); },
  };
  for (const auto& f : fns) {
    for (double len = 4.0; len > 1e-3; len /= 2.0) {
      const ChebPanel p = cheb_nodes_weights(0.5, 0.5 + len);
      const auto v = samples(p, f);
      const ChebPanel a = cheb_nodes_weights(0.5, 0.5 + len / 2), b = cheb_nodes_weights(0.5 + len / 2, 0.5 + len);
      const auto va = samples(a, f), vb = samples(b, f);
      double fmax = 0.0;
      for (const auto& x : v) fmax = std::max(fmax, std::abs(x));
      if (resolved(p, std::span<const cplx>(v), fmax, 1e-13).resolved) {
        EXPECT_TRUE(resolved(a, std::span<const cplx>(va), fmax, 1e-13).resolved);
        EXPECT_TRUE(resolved(b, std::span<const cplx>(vb), fmax, 1e-13).resolved);
      }
    }
  }
}

TEST(ChebyshevProperty, IntegrationMatrixLastRowIsWeights) {
  const ChebPanel p = cheb_nodes_weights(0.0, 3.0);
  const Eigen::MatrixXd I = p.integration_matrix();
  for (int j = 0; j < p.size(); ++j) EXPECT_NEAR(I(p.size() - 1, j), p.weights()[j], 1e-14);
  for (int j = 0; j < p.size(); ++j) EXPECT_NEAR(I(0, j), 0.0, 1e-14);
}
