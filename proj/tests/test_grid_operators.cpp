#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kawalab/grid.hpp"
#include "kawalab/operators.hpp"

using namespace kawalab;

namespace {

// polynomial helpers for manufactured derivatives (test-side oracle)
std::vector<double> poly_der(std::vector<double> c, int times = 1) {
  for (int k = 0; k < times; ++k) {
    if (c.size() <= 1) return {0.0};
    std::vector<double> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = i * c[i];
    c = std::move(d);
  }
  return c;
}
double poly_eval(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}
std::vector<double> sample_poly(const SpatialGrid& g, const std::vector<double>& c) {
  std::vector<double> v(g.n);
  for (int i = 0; i < g.n; ++i) v[i] = poly_eval(c, g.x[i]);
  return v;
}

double max_err(const std::vector<double>& a, const std::vector<double>& b, int lo, int hi) {
  double m = 0.0;
  for (int i = lo; i < hi; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l2_err(const SpatialGrid& g, const std::vector<double>& a,
              const std::vector<double>& b, int lo, int hi) {
  double s = 0.0;
  for (int i = lo; i < hi; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(g.dx * s);
}

}  // namespace

TEST(Grid, BasicConstruction) {
  const auto g = build_grid(1.0, 9);
  EXPECT_NEAR(g.dx, 0.1, 1e-15);
  EXPECT_NEAR(g.x.front(), 0.1, 1e-15);
  EXPECT_NEAR(g.x.back(), 0.9, 1e-15);
  EXPECT_NEAR(g.dx * (g.n + 1), 1.0, 1e-15);

  const auto g2 = build_grid(2.0 * M_PI, 99);
  EXPECT_NEAR(g2.dx, 2.0 * M_PI / 100.0, 1e-15);
  for (int i = 0; i + 1 < g2.n; ++i) EXPECT_LT(g2.x[i], g2.x[i + 1]);
  EXPECT_GT(g2.x.front(), 0.0);
  EXPECT_LT(g2.x.back(), g2.length);

  EXPECT_THROW(build_grid(1.0, 7), std::invalid_argument);
}

TEST(Operators, FirstDerivativeConvergesOnSine) {
  const double L = 1.0;
  double prev = 0.0;
  for (int n : {99, 199}) {
    const auto g = build_grid(L, n);
    const auto d1 = derivative_operator(g, 1);
    std::vector<double> u(g.n), ref(g.n);
    for (int i = 0; i < g.n; ++i) {
      u[i] = std::sin(M_PI * g.x[i] / L);
      ref[i] = M_PI / L * std::cos(M_PI * g.x[i] / L);
    }
    const auto du = d1.apply(u);
    const double e = max_err(du, ref, 0, g.n);
    if (n == 199) {
      EXPECT_LT(e, 1e-3);
      EXPECT_NEAR(prev / e, 4.0, 0.5);  // halving dx quarters the error
    }
    prev = e;
  }
}

TEST(Operators, ThirdDerivativeSecondOrderInterior) {
  // sin^4 vanishes to 4th order at both ends; its derivatives come from the
  // exact expansion sin^4 t = (3 - 4 cos 2t + cos 4t)/8
  const double L = 2.0;
  const double w = M_PI / L;
  auto d3_exact = [&](double x) {
    return -(8.0 * std::pow(2.0 * w, 3) * std::sin(2.0 * w * x) -
             2.0 * std::pow(4.0 * w, 3) * std::sin(4.0 * w * x)) / 16.0;
  };
  double prev = 0.0;
  for (int n : {199, 399}) {
    const auto g = build_grid(L, n);
    const auto d3 = derivative_operator(g, 3);
    std::vector<double> u(g.n), ref(g.n);
    for (int i = 0; i < g.n; ++i) {
      u[i] = std::pow(std::sin(w * g.x[i]), 4);
      ref[i] = d3_exact(g.x[i]);
    }
    const auto du = d3.apply(u);
    const double e = l2_err(g, du, ref, 3, g.n - 3);
    if (n == 399) EXPECT_NEAR(prev / e, 4.0, 0.5);
    prev = e;
  }
}

TEST(Operators, FifthDerivativeSecondOrderOnHighVanishingMode) {
  // sin^7 vanishes to 7th order at both ends:
  // sin^7 t = (35 sin t - 21 sin 3t + 7 sin 5t - sin 7t)/64
  const double L = 2.0;
  const double w = M_PI / L;
  const double c[4] = {35.0 / 64, -21.0 / 64, 7.0 / 64, -1.0 / 64};
  const int k[4] = {1, 3, 5, 7};
  double prev = 0.0;
  for (int n : {255, 511}) {
    const auto g = build_grid(L, n);
    const auto d5 = derivative_operator(g, 5);
    std::vector<double> u(g.n), ref(g.n);
    for (int i = 0; i < g.n; ++i) {
      double uv = 0.0, rv = 0.0;
      for (int j = 0; j < 4; ++j) {
        uv += c[j] * std::sin(k[j] * w * g.x[i]);
        rv += c[j] * std::pow(k[j] * w, 5) * std::cos(k[j] * w * g.x[i]);
      }
      u[i] = uv;
      ref[i] = rv;
    }
    const auto du = d5.apply(u);
    const double e = l2_err(g, du, ref, 0, g.n);
    if (n == 511) EXPECT_NEAR(prev / e, 4.0, 0.7);
    prev = e;
  }
}

TEST(Operators, ZeroStateAndLinearity) {
  const auto g = build_grid(1.5, 40);
  const auto d5 = derivative_operator(g, 5);
  const std::vector<double> zero(g.n, 0.0);
  for (double v : d5.apply(zero)) EXPECT_EQ(v, 0.0);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> dist;
  std::vector<double> u(g.n), v(g.n), w(g.n);
  for (int i = 0; i < g.n; ++i) {
    u[i] = dist(rng);
    v[i] = dist(rng);
    w[i] = 2.5 * u[i] - 0.75 * v[i];
  }
  for (int order : {1, 3, 5}) {
    const auto op = derivative_operator(g, order);
    const auto lhs = op.apply(w);
    const auto ou = op.apply(u), ov = op.apply(v);
    for (int i = 0; i < g.n; ++i)
      EXPECT_NEAR(lhs[i], 2.5 * ou[i] - 0.75 * ov[i], 1e-9 * std::abs(lhs[i]) + 1e-9);
  }
  EXPECT_THROW(derivative_operator(g, 2), std::invalid_argument);
}

TEST(Operators, BoundaryTraceOnPinnedPolynomials) {
  // x^2 -> 2, x^3 -> 0, x^4 -> 0: the quartic-fit trace is exact on these
  const auto g = build_grid(3.0, 200);
  std::vector<double> u(g.n);
  for (int i = 0; i < g.n; ++i) u[i] = g.x[i] * g.x[i];
  EXPECT_NEAR(boundary_trace_uxx0(u, g), 2.0, 1e-10);
  for (int i = 0; i < g.n; ++i) u[i] = std::pow(g.x[i], 3);
  EXPECT_NEAR(boundary_trace_uxx0(u, g), 0.0, 1e-10);
  State zero;
  zero.values.assign(g.n, 0.0);
  EXPECT_EQ(boundary_trace_uxx0(zero, g), 0.0);

  // second-order on a generic profile with u(0)=u_x(0)=0
  double prev = 0.0;
  for (int n : {100, 200}) {
    const auto gg = build_grid(3.0, n);
    std::vector<double> w(gg.n);
    for (int i = 0; i < gg.n; ++i)
      w[i] = gg.x[i] * gg.x[i] * std::exp(-gg.x[i]);  // u_xx(0) = 2
    const double e = std::abs(boundary_trace_uxx0(w, gg) - 2.0);
    if (n == 200) EXPECT_GT(prev / e, 3.0);
    prev = e;
  }
}

// The closure is pinned by this test: the quadratic form of D1 + D3 - D5
// must equal the half trace-square exactly, for arbitrary grid vectors.
TEST(Operators, DiscreteEnergyFormIsExactTraceSquare) {
  for (int n : {24, 111}) {
    const auto g = build_grid(2.0, n);
    BandedMatrix lin = derivative_operator(g, 1);
    lin.axpy(1.0, derivative_operator(g, 3));
    lin.axpy(-1.0, derivative_operator(g, 5));
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> dist;
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> u(g.n);
      for (double& v : u) v = dist(rng);
      const auto lu = lin.apply(u);
      const double q = inner(g, lu, u);
      const double tr = boundary_trace_uxx0(u, g);
      EXPECT_NEAR(q, 0.5 * tr * tr, 1e-8 * (std::abs(q) + 1.0));
    }
  }
}

TEST(Operators, FirstAndThirdAreExactlySkew) {
  const auto g = build_grid(1.0, 30);
  std::mt19937_64 rng(99);
  std::normal_distribution<double> dist;
  for (int order : {1, 3}) {
    const auto op = derivative_operator(g, order);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> u(g.n);
      for (double& v : u) v = dist(rng);
      const auto au = op.apply(u);
      EXPECT_NEAR(inner(g, au, u), 0.0, 1e-7);
    }
  }
}

TEST(Operators, InteriorRowsReproducePolynomialDerivatives) {
  // order-1 and order-3 stencils are exact on low-degree polynomials away
  // from the closure rows
  const auto g = build_grid(1.0, 50);
  const std::vector<double> quad = {0.3, -0.2, 1.0};  // 0.3 - 0.2 x + x^2
  const auto u = sample_poly(g, quad);
  const auto d1u = derivative_operator(g, 1).apply(u);
  const auto ref = sample_poly(g, poly_der(quad, 1));
  EXPECT_LT(max_err(d1u, ref, 1, g.n - 1), 1e-10);

  const std::vector<double> cub = {0.0, 0.0, 0.5, 2.0};
  const auto v = sample_poly(g, cub);
  const auto d3v = derivative_operator(g, 3).apply(v);
  for (int i = 3; i < g.n - 3; ++i) EXPECT_NEAR(d3v[i], 12.0, 1e-7);
}

TEST(Banded, LuSolvesAgainstMatvec) {
  const int n = 40;
  BandedMatrix m(n, 3, 3);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < n; ++i) {
    m.at(i, i) = 5.0 + dist(rng);
    for (int j = std::max(0, i - 3); j <= std::min(n - 1, i + 3); ++j)
      if (i != j) m.at(i, j) = dist(rng);
  }
  std::vector<double> x(n);
  for (double& v : x) v = dist(rng);
  const auto b = m.apply(x);
  const BandedLU lu(m);
  const auto sol = lu.solve(b);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(sol[i], x[i], 1e-11);
}
