#include <gtest/gtest.h>

#include <cmath>

#include "kawalab/params.hpp"

using namespace kawalab;

namespace {
SimParams base_params(double L = 1.0, double h = 1.0, double mu1 = 2.0, double mu2 = 1.0,
                      double xi = 2.0) {
  return SimParams::make(L, h, mu1, mu2, xi, CoefficientProfile::constant(1.0),
                         CoefficientProfile::constant(0.0), 16, 0.01, 1.0);
}
}  // namespace

TEST(Profiles, ConstantEverywhere) {
  const auto g = build_grid(1.0, 8);
  const auto v = CoefficientProfile::constant(1.0).evaluate(g);
  ASSERT_EQ(v.size(), 8u);
  for (double c : v) EXPECT_EQ(c, 1.0);
}

TEST(Profiles, IndicatorOutsideSupportIsZero) {
  const double L = 1.0;
  const auto g = build_grid(L, 99);
  const auto v = CoefficientProfile::indicator(1.0, 0.0, L / 2).evaluate(g);
  // value at x = 3L/4
  int idx = -1;
  for (int i = 0; i < g.n; ++i)
    if (std::abs(g.x[i] - 0.75 * L) < 0.6 * g.dx) idx = i;
  ASSERT_GE(idx, 0);
  EXPECT_EQ(v[idx], 0.0);
  // inside the support the amplitude is attained
  EXPECT_EQ(v[10], 1.0);
}

TEST(Profiles, SmoothedIndicatorMatchesMollifierAtMidpoint) {
  // hand evaluation: at the support midpoint both ramps saturate, so the
  // value is the amplitude exactly; half a transition width into the ramp
  // the C^2 smoothstep gives amplitude * s^3(s(6s-15)+10) at s = 1/2 = 1/2
  const auto g = build_grid(2.0, 199);
  const double lo = 0.5, hi = 1.5, cells = 10.0;
  const auto v =
      CoefficientProfile::indicator(3.0, lo, hi, /*smoothed=*/true, cells).evaluate(g);
  int mid = -1, half = -1;
  const double w = cells * g.dx;
  for (int i = 0; i < g.n; ++i) {
    if (std::abs(g.x[i] - 1.0) < 0.6 * g.dx) mid = i;
    if (std::abs(g.x[i] - (lo + 0.5 * w)) < 1e-12) half = i;
  }
  ASSERT_GE(mid, 0);
  EXPECT_NEAR(v[mid], 3.0, 1e-12);
  ASSERT_GE(half, 0);  // lo + w/2 lands on a grid point: 0.5 + 5 dx
  EXPECT_NEAR(v[half], 3.0 * 0.5, 1e-12);
}

TEST(Profiles, SupportOutsideDomainRejected) {
  const auto g = build_grid(1.0, 16);
  EXPECT_THROW(CoefficientProfile::indicator(1.0, 0.5, 1.5).evaluate(g), std::domain_error);
  EXPECT_THROW(CoefficientProfile::tabulated({1.0, 2.0}).evaluate(g), std::invalid_argument);
  EXPECT_THROW(CoefficientProfile::tabulated(std::vector<double>(16, -1.0)).evaluate(g),
               std::domain_error);
}

TEST(Params, DelayBufferAlignment) {
  // requested dt not dividing h is adjusted downward
  bool adjusted = false;
  const auto p = SimParams::make(1.0, 1.0, 2.0, 1.0, 2.0, CoefficientProfile::constant(1.0),
                                 CoefficientProfile::constant(0.0), 16, 0.3, 1.0, &adjusted);
  EXPECT_TRUE(adjusted);
  EXPECT_EQ(p.delay_steps, 4);
  EXPECT_LE(p.dt(), 0.3 + 1e-15);
  EXPECT_NEAR(p.delay_steps * p.dt(), p.delay, 1e-14);

  bool adjusted2 = true;
  const auto q = SimParams::make(1.0, 1.0, 2.0, 1.0, 2.0, CoefficientProfile::constant(1.0),
                                 CoefficientProfile::constant(0.0), 16, 0.25, 1.0, &adjusted2);
  EXPECT_FALSE(adjusted2);
  EXPECT_EQ(q.delay_steps, 4);
}

TEST(Validate, DelayConditionWindow) {
  {
    auto p = base_params();
    EXPECT_TRUE(validate(p).delay_window_ok);  // 1 < 2 < 3
  }
  {
    auto p = base_params(1.0, 1.0, 2.0, 1.0, 3.0);
    EXPECT_FALSE(validate(p).delay_window_ok);  // upper bound not strict
  }
  {
    auto p = base_params(1.0, 1.0, 2.0, 1.0, 1.0);
    EXPECT_FALSE(validate(p).delay_window_ok);  // lower bound not strict
  }
}

TEST(Validate, CriticalLengthThreshold) {
  auto p = base_params(5.0);
  EXPECT_TRUE(validate(p).length_ok);  // pi sqrt(3) = 5.4414...
  auto q = base_params(5.5);
  EXPECT_FALSE(validate(q).length_ok);
}

TEST(Validate, SupportCondition) {
  const double L = 1.0;
  auto mk = [&](CoefficientProfile a, CoefficientProfile b) {
    return SimParams::make(L, 1.0, 2.0, 1.0, 2.0, std::move(a), std::move(b), 32, 0.01, 1.0);
  };
  EXPECT_EQ(validate(mk(CoefficientProfile::constant(1.0), CoefficientProfile::constant(0.0)))
                .supp_condition,
            SuppCondition::no_b);
  EXPECT_EQ(validate(mk(CoefficientProfile::indicator(1.0, 0.0, 0.5),
                        CoefficientProfile::indicator(1.0, 0.1, 0.4)))
                .supp_condition,
            SuppCondition::b_in_a);
  EXPECT_EQ(validate(mk(CoefficientProfile::indicator(1.0, 0.0, 0.5),
                        CoefficientProfile::indicator(1.0, 0.6, 0.9)))
                .supp_condition,
            SuppCondition::b_not_in_a);
}

TEST(Validate, PureFunctionAndEquivalentForm) {
  const auto p = base_params(2.0, 0.5, 3.0, 1.0, 1.2);
  const auto r1 = validate(p);
  const auto r2 = validate(p);
  EXPECT_EQ(r1.delay_window_ok, r2.delay_window_ok);
  EXPECT_EQ(r1.length_ok, r2.length_ok);
  EXPECT_EQ(r1.messages, r2.messages);

  // delay_window_ok implies the equivalent form mu2 < xi/h < 2 mu1 - mu2
  for (double xi : {0.3, 0.51, 0.9, 1.3, 2.49, 2.8}) {
    auto q = base_params(2.0, 0.5, 3.0, 1.0, xi);
    const bool ok = validate(q).delay_window_ok;
    const bool equiv = (q.mu2 < xi / q.delay) && (xi / q.delay < 2.0 * q.mu1 - q.mu2);
    EXPECT_EQ(ok, equiv) << "xi = " << xi;
  }
}

TEST(Validate, WarnsOnLargeTimeStep) {
  auto p = SimParams::make(1.0, 1.0, 2.0, 1.0, 2.0, CoefficientProfile::constant(1.0),
                           CoefficientProfile::constant(0.0), 64, 0.5, 1.0);
  const auto r = validate(p);
  bool found = false;
  for (const auto& m : r.messages)
    if (m.find("exceeds dx") != std::string::npos) found = true;
  EXPECT_TRUE(found);
}
