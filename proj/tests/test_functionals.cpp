#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kawalab/functionals.hpp"
#include "kawalab/stepper.hpp"

using namespace kawalab;

namespace {

SimParams params_with(double L, int n, CoefficientProfile a, CoefficientProfile b,
                      double h = 1.0, double xi = 2.0) {
  return SimParams::make(L, h, 2.0, 1.0, xi, std::move(a), std::move(b), n, h / 20, 1.0);
}

State sample(const SpatialGrid& g, const std::function<double(double)>& f, double t = 0.0) {
  State s;
  s.time = t;
  s.values.resize(g.n);
  for (int i = 0; i < g.n; ++i) s.values[i] = f(g.x[i]);
  return s;
}

}  // namespace

TEST(Energy, SineHalfIntegralAndZeroHistory) {
  // u = sin(pi x/L), zero history, L = 1: E = (1/2) int sin^2 = 0.25
  const double L = 1.0;
  auto p = params_with(L, 200, CoefficientProfile::constant(1.0),
                       CoefficientProfile::constant(1.0));
  const auto g = build_grid(L, p.n);
  const auto hist = DelayHistory::init(zero_history(), g, p.delay_steps, p.dt());
  const auto u = sample(g, [&](double x) { return std::sin(M_PI * x / L); });
  for (auto kind : {EnergyKind::dd, EnergyKind::mu, EnergyKind::xi})
    EXPECT_NEAR(energy(u, hist, p, g, kind), 0.25, 1e-4);
}

TEST(Energy, ConstantHistoryBlock) {
  // zero state, history = 1, coefficient = 1, xi = 2, L = 1, kind mu:
  // E = (xi/2) * iint 1 = 1 up to the interior-trapezoid boundary cells
  const double L = 1.0;
  auto p = params_with(L, 400, CoefficientProfile::constant(1.0),
                       CoefficientProfile::constant(0.0));
  const auto g = build_grid(L, p.n);
  const auto hist =
      DelayHistory::init([](double, double) { return 1.0; }, g, p.delay_steps, p.dt());
  State zero;
  zero.time = 0.0;
  zero.values.assign(g.n, 0.0);
  EXPECT_NEAR(energy(zero, hist, p, g, EnergyKind::mu), 1.0, 3.0 * g.dx);
}

TEST(Energy, Fd1AndXiCoincideAtUnitXi) {
  auto p = params_with(2.0, 64, CoefficientProfile::constant(0.5),
                       CoefficientProfile::indicator(1.0, 0.3, 1.4), 0.8, 1.0);
  const auto g = build_grid(p.length, p.n);
  const auto hist = DelayHistory::init(
      [](double x, double t) { return std::sin(x) * (1.0 + t); }, g, p.delay_steps, p.dt());
  const auto u = sample(g, [](double x) { return x * (2.0 - x); });
  EXPECT_DOUBLE_EQ(energy(u, hist, p, g, EnergyKind::dd),
                   energy(u, hist, p, g, EnergyKind::xi));
}

TEST(Energy, QuadraticScalingExactAndMonotone) {
  auto p = params_with(1.5, 48, CoefficientProfile::indicator(1.0, 0.0, 0.7),
                       CoefficientProfile::indicator(0.5, 0.8, 1.2));
  const auto g = build_grid(p.length, p.n);
  const auto hist = DelayHistory::init(
      [](double x, double t) { return std::cos(x) * std::exp(t); }, g, p.delay_steps, p.dt());
  const auto u = sample(g, [](double x) { return x * x; });
  for (auto kind : {EnergyKind::dd, EnergyKind::mu, EnergyKind::xi}) {
    const double e1 = energy(u, hist, p, g, kind);
    EXPECT_GE(e1, 0.0);
    // scale the state and every slot by c: energy scales by c^2 exactly
    const double c = -2.5;
    State cu = u;
    for (double& v : cu.values) v *= c;
    auto chist = DelayHistory::init(
        [c](double x, double t) { return c * std::cos(x) * std::exp(t); }, g, p.delay_steps,
        p.dt());
    EXPECT_DOUBLE_EQ(energy(cu, chist, p, g, kind), c * c * e1);
  }
  // increasing a coefficient amplitude cannot decrease the delay term
  auto p_big = p;
  p_big.a_profile = CoefficientProfile::indicator(2.0, 0.0, 0.7);
  EXPECT_GE(energy(u, hist, p_big, g, EnergyKind::mu), energy(u, hist, p, g, EnergyKind::mu));
}

TEST(Lyapunov, ReducesToEnergyAndWeightsV1) {
  auto p = params_with(2.0, 128, CoefficientProfile::constant(1.0),
                       CoefficientProfile::constant(0.3));
  const auto g = build_grid(p.length, p.n);
  const auto hist = DelayHistory::init(zero_history(), g, p.delay_steps, p.dt());

  // alpha = beta -> 0 limit equals the energy (checked at tiny values)
  const auto u = sample(g, [](double x) { return std::sin(M_PI * x / 2.0); });
  const double e = energy(u, hist, p, g, EnergyKind::mu);
  EXPECT_NEAR(lyapunov(u, hist, p, g, 1e-14, 1e-14, LyapunovFamily::mu), e, 1e-10);
  EXPECT_THROW(lyapunov(u, hist, p, g, 0.0, 0.1, LyapunovFamily::mu), std::invalid_argument);

  // constant state u = 1 (hypothetically): V1 contributes alpha int_0^2 x dx = 2 alpha
  const auto one = sample(g, [](double) { return 1.0; });
  const double alpha = 0.37;
  const double v = lyapunov(one, hist, p, g, alpha, 1e-16, LyapunovFamily::mu);
  const double e1 = energy(one, hist, p, g, EnergyKind::mu);
  EXPECT_NEAR(v - e1, alpha * 2.0, alpha * 3.0 * g.dx);
}

TEST(Lyapunov, EquivalenceSandwichOnRandomData) {
  // E <= V <= (1 + max(2 alpha L, beta)) E on random states and histories
  const double L = 2.5;
  auto p = params_with(L, 64, CoefficientProfile::constant(1.0),
                       CoefficientProfile::constant(0.0));
  const auto g = build_grid(L, p.n);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 25; ++trial) {
    const double alpha = 0.05 + 0.2 * std::abs(dist(rng));
    const double beta = 0.05 + 0.2 * std::abs(dist(rng));
    std::vector<double> coeffs(5);
    for (double& c : coeffs) c = dist(rng);
    auto hist = DelayHistory::init(
        [&](double x, double t) {
          return coeffs[0] * std::sin(x) * (1 + t) + coeffs[1] * std::cos(2 * x) * t;
        },
        g, p.delay_steps, p.dt());
    State u;
    u.values.resize(g.n);
    for (int i = 0; i < g.n; ++i)
      u.values[i] = coeffs[2] * std::sin(M_PI * g.x[i] / L) +
                    coeffs[3] * std::sin(2 * M_PI * g.x[i] / L);
    const double e = energy(u, hist, p, g, EnergyKind::mu);
    const double v = lyapunov(u, hist, p, g, alpha, beta, LyapunovFamily::mu);
    EXPECT_LE(e, v + 1e-12);
    EXPECT_LE(v, (1.0 + std::max(2 * alpha * L, beta)) * e + 1e-12);
  }
}

TEST(Functionals, DiscretePoincareOnSmoothStates) {
  // int u^2 <= (L^2/pi^2) int u_x^2 + O(dx^2) on low-mode states; equality
  // at the first sine mode up to quadrature error
  const double L = 2.0;
  const auto g = build_grid(L, 256);
  const auto d1 = derivative_operator(g, 1);
  auto check = [&](const std::vector<double>& u) {
    const auto ux = d1.apply(u);
    return std::make_pair(norm_sq(g, u), L * L / (M_PI * M_PI) * norm_sq(g, ux));
  };
  std::vector<double> s1(g.n);
  for (int i = 0; i < g.n; ++i) s1[i] = std::sin(M_PI * g.x[i] / L);
  auto [lhs, rhs] = check(s1);
  // the u_x^2 quadrature misses the nonzero boundary cells, an O(dx) effect
  EXPECT_NEAR(lhs, rhs, 3.0 * g.dx * lhs);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> u(g.n, 0.0);
    for (int k = 1; k <= 6; ++k) {
      const double c = dist(rng);
      for (int i = 0; i < g.n; ++i) u[i] += c * std::sin(k * M_PI * g.x[i] / L);
    }
    auto [l, r] = check(u);
    EXPECT_LE(l, r + 4.0 * g.dx * norm_sq(g, u));
  }
}

TEST(Checks, ZeroTrajectoryHasNoViolations) {
  auto p = params_with(2.0, 32, CoefficientProfile::constant(1.0),
                       CoefficientProfile::constant(0.0));
  p.t_final = 0.5;
  const auto traj = simulate(p, SystemVariant::make(VariantTag::mu), zero_history());
  const auto rep = dissipation_check(traj.trace, p, DissipationLaw::mu_c0);
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(rep.worst, 0.0 + 1e-15);
  const auto lrep = lyapunov_decay_check(traj.trace, p, 0.01, 0.1, 0.05, LyapunovFamily::mu);
  EXPECT_TRUE(lrep.pass);

  const auto obs = observability_ratio(traj.trace, p, 0.5);
  EXPECT_TRUE(obs.degenerate);
}

TEST(Checks, UndampedIdentityHoldsAndC0LawOnLinearRun) {
  // undamped: |d/dt int u^2 + flux| ~ roundoff with the exact-trace closure
  const double L = 2.0;
  const int n = 128;
  auto p = SimParams::make(L, 0.5, 0.0, 0.0, 1.0, CoefficientProfile::constant(0.0),
                           CoefficientProfile::constant(0.0), n, L / (n + 1) / 2, 2.0);
  const auto traj = simulate(p, SystemVariant::make(VariantTag::undamped_linear),
                             [&](double x, double) { return std::sin(M_PI * x / L); });
  const auto rep =
      dissipation_check(traj.trace, p, DissipationLaw::undamped_identity, 1e-7);
  EXPECT_TRUE(rep.pass) << "worst " << rep.worst;

  // mu variant with the delay window satisfied: C0 law within default slack
  auto q = SimParams::make(3.0, 1.0, 2.0, 1.0, 1.5,
                           CoefficientProfile::indicator(1.0, 0.0, 1.5),
                           CoefficientProfile::constant(0.0), 200, 1.0 / 134, 4.0);
  const auto traj2 = simulate(q, SystemVariant::make(VariantTag::linear_mu),
                              [&](double x, double t) {
                                const double s = std::sin(M_PI * x / 3.0);
                                return s * s * std::exp(0.5 * t);
                              });
  const auto rep2 =
      dissipation_check(traj2.trace, q, DissipationLaw::mu_c0, 1e-3 * traj2.trace.e_mu[0]);
  EXPECT_TRUE(rep2.pass) << "worst " << rep2.worst;

  // a deliberately huge gamma is reported as a violation
  const auto bad = lyapunov_decay_check(traj2.trace, q, 0.0125, 0.5, 10.0, LyapunovFamily::mu);
  EXPECT_FALSE(bad.pass);
  EXPECT_GT(bad.worst, bad.slack);
}

TEST(Checks, SmallerDampingRegionGivesLargerObservabilityRatio) {
  // data parked away from a small damping region is observed poorly there,
  // which is what drives the observability constant up
  const double L = 3.0, T = 1.0;
  auto run_ratio = [&](double support_hi) {
    auto p = SimParams::make(L, 1.0, 2.0, 1.0, 1.5,
                             CoefficientProfile::indicator(1.0, 0.0, support_hi),
                             CoefficientProfile::constant(0.0), 128, 0.01, T);
    const auto traj = simulate(p, SystemVariant::make(VariantTag::linear_mu),
                               [&](double x, double t) {
                                 const double c = 0.8 * L, w = 0.1 * L;
                                 const double bump = std::exp(-0.5 * (x - c) * (x - c) / (w * w));
                                 return t < 0.0 ? 0.0 : bump;
                               });
    const auto obs = observability_ratio(traj.trace, p, T);
    EXPECT_FALSE(obs.degenerate);
    return obs.ratio;
  };
  EXPECT_GT(run_ratio(L / 4), run_ratio(L));
}

TEST(Bilinear, IdenticalArgumentsGiveZero) {
  const auto g = build_grid(1.0, 40);
  std::vector<State> traj(5);
  for (int k = 0; k < 5; ++k) {
    traj[k].time = 0.1 * k;
    traj[k].values.resize(g.n);
    for (int i = 0; i < g.n; ++i)
      traj[k].values[i] = std::sin(M_PI * g.x[i]) * std::exp(-0.1 * k);
  }
  const auto res = bilinear_estimate_check(traj, traj, g, 0.1);
  EXPECT_EQ(res.lhs, 0.0);
  EXPECT_EQ(res.rhs, 0.0);
  EXPECT_TRUE(res.ok);
}

TEST(Bilinear, ZeroSecondArgumentReduction) {
  // v = 0: int ||u u_x|| <= sqrt(2) T^(1/4) ||u||_B^2
  const double L = 1.0;
  const auto g = build_grid(L, 80);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int steps = 21;
  const double dt = 1.0 / (steps - 1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<State> u(steps), zero(steps);
    double c1 = dist(rng), c2 = dist(rng), c3 = dist(rng);
    for (int k = 0; k < steps; ++k) {
      const double t = k * dt;
      u[k].time = t;
      u[k].values.resize(g.n);
      zero[k].time = t;
      zero[k].values.assign(g.n, 0.0);
      for (int i = 0; i < g.n; ++i) {
        const double x = g.x[i];
        const double env = x * x * (L - x) * (L - x);  // H0^2-compatible
        u[k].values[i] = env * (c1 + c2 * std::cos(3 * t) * x + c3 * std::sin(2 * x + t));
      }
    }
    const auto res = bilinear_estimate_check(u, zero, g, dt);
    EXPECT_TRUE(res.ok) << "lhs " << res.lhs << " rhs " << res.rhs;
  }
}

TEST(Trace, StepperFunctionalsMatchStandaloneEvaluation) {
  // the per-step fast path in the stepper agrees with the one-shot
  // functional evaluation on (state, history)
  auto p = params_with(2.0, 48, CoefficientProfile::indicator(1.0, 0.0, 1.0),
                       CoefficientProfile::indicator(0.4, 1.2, 1.8), 0.5, 1.5);
  p.t_final = 0.3;
  HistorySampler z0 = [](double x, double t) { return std::sin(x) * std::exp(t); };
  const auto traj = simulate(p, SystemVariant::make(VariantTag::damped_delayed), z0);
  const auto g = build_grid(p.length, p.n);
  const auto& hist = traj.final_history;
  const auto& last = hist.current();
  const std::size_t k = traj.trace.size() - 1;
  EXPECT_NEAR(traj.trace.e_dd[k], energy(last, hist, p, g, EnergyKind::dd), 1e-12);
  EXPECT_NEAR(traj.trace.e_mu[k], energy(last, hist, p, g, EnergyKind::mu), 1e-12);
  EXPECT_NEAR(traj.trace.e_xi[k], energy(last, hist, p, g, EnergyKind::xi), 1e-12);
  const double v = lyapunov(last, hist, p, g, 0.3, 0.7, LyapunovFamily::aux);
  EXPECT_NEAR(v, traj.trace.e_xi[k] + 0.3 * traj.trace.v1[k] + 0.7 * traj.trace.v2_aux[k],
              1e-12);
}
