#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "kawalab/delay.hpp"
#include "kawalab/grid.hpp"
#include "kawalab/operators.hpp"
#include "kawalab/params.hpp"

namespace kawalab {

/// Per-step record of every functional along a trajectory.
///
/// uxx0_sq[k] samples the trace at the stored state; uxx0_flux[k] is the
/// squared trace of the step midpoint (u_{k-1}+u_k)/2, i.e. exactly the
/// dissipation the scheme extracted over step k — the channel the energy
/// accounting pairs with d||u||^2/dt.
struct EnergyTrace {
  std::vector<double> t;
  std::vector<double> nsq;       // int u^2 dx
  std::vector<double> e_dd;     // (1/2)int u^2 + (h/2) iint b u^2(t - rho h)
  std::vector<double> e_mu;      // (1/2)int u^2 + (xi/2) iint a u^2(t - rho h)
  std::vector<double> e_xi;      // (1/2)int u^2 + (xi h/2) iint b u^2(t - rho h)
  std::vector<double> v1;        // int x u^2 dx
  std::vector<double> v2_mu;     // (xi/2) iint (1-rho) a u^2
  std::vector<double> v2_aux;    // (h/2) iint (1-rho) b u^2
  std::vector<double> uxx0_sq;
  std::vector<double> uxx0_flux;
  std::vector<double> damp_a;        // int a u^2
  std::vector<double> damp_b;        // int b u^2
  std::vector<double> damp_delay_a;  // int a u^2(., t-h)
  std::vector<double> damp_delay_b;  // int b u^2(., t-h)

  std::size_t size() const { return t.size(); }
  double dt() const { return size() > 1 ? t[1] - t[0] : 0.0; }
};

enum class EnergyKind { dd, mu, xi };
enum class LyapunovFamily { mu, aux };

/// Energy of the current (state, history) pair.  The b-weighted energies use
/// the kernel convention carried by the parameters (default drho dx).
inline double energy(const State& u, const DelayHistory& hist, const SimParams& p,
                     const SpatialGrid& g, EnergyKind which) {
  const RhoKernel b_kernel = p.b_energy_kernel;
  const double half_nsq = 0.5 * norm_sq(g, u.values);
  switch (which) {
    case EnergyKind::dd:
      return half_nsq +
             0.5 * p.delay * hist.rho_integral(p.b_profile.evaluate(g), g, b_kernel);
    case EnergyKind::mu:
      return half_nsq +
             0.5 * p.xi * hist.rho_integral(p.a_profile.evaluate(g), g, RhoKernel::uniform);
    case EnergyKind::xi:
      return half_nsq + 0.5 * p.xi * p.delay *
                            hist.rho_integral(p.b_profile.evaluate(g), g, b_kernel);
  }
  return half_nsq;
}

/// V = E + alpha V1 + beta V2 with V1 = int x u^2 and the family's
/// (1-rho)-weighted delay term.
inline double lyapunov(const State& u, const DelayHistory& hist, const SimParams& p,
                       const SpatialGrid& g, double alpha, double beta,
                       LyapunovFamily family) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("lyapunov: alpha and beta must be positive");
  double v1 = 0.0;
  for (int i = 0; i < g.n; ++i) v1 += g.x[i] * u.values[i] * u.values[i];
  v1 *= g.dx;
  double e, v2;
  if (family == LyapunovFamily::mu) {
    e = energy(u, hist, p, g, EnergyKind::mu);
    v2 = 0.5 * p.xi * hist.rho_integral(p.a_profile.evaluate(g), g, RhoKernel::one_minus_rho);
  } else {
    e = energy(u, hist, p, g, EnergyKind::xi);
    v2 = 0.5 * p.delay *
         hist.rho_integral(p.b_profile.evaluate(g), g, RhoKernel::one_minus_rho);
  }
  return e + alpha * v1 + beta * v2;
}

struct CheckReport {
  std::string name;
  double worst = 0.0;       // most positive violation (negative = satisfied)
  double worst_time = 0.0;
  double slack = 0.0;
  bool pass = true;
};

/// Default check slack, absorbing the Crank-Nicolson splitting error.
inline double default_slack(double dt, double e0) {
  return std::max(1e-8, 1e-3 * dt * e0);
}

enum class DissipationLaw {
  undamped_identity,  // d/dt int u^2 = -u_xx(0)^2
  mu_c0,              // E_mu' <= -C0 [u_xx(0)^2 + int a u^2 + int a u^2(t-h)]
  xi_monotone,        // E_xi' <= 0 (perturbed / auxiliary system, xi > 1)
  dd_growth          // E_dd' <= int b u^2 (energy may grow)
};

/// Verify the energy-dissipation law along a trace.  Rates are per-step
/// differences paired against midpoint channel values, which is exact for the
/// trace channel by construction of the scheme.
inline CheckReport dissipation_check(const EnergyTrace& tr, const SimParams& p,
                                     DissipationLaw law,
                                     std::optional<double> slack_opt = {},
                                     std::optional<double> c0_opt = {}) {
  CheckReport rep;
  const double dt = tr.dt();
  if (tr.size() < 2) throw std::invalid_argument("dissipation_check: trace too short");
  auto mid = [](const std::vector<double>& v, std::size_t k) {
    return 0.5 * (v[k] + v[k + 1]);
  };
  double e0;
  switch (law) {
    case DissipationLaw::undamped_identity: rep.name = "energy_identity"; e0 = tr.nsq[0]; break;
    case DissipationLaw::mu_c0: rep.name = "dissipation_mu_c0"; e0 = tr.e_mu[0]; break;
    case DissipationLaw::xi_monotone: rep.name = "dissipation_xi_monotone"; e0 = tr.e_xi[0]; break;
    case DissipationLaw::dd_growth: rep.name = "dissipation_dd_growth"; e0 = tr.e_dd[0]; break;
  }
  rep.slack = slack_opt.value_or(default_slack(dt, e0));
  double c0v = 0.0;
  if (law == DissipationLaw::mu_c0) {
    if (c0_opt) {
      c0v = *c0_opt;
    } else {
      c0v = std::min({0.5, p.mu1 - p.xi / (2.0 * p.delay) - 0.5 * p.mu2,
                      -0.5 * p.mu2 + p.xi / (2.0 * p.delay)});
      if (!(c0v > 0.0))
        throw std::invalid_argument("dissipation_check: delay condition fails, no C0");
    }
  }
  rep.worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
    double viol = 0.0;
    switch (law) {
      case DissipationLaw::undamped_identity: {
        const double rate = (tr.nsq[k + 1] - tr.nsq[k]) / dt;
        viol = std::abs(rate + tr.uxx0_flux[k + 1]);
        break;
      }
      case DissipationLaw::mu_c0: {
        const double rate = (tr.e_mu[k + 1] - tr.e_mu[k]) / dt;
        const double chan =
            tr.uxx0_flux[k + 1] + mid(tr.damp_a, k) + mid(tr.damp_delay_a, k);
        viol = rate + c0v * chan;
        break;
      }
      case DissipationLaw::xi_monotone:
        viol = (tr.e_xi[k + 1] - tr.e_xi[k]) / dt;
        break;
      case DissipationLaw::dd_growth:
        viol = (tr.e_dd[k + 1] - tr.e_dd[k]) / dt - mid(tr.damp_b, k);
        break;
    }
    if (viol > rep.worst) {
      rep.worst = viol;
      rep.worst_time = 0.5 * (tr.t[k] + tr.t[k + 1]);
    }
  }
  rep.pass = rep.worst <= rep.slack;
  return rep;
}

/// Verify V' + 2 gamma V <= 0 discretely: per-step difference quotient plus
/// 2 gamma times the midpoint level, so the delay kink at t = h never
/// straddles a stencil.
inline CheckReport lyapunov_decay_check(const EnergyTrace& tr, const SimParams& p,
                                        double alpha, double beta, double gamma,
                                        LyapunovFamily family,
                                        std::optional<double> slack_opt = {}) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0))
    throw std::invalid_argument("lyapunov_decay_check: constants must be positive");
  (void)p;
  const double dt = tr.dt();
  std::vector<double> V(tr.size());
  for (std::size_t k = 0; k < tr.size(); ++k) {
    V[k] = (family == LyapunovFamily::mu)
               ? tr.e_mu[k] + alpha * tr.v1[k] + beta * tr.v2_mu[k]
               : tr.e_xi[k] + alpha * tr.v1[k] + beta * tr.v2_aux[k];
  }
  CheckReport rep;
  rep.name = family == LyapunovFamily::mu ? "lyapunov_decay_mu" : "lyapunov_decay_aux";
  rep.slack = slack_opt.value_or(default_slack(dt, V[0]));
  rep.worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < V.size(); ++k) {
    const double viol = (V[k + 1] - V[k]) / dt + gamma * (V[k] + V[k + 1]);
    if (viol > rep.worst) {
      rep.worst = viol;
      rep.worst_time = 0.5 * (tr.t[k] + tr.t[k + 1]);
    }
  }
  rep.pass = rep.worst <= rep.slack;
  return rep;
}

struct ObservabilityResult {
  double e0 = 0.0;
  double denominator = 0.0;
  bool degenerate = false;    // no observable dissipation from nonzero data
  double ratio = 0.0;         // E(0) / denominator when not degenerate
};

/// E(0) / [ int_0^T u_xx(0,t)^2 dt + iint a u^2 + iint a u^2(., t-h) ].
/// A bound on this ratio that stays stable under refinement is the numerical
/// evidence for the observability inequality.
inline ObservabilityResult observability_ratio(const EnergyTrace& tr, const SimParams& p,
                                               double T) {
  (void)p;
  const double dt = tr.dt();
  if (T > tr.t.back() + 1e-12) throw std::invalid_argument("observability: T beyond trace");
  ObservabilityResult res;
  res.e0 = tr.e_mu[0];
  double den = 0.0;
  for (std::size_t k = 0; k + 1 < tr.size() && tr.t[k + 1] <= T + 1e-12; ++k) {
    den += dt * tr.uxx0_flux[k + 1];
    den += dt * 0.5 * (tr.damp_a[k] + tr.damp_a[k + 1]);
    den += dt * 0.5 * (tr.damp_delay_a[k] + tr.damp_delay_a[k + 1]);
  }
  res.denominator = den;
  if (den <= 1e-14 * std::max(res.e0, 1.0)) {
    res.degenerate = true;
    return res;
  }
  res.ratio = res.e0 / den;
  return res;
}

/// Discrete norm of the solution space B: max_t ||y||_L2 + (int ||y||_H2^2)^(1/2),
/// with the H^2 seminorm built from the same difference operators as the
/// stepper (consistency over accuracy).
inline double b_norm(const std::vector<State>& traj, const SpatialGrid& g, double dt,
                     const BandedMatrix& d1, const BandedMatrix& d2) {
  double max_l2 = 0.0, int_h2 = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& u = traj[k].values;
    const double l2 = norm_sq(g, u);
    max_l2 = std::max(max_l2, std::sqrt(l2));
    const auto ux = d1.apply(u);
    const auto uxx = d2.apply(u);
    const double h2 = l2 + norm_sq(g, ux) + norm_sq(g, uxx);
    const double w = (k == 0 || k + 1 == traj.size()) ? 0.5 : 1.0;
    int_h2 += w * h2 * dt;
  }
  return max_l2 + std::sqrt(int_h2);
}

struct BilinearCheckResult {
  double lhs = 0.0;   // int_0^T || u u_x - v v_x ||_L2 dt
  double rhs = 0.0;   // sqrt(2) T^(1/4) (||u||_B + ||v||_B) ||u - v||_B
  bool ok = false;
};

/// Verify the bilinear source-term estimate with K = sqrt(2) on two
/// trajectories sampled on the same grid and horizon.
inline BilinearCheckResult bilinear_estimate_check(const std::vector<State>& u,
                                                   const std::vector<State>& v,
                                                   const SpatialGrid& g, double dt) {
  if (u.size() != v.size() || u.empty())
    throw std::invalid_argument("bilinear check: trajectories must have equal length");
  if (u.front().values.size() != v.front().values.size())
    throw std::invalid_argument("bilinear check: grid mismatch");
  const auto d1 = derivative_operator(g, 1);
  const auto d2 = second_difference(g);
  const double T = dt * (u.size() - 1);

  double lhs = 0.0;
  std::vector<double> diff(g.n);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const auto ux = d1.apply(u[k].values);
    const auto vx = d1.apply(v[k].values);
    for (int i = 0; i < g.n; ++i)
      diff[i] = u[k].values[i] * ux[i] - v[k].values[i] * vx[i];
    const double w = (k == 0 || k + 1 == u.size()) ? 0.5 : 1.0;
    lhs += w * std::sqrt(norm_sq(g, diff)) * dt;
  }

  std::vector<State> umv(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    umv[k].time = u[k].time;
    umv[k].values.resize(g.n);
    for (int i = 0; i < g.n; ++i) umv[k].values[i] = u[k].values[i] - v[k].values[i];
  }
  const double bu = b_norm(u, g, dt, d1, d2);
  const double bv = b_norm(v, g, dt, d1, d2);
  const double bd = b_norm(umv, g, dt, d1, d2);
  BilinearCheckResult res;
  res.lhs = lhs;
  res.rhs = std::sqrt(2.0) * std::pow(T, 0.25) * (bu + bv) * bd;
  res.ok = lhs <= res.rhs + 1e-12 * (1.0 + res.rhs);
  return res;
}

}  // namespace kawalab
