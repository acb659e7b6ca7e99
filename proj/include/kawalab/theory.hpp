#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kawalab/functionals.hpp"
#include "kawalab/params.hpp"

namespace kawalab {

// Explicit constants from the stability theory.  Every bound is implemented
// exactly as stated; a value is absent whenever its producing conditions
// fail, never silently clamped.

/// C0 = min{ 1/2, mu1 - xi/(2h) - mu2/2, -mu2/2 + xi/(2h) }.
/// Positive exactly on the open delay-condition window.
inline std::optional<double> c0(double h, double mu1, double mu2, double xi) {
  const double v = std::min({0.5, mu1 - xi / (2.0 * h) - 0.5 * mu2,
                             -0.5 * mu2 + xi / (2.0 * h)});
  if (!(v > 0.0)) return std::nullopt;
  return v;
}

/// Lyapunov constants for the mu-system on L < pi*sqrt(3), default midpoint
/// selection rule alpha = alpha_max/2, beta = beta_max/2, r = r_max/2
/// (the theorem gives open constraint regions with no selection; midpoints
/// maximize robustness to discretization slack).
struct LocalDecayConstants {
  bool ok = false;
  double alpha_max = 0, beta_max = 0, r_max = 0;
  double alpha = 0, beta = 0, r = 0;
  double gamma = 0, kappa = 0;
};

inline LocalDecayConstants local_decay_constants(double L, double h, double mu1, double mu2, double xi,
                                  double fraction = 0.5,
                                  std::optional<double> r_override = {}) {
  LocalDecayConstants c;
  if (!(L < kPiSqrt3)) return c;
  if (!(h * mu2 < xi && xi < h * (2.0 * mu1 - mu2))) return c;
  const double pi2 = M_PI * M_PI;
  c.beta_max = 2.0 * h / xi * (mu1 - xi / (2.0 * h) - 0.5 * mu2);
  c.beta = fraction * c.beta_max;
  const double a1 =
      (mu1 - xi / (2.0 * h) - 0.5 * mu2 - c.beta * xi / (2.0 * h)) / (2.0 * L * mu1 + L * mu2);
  c.alpha_max = a1;
  if (mu2 > 0.0) {
    const double a2 = (xi / (2.0 * h) - 0.5 * mu2) / (L * mu2);
    c.alpha_max = std::min(a1, a2);
  }
  c.alpha = fraction * c.alpha_max;
  c.r_max = (9.0 * pi2 - 3.0 * L * L) / (2.0 * std::pow(L, 1.5) * pi2);
  c.r = r_override.value_or(fraction * c.r_max);
  const double g1_num = 9.0 * pi2 - 3.0 * L * L - 2.0 * std::pow(L, 1.5) * c.r * pi2;
  if (!(g1_num > 0.0) || !(c.alpha > 0.0) || !(c.beta > 0.0)) return c;
  const double g1 = g1_num * c.alpha / (3.0 * L * L * (1.0 + 2.0 * L * c.alpha));
  const double g2 = c.beta * xi / (2.0 * h * (xi * c.beta + xi));
  c.gamma = std::min(g1, g2);
  c.kappa = 1.0 + std::max(2.0 * c.alpha * L, c.beta);
  c.ok = true;
  return c;
}

/// Lyapunov constants for the auxiliary (perturbed, linearized) system:
/// needs L < pi*sqrt(3) and xi > 1.
struct AuxiliaryDecayConstants {
  bool ok = false;
  double alpha_max = 0, beta_max = 0;
  double alpha = 0, beta = 0;
  double gamma = 0, kappa = 0;
};

inline AuxiliaryDecayConstants auxiliary_decay_constants(double L, double h, double xi, double fraction = 0.5) {
  AuxiliaryDecayConstants c;
  if (!(L < kPiSqrt3) || !(xi > 1.0)) return c;
  const double pi2 = M_PI * M_PI;
  c.alpha_max = (xi - 1.0) / (2.0 * L * (1.0 + 2.0 * xi));
  c.alpha = fraction * c.alpha_max;
  c.beta_max = xi - 1.0 - 2.0 * c.alpha * L * (1.0 + 2.0 * xi);
  c.beta = fraction * c.beta_max;
  if (!(c.alpha > 0.0) || !(c.beta > 0.0)) return c;
  const double g1 = (3.0 * pi2 - L * L) * c.alpha / (L * L * (1.0 + 2.0 * c.alpha * L));
  const double g2 = c.beta / (2.0 * h * (xi + c.beta));
  c.gamma = std::min(g1, g2);
  c.kappa = 1.0 + std::max(2.0 * c.alpha * L, c.beta / xi);
  c.ok = true;
  return c;
}

/// T0 = ln(2 xi kappa / eta) / (2 gamma) + 1 and the stabilization onset
/// T_min = -ln(eta/2)/nu + (2||b||inf/nu + 1) s for s in [0, T0).
inline std::pair<double, double> t0_tmin(double gamma, double kappa, double xi, double eta,
                                         double nu, double b_norm, double s) {
  if (!(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("t0_tmin: eta must lie in (0, 1)");
  if (!(gamma > 0.0 && kappa > 0.0 && xi > 1.0))
    throw std::invalid_argument("t0_tmin: need gamma, kappa > 0 and xi > 1");
  const double t0 = std::log(2.0 * xi * kappa / eta) / (2.0 * gamma) + 1.0;
  if (!(s >= 0.0 && s < t0)) throw std::invalid_argument("t0_tmin: s must lie in [0, T0)");
  if (!(nu > 0.0)) throw std::invalid_argument("t0_tmin: nu must be positive");
  const double tmin = -std::log(eta / 2.0) / nu + (2.0 * b_norm / nu + 1.0) * s;
  return {t0, tmin};
}

/// nu = ln(1/(eta + eps)) / T0
inline double nu_from_eta(double t0, double eta, double eps) {
  if (!(eta + eps < 1.0) || !(eta > 0.0) || eps < 0.0)
    throw std::invalid_argument("nu_from_eta: need 0 < eta, eta + eps < 1");
  if (!(t0 > 0.0)) throw std::invalid_argument("nu_from_eta: T0 must be positive");
  return std::log(1.0 / (eta + eps)) / t0;
}

/// Contraction factor per observation window and the induced rate:
/// gamma = (C/C0)/(1 + C/C0), nu = ln(1 + C0/C)/T.
inline std::pair<double, double> nu_from_observability(double T, double C, double C0) {
  if (!(T > 0.0 && C > 0.0 && C0 > 0.0))
    throw std::invalid_argument("nu_from_observability: T, C, C0 must be positive");
  const double q = C / C0;
  return {q / (1.0 + q), std::log(1.0 + C0 / C) / T};
}

/// Smallness bound on ||b||inf for the perturbation argument:
/// min{ sqrt(eps) / ( xi^(3/2) kappa^(1/2) e^{((3 xi + 1)/2)(ln(2 xi kappa/eta)/(2 gamma) + 2)} ), 1 }.
inline double delta_bound(double xi, double kappa, double gamma, double eta, double eps) {
  if (!(xi > 1.0)) throw std::invalid_argument("delta_bound: xi must exceed 1");
  if (!(eta > 0.0 && eta + eps < 1.0 && eps > 0.0))
    throw std::invalid_argument("delta_bound: need 0 < eta, eta + eps < 1, eps > 0");
  if (!(gamma > 0.0 && kappa > 0.0))
    throw std::invalid_argument("delta_bound: gamma, kappa must be positive");
  const double expo =
      0.5 * (3.0 * xi + 1.0) * (std::log(2.0 * xi * kappa / eta) / (2.0 * gamma) + 2.0);
  const double v = std::sqrt(eps) / (std::pow(xi, 1.5) * std::sqrt(kappa) * std::exp(expo));
  return std::min(v, 1.0);
}

/// Empirical decay fit: least-squares line through ln E(t) on a window.
struct DecayFit {
  double gamma_emp = 0.0;   // -slope/2
  double kappa_emp = 0.0;   // e^intercept / E(0)
  double t_start = 0.0, t_end = 0.0;
  double residual = 0.0;    // max |ln E - fit|
};

inline DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& E,
                          double t_start, double t_end) {
  if (t.size() != E.size() || t.size() < 2)
    throw std::invalid_argument("fit_decay: need matching t/E series");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long cnt = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_start - 1e-12 || t[k] > t_end + 1e-12) continue;
    if (!(E[k] > 0.0))
      throw std::invalid_argument("fit_decay: nonpositive energy sample inside window");
    const double y = std::log(E[k]);
    sx += t[k]; sy += y; sxx += t[k] * t[k]; sxy += t[k] * y;
    ++cnt;
  }
  if (cnt < 2) throw std::invalid_argument("fit_decay: window contains fewer than 2 samples");
  const double det = cnt * sxx - sx * sx;
  const double slope = (cnt * sxy - sx * sy) / det;
  const double intercept = (sy * sxx - sx * sxy) / det;
  DecayFit f;
  f.gamma_emp = -0.5 * slope;
  f.kappa_emp = std::exp(intercept) / E.front();
  f.t_start = t_start;
  f.t_end = t_end;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_start - 1e-12 || t[k] > t_end + 1e-12) continue;
    f.residual = std::max(f.residual, std::abs(std::log(E[k]) - (intercept + slope * t[k])));
  }
  return f;
}

/// Default fit window: skip the transient the decay theorems themselves
/// exclude — [t_min, t_final] when available, else the last 80%.
inline std::pair<double, double> default_fit_window(double t_final,
                                                    std::optional<double> t_min = {}) {
  const double start = t_min.value_or(0.2 * t_final);
  return {std::min(start, 0.9 * t_final), t_final};
}

/// Aggregated table for the check-theory command.
struct TheoryConstants {
  std::optional<double> c0;
  LocalDecayConstants local;
  AuxiliaryDecayConstants aux;
  std::optional<double> t0, t_min, nu, delta;
};

inline TheoryConstants theory_table(double L, double h, double mu1, double mu2, double xi,
                                    double eta = 0.5, double eps = 0.25, double s = 0.0,
                                    double b_norm = 0.0, double fraction = 0.5) {
  TheoryConstants tc;
  tc.c0 = c0(h, mu1, mu2, xi);
  tc.local = local_decay_constants(L, h, mu1, mu2, xi, fraction);
  tc.aux = auxiliary_decay_constants(L, h, xi, fraction);
  if (tc.aux.ok) {
    const double t0v =
        std::log(2.0 * xi * tc.aux.kappa / eta) / (2.0 * tc.aux.gamma) + 1.0;
    const double nuv = nu_from_eta(t0v, eta, eps);
    tc.t0 = t0v;
    tc.nu = nuv;
    if (s >= 0.0 && s < t0v) tc.t_min = t0_tmin(tc.aux.gamma, tc.aux.kappa, xi, eta, nuv,
                                                b_norm, s).second;
    tc.delta = delta_bound(xi, tc.aux.kappa, tc.aux.gamma, eta, eps);
  }
  return tc;
}

}  // namespace kawalab
