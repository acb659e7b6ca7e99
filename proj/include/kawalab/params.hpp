#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kawalab/grid.hpp"

namespace kawalab {

inline constexpr double kPiSqrt3 = 5.4413980927026536;  // pi*sqrt(3)

/// Kernel K(rho) of the delay-channel quadratures.  The b-weighted energies
/// admit a literal "rho dx" reading of their kernel next to the standard
/// "drho dx" one; both are supported, default drho dx (uniform).
enum class RhoKernel { uniform, one_minus_rho, rho };

enum class ProfileKind { constant, indicator, smoothed_indicator, tabulated };

/// Nonnegative coefficient profile for a(x) or b(x).
///
/// The indicator kinds act on a support interval [lo, hi] inside [0, L];
/// the smoothed kind replaces the jump by a C^2 ramp of width
/// transition_cells grid cells (the plain indicator stays available, the
/// standing assumptions only ask for L^inf coefficients).
struct CoefficientProfile {
  ProfileKind kind = ProfileKind::constant;
  double amplitude = 0.0;
  double lo = 0.0, hi = 0.0;
  std::vector<double> table;
  double transition_cells = 2.0;

  static CoefficientProfile constant(double amplitude) {
    CoefficientProfile p;
    p.kind = ProfileKind::constant;
    p.amplitude = amplitude;
    return p;
  }
  static CoefficientProfile indicator(double amplitude, double lo, double hi,
                                      bool smoothed = false, double cells = 2.0) {
    CoefficientProfile p;
    p.kind = smoothed ? ProfileKind::smoothed_indicator : ProfileKind::indicator;
    p.amplitude = amplitude;
    p.lo = lo;
    p.hi = hi;
    p.transition_cells = cells;
    return p;
  }
  static CoefficientProfile tabulated(std::vector<double> values) {
    CoefficientProfile p;
    p.kind = ProfileKind::tabulated;
    p.table = std::move(values);
    return p;
  }

  bool is_zero() const {
    switch (kind) {
      case ProfileKind::tabulated:
        return std::all_of(table.begin(), table.end(), [](double v) { return v == 0.0; });
      default:
        return amplitude == 0.0;
    }
  }

  std::vector<double> evaluate(const SpatialGrid& g) const;
};

namespace detail {
// C^2 smoothstep on [0,1]
inline double smoother(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}
}  // namespace detail

inline std::vector<double> CoefficientProfile::evaluate(const SpatialGrid& g) const {
  std::vector<double> v(g.n, 0.0);
  switch (kind) {
    case ProfileKind::constant:
      std::fill(v.begin(), v.end(), amplitude);
      break;
    case ProfileKind::indicator:
    case ProfileKind::smoothed_indicator: {
      if (lo < -1e-12 || hi > g.length + 1e-12 || hi < lo)
        throw std::domain_error("profile: support [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "] not inside [0, " +
                                std::to_string(g.length) + "]");
      if (kind == ProfileKind::indicator) {
        for (int i = 0; i < g.n; ++i)
          if (g.x[i] >= lo && g.x[i] <= hi) v[i] = amplitude;
      } else {
        double w = transition_cells * g.dx;
        w = std::min(w, 0.5 * (hi - lo));
        if (w <= 0.0) w = g.dx;
        for (int i = 0; i < g.n; ++i) {
          const double ramp_in = detail::smoother((g.x[i] - lo) / w);
          const double ramp_out = detail::smoother((hi - g.x[i]) / w);
          v[i] = amplitude * ramp_in * ramp_out;
        }
      }
      break;
    }
    case ProfileKind::tabulated:
      if (static_cast<int>(table.size()) != g.n)
        throw std::invalid_argument("profile: table length does not match grid");
      v = table;
      break;
  }
  for (double c : v)
    if (c < 0.0) throw std::domain_error("profile: coefficient values must be nonnegative");
  return v;
}

inline double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double c : v) m = std::max(m, std::abs(c));
  return m;
}

/// All physical and numerical parameters of one simulation.
/// The delay buffer needs h to be an exact multiple of dt; make() adjusts a
/// requested dt downward to h / ceil(h/dt) so no history interpolation is
/// ever required.
struct SimParams {
  double length = 1.0;
  double delay = 1.0;          // h
  double mu1 = 0.0;
  double mu2 = 0.0;
  double xi = 1.0;
  CoefficientProfile a_profile;
  CoefficientProfile b_profile;
  int n = 8;
  int delay_steps = 1;         // m, with dt = h/m exactly
  double t_final = 1.0;
  int snapshot_stride = 10;
  RhoKernel b_energy_kernel = RhoKernel::uniform;

  double dt() const { return delay / delay_steps; }

  static SimParams make(double length, double delay, double mu1, double mu2, double xi,
                        CoefficientProfile a, CoefficientProfile b, int n,
                        double dt_request, double t_final, bool* dt_adjusted = nullptr) {
    if (!(length > 0.0)) throw std::invalid_argument("params: length must be positive");
    if (!(delay > 0.0)) throw std::invalid_argument("params: delay must be positive");
    if (!(dt_request > 0.0)) throw std::invalid_argument("params: dt must be positive");
    if (!(t_final >= 0.0)) throw std::invalid_argument("params: t_final must be nonnegative");
    if (mu1 < 0.0 || mu2 < 0.0) throw std::invalid_argument("params: gains must be nonnegative");
    if (!(xi > 0.0)) throw std::invalid_argument("params: xi must be positive");
    if (n < 8) throw std::invalid_argument("params: n must be >= 8");
    if (delay / dt_request > 5e7)
      throw std::invalid_argument("params: delay buffer would need more than 5e7 slots");
    SimParams p;
    p.length = length;
    p.delay = delay;
    p.mu1 = mu1;
    p.mu2 = mu2;
    p.xi = xi;
    p.a_profile = std::move(a);
    p.b_profile = std::move(b);
    p.n = n;
    const int m = std::max(1, static_cast<int>(std::ceil(delay / dt_request - 1e-12)));
    p.delay_steps = m;
    if (dt_adjusted) *dt_adjusted = std::abs(delay / m - dt_request) > 1e-12 * dt_request;
    p.t_final = t_final;
    return p;
  }
};

enum class SuppCondition { b_in_a, b_not_in_a, no_b };

struct ValidationReport {
  bool delay_window_ok = false;        // h*mu2 < xi < h*(2*mu1 - mu2), strictly
  bool length_ok = false;        // L < pi*sqrt(3)
  SuppCondition supp_condition = SuppCondition::no_b;
  std::vector<std::string> messages;
};

/// Check the standing assumptions. Never blocks: the theorems are sufficient
/// conditions and simulating their violation is a supported experiment.
inline ValidationReport validate(const SimParams& p) {
  ValidationReport r;
  r.delay_window_ok = (p.delay * p.mu2 < p.xi) && (p.xi < p.delay * (2.0 * p.mu1 - p.mu2));
  r.length_ok = p.length < kPiSqrt3;
  if (!r.delay_window_ok)
    r.messages.push_back("delay condition h*mu2 < xi < h*(2*mu1 - mu2) fails: " +
                         std::to_string(p.delay * p.mu2) + " < " + std::to_string(p.xi) +
                         " < " + std::to_string(p.delay * (2.0 * p.mu1 - p.mu2)));
  if (!r.length_ok)
    r.messages.push_back("length L = " + std::to_string(p.length) +
                         " is not below pi*sqrt(3) = " + std::to_string(kPiSqrt3));

  const SpatialGrid g = SpatialGrid::make(p.length, p.n);
  const auto a = p.a_profile.evaluate(g);
  const auto b = p.b_profile.evaluate(g);
  const bool b_zero = std::all_of(b.begin(), b.end(), [](double v) { return v == 0.0; });
  if (b_zero) {
    r.supp_condition = SuppCondition::no_b;
  } else {
    bool inside = true;
    for (int i = 0; i < g.n; ++i)
      if (b[i] > 0.0 && a[i] <= 0.0) inside = false;
    r.supp_condition = inside ? SuppCondition::b_in_a : SuppCondition::b_not_in_a;
  }
  if (p.dt() > g.dx)
    r.messages.push_back("dt = " + std::to_string(p.dt()) + " exceeds dx = " +
                         std::to_string(g.dx) + "; advective accuracy degrades");
  return r;
}

}  // namespace kawalab
