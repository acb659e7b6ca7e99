#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace kawalab {

/// Uniform interior grid on (0, L). Dirichlet end values are identically
/// zero and never stored: x_i = i*dx for i = 1..n with dx = L/(n+1).
struct SpatialGrid {
  int n = 0;
  double length = 0.0;
  double dx = 0.0;
  std::vector<double> x;

  static SpatialGrid make(double length, int n) {
    if (n < 8)
      throw std::invalid_argument("grid: n must be >= 8 (stencils need 7 points), got " +
                                  std::to_string(n));
    if (!(length > 0.0)) throw std::invalid_argument("grid: length must be positive");
    SpatialGrid g;
    g.n = n;
    g.length = length;
    g.dx = length / (n + 1);
    g.x.resize(n);
    for (int i = 0; i < n; ++i) g.x[i] = (i + 1) * g.dx;
    return g;
  }
};

inline SpatialGrid build_grid(double length, int n) { return SpatialGrid::make(length, n); }

/// Solution sample u(., t) on the interior grid.
struct State {
  std::vector<double> values;
  double time = 0.0;

  bool finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

/// Trapezoid rule for int_0^L v dx when v vanishes at both ends
/// (boundary samples are not stored, so the rule collapses to dx * sum).
inline double integrate(const SpatialGrid& g, const std::vector<double>& v) {
  double s = 0.0;
  for (double t : v) s += t;
  return g.dx * s;
}

inline double inner(const SpatialGrid& g, const std::vector<double>& u,
                    const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return g.dx * s;
}

inline double norm_sq(const SpatialGrid& g, const std::vector<double>& u) {
  return inner(g, u, u);
}

}  // namespace kawalab
