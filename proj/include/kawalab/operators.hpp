#pragma once

#include <array>
#include <stdexcept>

#include "kawalab/banded.hpp"
#include "kawalab/grid.hpp"

namespace kawalab {

// Boundary closure for u(0)=u(L)=u_x(0)=u_x(L)=u_xx(L)=0.
//
// Ghost values are eliminated through the boundary conditions:
//   left  (two ghosts, from the quartic a*x^2 + b*x^3 + c*x^4 pinned by
//          u(0)=u_x(0)=0 and u1,u2,u3):
//            u_{-1} = 6 u1 - 2 u2 + u3/3
//            u_{-2} = 40 u1 - 15 u2 + (8/3) u3
//   right (odd reflection through x=L, which encodes u(L)=0 and u_xx(L)=0):
//            u_{n+1+k} = -u_{n+1-k}
//
// The raw closed stencils are then skew-symmetrized band-wise, and the
// fifth-derivative operator carries the boundary-trace outer product
// -(t t^T)/(2 dx), where t is the one-sided u_xx(0) estimate below.  This
// makes the discrete energy law exact:
//
//   < (D1 + D3 - D5) u, u >_dx = (1/2) (t.u)^2     for every grid vector u,
//
// the grid-level mirror of d/dt ||u||^2 = -u_xx(0,t)^2.  The plain ghost
// closure fails this test (and even reflection on the left is unstable);
// the symmetrized form is what the energy-identity test pins down.

namespace detail {

// ghost-row coefficients on (u1, u2, u3)
inline constexpr std::array<double, 3> kGhostLeft1 = {6.0, -2.0, 1.0 / 3.0};
inline constexpr std::array<double, 3> kGhostLeft2 = {40.0, -15.0, 8.0 / 3.0};

template <int W>
void assemble_closed(BandedMatrix& m, const SpatialGrid& g,
                     const std::array<double, 2 * W + 1>& stencil, double scale) {
  const int n = g.n;
  for (int i = 0; i < n; ++i) {
    for (int off = -W; off <= W; ++off) {
      const double c = stencil[off + W] * scale;
      if (c == 0.0) continue;
      const int j = i + off;
      if (j >= 0 && j < n) {
        m.add(i, j, c);
      } else if (j == -1 || j == n) {
        // Dirichlet value, exactly zero
      } else if (j == -2) {
        for (int k = 0; k < 3; ++k) m.add(i, k, c * kGhostLeft1[k]);
      } else if (j == -3) {
        for (int k = 0; k < 3; ++k) m.add(i, k, c * kGhostLeft2[k]);
      } else if (j == n + 1) {
        m.add(i, n - 1, -c);  // odd reflection
      } else if (j == n + 2) {
        m.add(i, n - 2, -c);
      } else {
        throw std::logic_error("operator stencil reaches beyond ghost layer");
      }
    }
  }
}

}  // namespace detail

/// Coefficients of the one-sided second-order u_xx(0) estimate on (u1,u2,u3),
/// from the same boundary-pinned quartic as the ghost elimination.  Exact on
/// x^2, x^3 and x^4; the trace used in energy accounting matches the
/// operator's internal boundary treatment.
inline std::array<double, 3> trace_coefficients(const SpatialGrid& g) {
  const double s = 1.0 / (g.dx * g.dx);
  return {6.0 * s, -1.5 * s, (2.0 / 9.0) * s};
}

inline double boundary_trace_uxx0(const State& u, const SpatialGrid& g) {
  const auto t = trace_coefficients(g);
  return t[0] * u.values[0] + t[1] * u.values[1] + t[2] * u.values[2];
}

inline double boundary_trace_uxx0(const std::vector<double>& u, const SpatialGrid& g) {
  const auto t = trace_coefficients(g);
  return t[0] * u[0] + t[1] * u[1] + t[2] * u[2];
}

/// Discrete d/dx, d^3/dx^3 or d^5/dx^5 under the five boundary conditions.
/// Half-bandwidth 3 for every order so the operators share one band layout.
inline BandedMatrix derivative_operator(const SpatialGrid& g, int order) {
  const int n = g.n;
  const double dx = g.dx;
  BandedMatrix m(n, 3, 3, "D" + std::to_string(order));
  switch (order) {
    case 1: {
      // exactly skew with Dirichlet padding; no ghosts needed
      const std::array<double, 3> s = {-1.0, 0.0, 1.0};
      detail::assemble_closed<1>(m, g, s, 1.0 / (2.0 * dx));
      return m;
    }
    case 3: {
      const std::array<double, 5> s = {-1.0, 2.0, 0.0, -2.0, 1.0};
      detail::assemble_closed<2>(m, g, s, 1.0 / (2.0 * dx * dx * dx));
      m.skew_symmetrize();  // int u u_xxx dx = 0 under these conditions
      return m;
    }
    case 5: {
      const std::array<double, 7> s = {-1.0, 4.0, -5.0, 0.0, 5.0, -4.0, 1.0};
      const double dx5 = dx * dx * dx * dx * dx;
      detail::assemble_closed<3>(m, g, s, 1.0 / (2.0 * dx5));
      m.skew_symmetrize();
      // dissipation enters only through the x=0 trace:
      // <D5 u, u>_dx = -(1/2) (t.u)^2
      const auto t = trace_coefficients(g);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m.add(i, j, -t[i] * t[j] / (2.0 * dx));
      return m;
    }
    default:
      throw std::invalid_argument("derivative_operator: order must be 1, 3 or 5");
  }
}

/// Plain 3-point second difference with Dirichlet ends; used by the discrete
/// H^2 norms, not part of the evolution operator.
inline BandedMatrix second_difference(const SpatialGrid& g) {
  BandedMatrix m(g.n, 1, 1, "D2");
  const double s = 1.0 / (g.dx * g.dx);
  for (int i = 0; i < g.n; ++i) {
    m.at(i, i) = -2.0 * s;
    if (i > 0) m.at(i, i - 1) = s;
    if (i + 1 < g.n) m.at(i, i + 1) = s;
  }
  return m;
}

}  // namespace kawalab
