#pragma once

#include <lapacke.h>

#include <algorithm>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "kawalab/operators.hpp"
#include "kawalab/params.hpp"

namespace kawalab {

enum class AugmentedVariant { mu, aux };

/// Finite-dimensional augmented generator acting on stacked (u, z) with z on
/// a first-order upwind rho-grid of m_rho nodes (rho_j = j/m_rho, j >= 1;
/// the z(rho=0) = u constraint is eliminated structurally by feeding u into
/// the first upwind row).  Row-major dense storage.
struct AugmentedOperator {
  int n = 0, m_rho = 0;
  AugmentedVariant variant = AugmentedVariant::mu;
  std::vector<double> mat;     // dim x dim, row major
  std::vector<double> weight;  // diagonal of the weighted inner product
  double coupling_sup = 0.0;   // ||a||inf (mu) or ||b||inf (aux)

  int dim() const { return n + n * m_rho; }

  double entry(int i, int j) const { return mat[static_cast<std::size_t>(i) * dim() + j]; }
  double& entry(int i, int j) { return mat[static_cast<std::size_t>(i) * dim() + j]; }

  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    const int N = dim();
    for (int i = 0; i < N; ++i) {
      double s = 0.0;
      const double* row = mat.data() + static_cast<std::size_t>(i) * N;
      for (int j = 0; j < N; ++j) s += row[j] * x[j];
      y[i] = s;
    }
  }

  double weighted_inner(const std::vector<double>& x, const std::vector<double>& y) const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) s += weight[i] * x[i] * y[i];
    return s;
  }
};

/// Assemble the augmented generator.  The u-block reuses the banded
/// derivative operators of the discretization module verbatim.
inline AugmentedOperator assemble(const SimParams& p, AugmentedVariant variant, int n,
                                  int m_rho) {
  if (n < 8) throw std::invalid_argument("assemble: n must be >= 8");
  if (m_rho < 4) throw std::invalid_argument("assemble: m_rho must be >= 4");
  if (static_cast<long>(n) * m_rho > 5000)
    throw std::invalid_argument("assemble: n*m_rho exceeds the dense eigensolve budget (5000)");

  const SpatialGrid g = SpatialGrid::make(p.length, n);
  const auto a = p.a_profile.evaluate(g);
  const auto b = p.b_profile.evaluate(g);

  AugmentedOperator op;
  op.n = n;
  op.m_rho = m_rho;
  op.variant = variant;
  const int N = op.dim();
  op.mat.assign(static_cast<std::size_t>(N) * N, 0.0);

  // u-block: -(D1 + D3 - D5) - damping
  BandedMatrix lin = derivative_operator(g, 1);
  lin.axpy(1.0, derivative_operator(g, 3));
  lin.axpy(-1.0, derivative_operator(g, 5));
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - 3); j <= std::min(n - 1, i + 3); ++j)
      op.entry(i, j) = -lin.get(i, j);

  std::vector<double> damp(n), couple(n);
  double sup;
  if (variant == AugmentedVariant::mu) {
    for (int i = 0; i < n; ++i) {
      damp[i] = p.mu1 * a[i];
      couple[i] = p.mu2 * a[i];
    }
    sup = sup_norm(a);
  } else {
    for (int i = 0; i < n; ++i) {
      damp[i] = a[i] + p.xi * b[i];
      couple[i] = b[i];
    }
    sup = sup_norm(b);
  }
  op.coupling_sup = sup;
  for (int i = 0; i < n; ++i) {
    op.entry(i, i) -= damp[i];
    op.entry(i, n + (m_rho - 1) * n + i) -= couple[i];  // -coef * z(rho = 1)
  }

  // z-block: -(1/h) d/drho, first-order upwind from rho = 0 (z0 = u)
  const double c = m_rho / p.delay;  // 1/(h * drho)
  for (int j = 0; j < m_rho; ++j) {
    for (int i = 0; i < n; ++i) {
      const int row = n + j * n + i;
      op.entry(row, row) = -c;
      if (j == 0)
        op.entry(row, i) = c;
      else
        op.entry(row, n + (j - 1) * n + i) = c;
    }
  }

  // weighted inner product <(u,z),(v,w)> = int u v + W iint z w
  // with W = xi ||a||inf (mu) or h xi ||b||inf (aux); the weight falls back
  // to 1 when the coefficient vanishes so the product stays positive definite.
  double W = (variant == AugmentedVariant::mu) ? p.xi * sup : p.delay * p.xi * sup;
  if (!(W > 0.0)) W = 1.0;
  op.weight.assign(N, 0.0);
  for (int i = 0; i < n; ++i) op.weight[i] = g.dx;
  for (int i = n; i < N; ++i) op.weight[i] = W * g.dx / m_rho;
  return op;
}

/// Worst Rayleigh quotient <(A - lambda I) U, U>_w / ||U||_w^2 over random
/// directions.  The symmetrized boundary closure keeps the u-block's form
/// dissipative for arbitrary grid vectors, so rough samples are fine here.
inline double dissipativity_margin(const AugmentedOperator& op, double lambda, int trials,
                                   std::uint64_t seed = 42) {
  if (trials < 100) throw std::invalid_argument("dissipativity_margin: need >= 100 trials");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  const int N = op.dim();
  std::vector<double> U(N), AU(N);
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    for (double& v : U) v = dist(rng);
    op.apply(U, AU);
    const double q =
        (op.weighted_inner(AU, U) - lambda * op.weighted_inner(U, U)) /
        op.weighted_inner(U, U);
    worst = std::max(worst, q);
  }
  return worst;
}

struct SpectrumResult {
  double abscissa = 0.0;
  std::vector<std::complex<double>> rightmost;      // three rightmost
  std::vector<std::complex<double>> eigenvalues;    // all, sorted by real part desc
};

/// Dense nonsymmetric eigensolve (dgeev, values only).
inline SpectrumResult spectral_abscissa(const AugmentedOperator& op) {
  const int N = op.dim();
  std::vector<double> A = op.mat;  // dgeev overwrites
  std::vector<double> wr(N), wi(N);
  const lapack_int info = LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', 'N', N, A.data(), N,
                                        wr.data(), wi.data(), nullptr, N, nullptr, N);
  if (info != 0)
    throw std::runtime_error("spectral_abscissa: dgeev failed to converge (info=" +
                             std::to_string(info) + ")");
  SpectrumResult res;
  res.eigenvalues.resize(N);
  for (int i = 0; i < N; ++i) res.eigenvalues[i] = {wr[i], wi[i]};
  std::sort(res.eigenvalues.begin(), res.eigenvalues.end(),
            [](auto a, auto b) { return a.real() > b.real(); });
  res.abscissa = res.eigenvalues.front().real();
  for (int i = 0; i < std::min(3, N); ++i) res.rightmost.push_back(res.eigenvalues[i]);
  return res;
}

struct RightmostMode {
  std::complex<double> lambda;
  std::vector<std::complex<double>> u_part;  // u-block of the eigenvector
};

/// Rightmost eigenpair (dgeev with right eigenvectors); used to seed
/// modal-decay experiments.
inline RightmostMode rightmost_mode(const AugmentedOperator& op) {
  const int N = op.dim();
  std::vector<double> A = op.mat;
  std::vector<double> wr(N), wi(N), vr(static_cast<std::size_t>(N) * N);
  const lapack_int info = LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', 'V', N, A.data(), N,
                                        wr.data(), wi.data(), nullptr, N, vr.data(), N);
  if (info != 0) throw std::runtime_error("rightmost_mode: dgeev failed to converge");
  int best = 0;
  for (int i = 1; i < N; ++i)
    if (wr[i] > wr[best]) best = i;
  RightmostMode mode;
  mode.lambda = {wr[best], wi[best]};
  mode.u_part.resize(op.n);
  if (wi[best] == 0.0) {
    for (int i = 0; i < op.n; ++i)
      mode.u_part[i] = vr[static_cast<std::size_t>(i) * N + best];
  } else {
    // conjugate pair stored in adjacent columns (real, imag)
    const int col = (wi[best] > 0.0) ? best : best - 1;
    const double sgn = (wi[best] > 0.0) ? 1.0 : -1.0;
    for (int i = 0; i < op.n; ++i) {
      const double re = vr[static_cast<std::size_t>(i) * N + col];
      const double im = vr[static_cast<std::size_t>(i) * N + col + 1];
      mode.u_part[i] = {re, sgn * im};
    }
  }
  return mode;
}

}  // namespace kawalab
