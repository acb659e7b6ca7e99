#pragma once

#include <lapacke.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace kawalab {

/// Banded matrix in LAPACK general-band layout (column major,
/// ldab = 2*kl + ku + 1 so a copy can be factorized in place by dgbtrf).
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int n, int kl, int ku, std::string label = {})
      : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
        ab_(static_cast<std::size_t>(ldab_) * n, 0.0), label_(std::move(label)) {}

  static BandedMatrix identity(int n, int kl, int ku) {
    BandedMatrix m(n, kl, ku, "I");
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  int rows() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }
  const std::string& label() const { return label_; }
  void set_label(std::string l) { label_ = std::move(l); }

  bool in_band(int i, int j) const { return i - j <= kl_ && j - i <= ku_; }

  double get(int i, int j) const { return in_band(i, j) ? ab_[index(i, j)] : 0.0; }

  double& at(int i, int j) {
    if (!in_band(i, j)) throw std::out_of_range("banded: entry outside band");
    return ab_[index(i, j)];
  }

  void add(int i, int j, double v) { at(i, j) += v; }

  /// this += alpha * other (bands must be compatible)
  void axpy(double alpha, const BandedMatrix& other) {
    for (int j = 0; j < n_; ++j)
      for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i)
        if (other.in_band(i, j)) ab_[index(i, j)] += alpha * other.get(i, j);
  }

  void scale(double alpha) {
    for (double& v : ab_) v *= alpha;
  }

  /// Replace by the skew-symmetric part (A - A^T)/2 restricted to the band.
  void skew_symmetrize() {
    for (int j = 0; j < n_; ++j) {
      for (int i = std::max(0, j - ku_); i < j; ++i) {
        if (!in_band(j, i)) continue;  // needs square band
        const double a = 0.5 * (ab_[index(i, j)] - ab_[index(j, i)]);
        ab_[index(i, j)] = a;
        ab_[index(j, i)] = -a;
      }
      ab_[index(j, j)] = 0.0;
    }
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> y(n_, 0.0);
    apply(x.data(), y.data());
    return y;
  }

  void apply(const double* x, double* y) const {
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      const int j0 = std::max(0, i - kl_), j1 = std::min(n_ - 1, i + ku_);
      for (int j = j0; j <= j1; ++j) s += ab_[index(i, j)] * x[j];
      y[i] = s;
    }
  }

  std::vector<double> to_dense() const {
    std::vector<double> d(static_cast<std::size_t>(n_) * n_, 0.0);
    for (int i = 0; i < n_; ++i)
      for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j)
        d[static_cast<std::size_t>(i) * n_ + j] = ab_[index(i, j)];
    return d;
  }

  const std::vector<double>& storage() const { return ab_; }
  int ldab() const { return ldab_; }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j);
  }

  int n_ = 0, kl_ = 0, ku_ = 0, ldab_ = 1;
  std::vector<double> ab_;
  std::string label_;
};

/// One-shot banded LU (dgbtrf) with repeated solves (dgbtrs).
class BandedLU {
 public:
  explicit BandedLU(const BandedMatrix& m)
      : n_(m.rows()), kl_(m.lower()), ku_(m.upper()), ldab_(m.ldab()),
        ab_(m.storage()), ipiv_(m.rows()) {
    const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_,
                                           ab_.data(), ldab_, ipiv_.data());
    if (info != 0)
      throw std::runtime_error("banded LU: dgbtrf failed (info=" + std::to_string(info) +
                               "), matrix singular or invalid");
  }

  void solve_in_place(std::vector<double>& rhs) const {
    if (static_cast<int>(rhs.size()) != n_)
      throw std::invalid_argument("banded LU: rhs size mismatch");
    const lapack_int info =
        LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1, ab_.data(), ldab_,
                       ipiv_.data(), rhs.data(), n_);
    if (info != 0) throw std::runtime_error("banded LU: dgbtrs failed");
  }

  std::vector<double> solve(std::vector<double> rhs) const {
    solve_in_place(rhs);
    return rhs;
  }

 private:
  int n_, kl_, ku_, ldab_;
  std::vector<double> ab_;
  std::vector<lapack_int> ipiv_;
};

}  // namespace kawalab
