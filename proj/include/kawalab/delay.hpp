#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "kawalab/grid.hpp"
#include "kawalab/params.hpp"

namespace kawalab {

struct SequencingError : std::logic_error {
  using std::logic_error::logic_error;
};

/// History sampler z0(x, t) defined for t in [-h, 0].
using HistorySampler = std::function<double(double x, double t)>;

/// Ring buffer of the last m+1 states: slot at lag k holds u(., t - k*dt),
/// so lag m is exactly u(., t - h).  This realizes the transport variable
/// z(x, rho, t) = u(x, t - rho*h) with no discretization in rho; the only
/// approximation anywhere in the delay channel is the rho-quadrature of
/// rho_integral().
class DelayHistory {
 public:
  DelayHistory() = default;

  static DelayHistory init(const HistorySampler& z0, const SpatialGrid& g, int m,
                           double dt) {
    if (m < 1) throw std::invalid_argument("history: need at least one delay step");
    DelayHistory h;
    h.m_ = m;
    h.dt_ = dt;
    h.slots_.resize(m + 1);
    for (int k = 0; k <= m; ++k) {
      State s;
      s.time = -k * dt;
      s.values.resize(g.n);
      for (int i = 0; i < g.n; ++i) s.values[i] = z0(g.x[i], s.time);
      h.slots_[k] = std::move(s);
    }
    h.head_ = 0;
    return h;
  }

  int lags() const { return m_; }
  double dt() const { return dt_; }

  /// newest state (lag 0): z(x, 0, t) = u(x, t)
  const State& current() const { return at_lag(0); }

  /// exact stored state from time t - k*dt
  const State& at_lag(int k) const {
    if (k < 0 || k > m_) throw std::out_of_range("history: lag outside window");
    return slots_[(head_ + k) % (m_ + 1)];
  }

  /// u(., t - h), no interpolation
  const State& delayed() const { return at_lag(m_); }

  /// Advance by one step: s becomes lag 0, the oldest slot is dropped.
  void push(const State& s) {
    const double expected = current().time + dt_;
    if (std::abs(s.time - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
      throw SequencingError("history push: state time " + std::to_string(s.time) +
                            ", expected " + std::to_string(expected));
    head_ = (head_ + m_) % (m_ + 1);  // step back; old lag-m slot becomes the new head
    slots_[head_] = s;
  }

  /// int_0^L int_0^1 weight(x) u^2(x, t - rho h) K(rho) drho dx by the
  /// composite trapezoid rule in rho over the m+1 slots and in x.
  double rho_integral(const std::vector<double>& weight, const SpatialGrid& g,
                      RhoKernel kernel) const {
    if (static_cast<int>(weight.size()) != g.n)
      throw std::invalid_argument("rho_integral: weight length mismatch");
    double total = 0.0;
    for (int k = 0; k <= m_; ++k) {
      const double rho = static_cast<double>(k) / m_;
      double kval = 1.0;
      if (kernel == RhoKernel::one_minus_rho) kval = 1.0 - rho;
      else if (kernel == RhoKernel::rho) kval = rho;
      const double wk = (k == 0 || k == m_) ? 0.5 : 1.0;
      const auto& u = at_lag(k).values;
      double sx = 0.0;
      for (int i = 0; i < g.n; ++i) sx += weight[i] * u[i] * u[i];
      total += wk * kval * sx;
    }
    return total * g.dx / m_;
  }

 private:
  int m_ = 0;
  double dt_ = 0.0;
  int head_ = 0;
  std::vector<State> slots_;
};

/// Built-in history samplers for the config format.
inline HistorySampler zero_history() {
  return [](double, double) { return 0.0; };
}

/// product form f(x) * g(t)
inline HistorySampler product_history(std::function<double(double)> f,
                                      std::function<double(double)> g) {
  return [f = std::move(f), g = std::move(g)](double x, double t) { return f(x) * g(t); };
}

}  // namespace kawalab
