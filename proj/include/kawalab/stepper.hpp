#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kawalab/banded.hpp"
#include "kawalab/delay.hpp"
#include "kawalab/functionals.hpp"
#include "kawalab/grid.hpp"
#include "kawalab/operators.hpp"
#include "kawalab/params.hpp"

namespace kawalab {

enum class VariantTag {
  damped_delayed,    // a u + b u(t-h), independent coefficients
  mu,                // a (mu1 u + mu2 u(t-h)), gains on one profile
  perturbed,         // damped_delayed plus the xi b u stabilizer
  auxiliary_linear,  // perturbed, linearized
  linear_mu,         // mu, linearized
  undamped_linear    // a = b = 0, nonlinearity off
};

/// Which coefficient terms enter the right-hand side.  The tag fixes the
/// zeroth-order damping and the delayed coupling term by term; the
/// nonlinearity flag defaults per tag but stays overridable.
struct SystemVariant {
  VariantTag tag = VariantTag::mu;
  bool nonlinearity_on = true;

  static SystemVariant make(VariantTag tag) {
    SystemVariant v;
    v.tag = tag;
    v.nonlinearity_on = (tag == VariantTag::damped_delayed || tag == VariantTag::mu ||
                         tag == VariantTag::perturbed);
    return v;
  }

  /// zeroth-order damping coefficient entering the implicit linear part
  std::vector<double> damping(const std::vector<double>& a, const std::vector<double>& b,
                              const SimParams& p) const {
    std::vector<double> d(a.size(), 0.0);
    switch (tag) {
      case VariantTag::damped_delayed:
        d = a;
        break;
      case VariantTag::mu:
      case VariantTag::linear_mu:
        for (std::size_t i = 0; i < a.size(); ++i) d[i] = p.mu1 * a[i];
        break;
      case VariantTag::perturbed:
      case VariantTag::auxiliary_linear:
        for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] + p.xi * b[i];
        break;
      case VariantTag::undamped_linear:
        break;
    }
    return d;
  }

  /// coefficient multiplying u(., t-h) in the explicit delayed term
  std::vector<double> delay_coefficient(const std::vector<double>& a,
                                        const std::vector<double>& b,
                                        const SimParams& p) const {
    std::vector<double> d(a.size(), 0.0);
    switch (tag) {
      case VariantTag::damped_delayed:
      case VariantTag::perturbed:
      case VariantTag::auxiliary_linear:
        d = b;
        break;
      case VariantTag::mu:
      case VariantTag::linear_mu:
        for (std::size_t i = 0; i < a.size(); ++i) d[i] = p.mu2 * a[i];
        break;
      case VariantTag::undamped_linear:
        break;
    }
    return d;
  }
};

struct BlowUpError : std::runtime_error {
  BlowUpError(double t, double amplitude)
      : std::runtime_error("solution blow-up at t = " + std::to_string(t) +
                           ", max|u| = " + std::to_string(amplitude)),
        time(t), amplitude(amplitude) {}
  double time;
  double amplitude;
};

/// Skew discretization of u u_x: N(u) = (u .* D1 u + D1(u^2)) / 3.
/// Consistent with u u_x at second order and <N(u), u> = 0 exactly, the grid
/// mirror of int u^2 u_x dx = 0 on boundary-vanishing states.
inline std::vector<double> nonlinear_term(const std::vector<double>& u,
                                          const BandedMatrix& d1) {
  const int n = static_cast<int>(u.size());
  std::vector<double> usq(n);
  for (int i = 0; i < n; ++i) usq[i] = u[i] * u[i];
  auto du = d1.apply(u);
  auto dusq = d1.apply(usq);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = (u[i] * du[i] + dusq[i]) / 3.0;
  return out;
}

inline std::vector<double> nonlinear_term(const State& u, const SpatialGrid& g) {
  return nonlinear_term(u.values, derivative_operator(g, 1));
}

/// Crank-Nicolson split of the linear part: lhs = I + (dt/2) Llin,
/// rhs = I - (dt/2) Llin, with Llin = D1 + D3 - D5 + diag(damping).
struct ImexMatrices {
  BandedMatrix llin;
  BandedMatrix lhs;
  BandedMatrix rhs;
  std::optional<BandedLU> lu;
};

inline ImexMatrices build_imex_matrices(const SimParams& p, const SystemVariant& variant,
                                        const SpatialGrid& g, bool factorize = true) {
  const auto a = p.a_profile.evaluate(g);
  const auto b = p.b_profile.evaluate(g);
  const auto damp = variant.damping(a, b, p);

  ImexMatrices m{BandedMatrix(g.n, 3, 3, "Llin"), BandedMatrix(g.n, 3, 3, "lhs"),
                 BandedMatrix(g.n, 3, 3, "rhs"), std::nullopt};
  m.llin = derivative_operator(g, 1);
  m.llin.axpy(1.0, derivative_operator(g, 3));
  m.llin.axpy(-1.0, derivative_operator(g, 5));
  for (int i = 0; i < g.n; ++i) m.llin.add(i, i, damp[i]);
  m.llin.set_label("Llin");

  const double half_dt = 0.5 * p.dt();
  m.lhs = BandedMatrix::identity(g.n, 3, 3);
  m.lhs.axpy(half_dt, m.llin);
  m.lhs.set_label("I + dt/2 Llin");
  m.rhs = BandedMatrix::identity(g.n, 3, 3);
  m.rhs.axpy(-half_dt, m.llin);
  m.rhs.set_label("I - dt/2 Llin");
  if (factorize) m.lu.emplace(m.lhs);
  return m;
}

/// Optional forcing term f(x, t), evaluated on the grid.
using SourceTerm = std::function<std::vector<double>(double t)>;

struct Trajectory {
  std::vector<State> snapshots;
  DelayHistory final_history;
  EnergyTrace trace;
  std::vector<std::string> warnings;
};

/// Time integrator: Crank-Nicolson for the stiff linear part,
/// Adams-Bashforth-2 for the nonlinearity and the delayed term (explicit
/// Euler on the first step), exact method-of-steps delay storage.
class Stepper {
 public:
  Stepper(SimParams params, SystemVariant variant, const HistorySampler& z0,
          SourceTerm source = nullptr)
      : p_(std::move(params)), variant_(variant), grid_(SpatialGrid::make(p_.length, p_.n)),
        d1_(derivative_operator(grid_, 1)),
        matrices_(build_imex_matrices(p_, variant_, grid_)),
        hist_(DelayHistory::init(z0, grid_, p_.delay_steps, p_.dt())),
        source_(std::move(source)) {
    const auto a = p_.a_profile.evaluate(grid_);
    const auto b = p_.b_profile.evaluate(grid_);
    a_ = a;
    b_ = b;
    delay_coef_ = variant_.delay_coefficient(a, b, p_);
    // per-slot damping integrals, newest first (parallel to the ring buffer)
    slot_a_.resize(p_.delay_steps + 1);
    slot_b_.resize(p_.delay_steps + 1);
    for (int k = 0; k <= p_.delay_steps; ++k) {
      slot_a_[k] = weighted_nsq(a_, hist_.at_lag(k).values);
      slot_b_[k] = weighted_nsq(b_, hist_.at_lag(k).values);
    }
    step_count_ = 0;
  }

  const SpatialGrid& grid() const { return grid_; }
  const State& state() const { return hist_.current(); }
  const DelayHistory& history() const { return hist_; }
  double time() const { return hist_.current().time; }
  const SimParams& params() const { return p_; }

  /// One IMEX step; returns the trace-squared flux actually dissipated.
  double step() {
    const double dt = p_.dt();
    const auto& u = hist_.current().values;
    const int n = grid_.n;

    std::vector<double> g(n, 0.0);
    const auto& delayed = hist_.delayed().values;
    for (int i = 0; i < n; ++i) g[i] = delay_coef_[i] * delayed[i];
    if (variant_.nonlinearity_on) {
      const auto nl = nonlinear_term(u, d1_);
      for (int i = 0; i < n; ++i) g[i] += nl[i];
    }

    std::vector<double> rhs(n);
    matrices_.rhs.apply(u.data(), rhs.data());
    if (step_count_ == 0) {
      for (int i = 0; i < n; ++i) rhs[i] -= dt * g[i];
    } else {
      for (int i = 0; i < n; ++i) rhs[i] -= dt * (1.5 * g[i] - 0.5 * g_prev_[i]);
    }
    if (source_) {
      const auto f = source_(time() + 0.5 * dt);
      for (int i = 0; i < n; ++i) rhs[i] += dt * f[i];
    }
    matrices_.lu->solve_in_place(rhs);

    State next;
    next.time = time() + dt;
    next.values = std::move(rhs);
    if (!next.finite() || next.max_abs() > kBlowUpThreshold)
      throw BlowUpError(next.time, next.max_abs());

    std::vector<double> mid(n);
    for (int i = 0; i < n; ++i) mid[i] = 0.5 * (u[i] + next.values[i]);
    const double tr = boundary_trace_uxx0(mid, grid_);
    const double flux = tr * tr;

    g_prev_ = std::move(g);
    hist_.push(next);
    slot_a_.pop_back();
    slot_b_.pop_back();
    slot_a_.insert(slot_a_.begin(), weighted_nsq(a_, hist_.current().values));
    slot_b_.insert(slot_b_.begin(), weighted_nsq(b_, hist_.current().values));
    ++step_count_;
    return flux;
  }

  /// Append the current functional values to a trace.
  void record(EnergyTrace& tr, double flux) const {
    const auto& u = hist_.current().values;
    const double nsq = norm_sq(grid_, u);
    const double iu_a = rho_trapz(slot_a_, RhoKernel::uniform);
    const double iu_b = rho_trapz(slot_b_, p_.b_energy_kernel);
    const double io_a = rho_trapz(slot_a_, RhoKernel::one_minus_rho);
    const double io_b = rho_trapz(slot_b_, RhoKernel::one_minus_rho);
    double v1 = 0.0;
    for (int i = 0; i < grid_.n; ++i) v1 += grid_.x[i] * u[i] * u[i];
    v1 *= grid_.dx;
    const double trc = boundary_trace_uxx0(u, grid_);

    tr.t.push_back(time());
    tr.nsq.push_back(nsq);
    tr.e_dd.push_back(0.5 * nsq + 0.5 * p_.delay * iu_b);
    tr.e_mu.push_back(0.5 * nsq + 0.5 * p_.xi * iu_a);
    tr.e_xi.push_back(0.5 * nsq + 0.5 * p_.xi * p_.delay * iu_b);
    tr.v1.push_back(v1);
    tr.v2_mu.push_back(0.5 * p_.xi * io_a);
    tr.v2_aux.push_back(0.5 * p_.delay * io_b);
    tr.uxx0_sq.push_back(trc * trc);
    tr.uxx0_flux.push_back(flux);
    tr.damp_a.push_back(slot_a_[0]);
    tr.damp_b.push_back(slot_b_[0]);
    tr.damp_delay_a.push_back(slot_a_[p_.delay_steps]);
    tr.damp_delay_b.push_back(slot_b_[p_.delay_steps]);
  }

  static constexpr double kBlowUpThreshold = 1e6;

 private:
  double weighted_nsq(const std::vector<double>& w, const std::vector<double>& u) const {
    double s = 0.0;
    for (int i = 0; i < grid_.n; ++i) s += w[i] * u[i] * u[i];
    return s * grid_.dx;
  }
  double rho_trapz(const std::vector<double>& slots, RhoKernel kernel) const {
    const int m = p_.delay_steps;
    double s = 0.0;
    for (int k = 0; k <= m; ++k) {
      const double rho = static_cast<double>(k) / m;
      double kv = 1.0;
      if (kernel == RhoKernel::one_minus_rho) kv = 1.0 - rho;
      else if (kernel == RhoKernel::rho) kv = rho;
      s += ((k == 0 || k == m) ? 0.5 : 1.0) * kv * slots[k];
    }
    return s / m;
  }

  SimParams p_;
  SystemVariant variant_;
  SpatialGrid grid_;
  BandedMatrix d1_;
  ImexMatrices matrices_;
  DelayHistory hist_;
  SourceTerm source_;
  std::vector<double> a_, b_, delay_coef_;
  std::vector<double> g_prev_;
  std::vector<double> slot_a_, slot_b_;  // per-slot damping integrals, newest first
  long step_count_ = 0;
};

/// Run from t = 0 to t_final, recording every step into the trace and
/// snapshots at the configured stride.
inline Trajectory simulate(const SimParams& p, const SystemVariant& variant,
                           const HistorySampler& z0, SourceTerm source = nullptr) {
  Stepper st(p, variant, z0, std::move(source));
  Trajectory traj;
  const auto report = validate(p);
  traj.warnings = report.messages;

  const long steps = std::lround(p.t_final / p.dt());
  const double tr0 = boundary_trace_uxx0(st.state(), st.grid());
  st.record(traj.trace, tr0 * tr0);
  traj.snapshots.push_back(st.state());
  for (long k = 1; k <= steps; ++k) {
    const double flux = st.step();
    st.record(traj.trace, flux);
    if (k % p.snapshot_stride == 0 || k == steps) traj.snapshots.push_back(st.state());
  }
  traj.final_history = st.history();
  return traj;
}

}  // namespace kawalab
