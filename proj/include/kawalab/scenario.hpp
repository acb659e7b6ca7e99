#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "kawalab/config.hpp"
#include "kawalab/csv.hpp"
#include "kawalab/functionals.hpp"
#include "kawalab/stepper.hpp"
#include "kawalab/theory.hpp"

namespace kawalab {

/// Built-in spatial profiles for initial data and history factors.
/// Available names: zero, sin_mode (k), sin_sq_mode (k), gaussian,
/// one_minus_cos (the classical non-decaying profile at critical lengths).
inline std::function<double(double)> named_function(const std::string& name, double L,
                                                    double amplitude, double mode) {
  if (name == "zero") return [](double) { return 0.0; };
  if (name == "sin_mode")
    return [=](double x) { return amplitude * std::sin(mode * M_PI * x / L); };
  if (name == "sin_sq_mode") {
    return [=](double x) {
      const double s = std::sin(mode * M_PI * x / L);
      return amplitude * s * s;
    };
  }
  if (name == "gaussian") {
    const double c = 0.5 * L, w = 0.1 * L;
    return [=](double x) { return amplitude * std::exp(-0.5 * (x - c) * (x - c) / (w * w)); };
  }
  if (name == "one_minus_cos")
    return [=](double x) { return amplitude * (1.0 - std::cos(x)); };
  throw ConfigError("unknown named function '" + name +
                    "' (available: zero, sin_mode, sin_sq_mode, gaussian, one_minus_cos)");
}

inline std::function<double(double)> named_time_factor(const std::string& name, double rate) {
  if (name == "one" || name == "const") return [](double) { return 1.0; };
  if (name == "exp_decay") return [=](double t) { return std::exp(rate * t); };
  if (name == "cosine") return [=](double t) { return std::cos(rate * t); };
  throw ConfigError("unknown time factor '" + name + "' (available: one, exp_decay, cosine)");
}

struct CheckRequest {
  std::string name;
  bool expect_violate = false;       // violations do not fail the process
  double slack_e0_factor = -1.0;     // slack = factor * E(0); < 0 -> default formula
};

struct Scenario {
  std::string name = "scenario";
  SimParams params;
  SystemVariant variant;
  HistorySampler z0;
  std::vector<CheckRequest> checks;
  double observability_T = 0.0;
  std::string outdir = "out";
  std::uint64_t seed = 42;
};

inline VariantTag parse_variant(const std::string& s) {
  if (s == "damped-delayed") return VariantTag::damped_delayed;
  if (s == "mu") return VariantTag::mu;
  if (s == "perturbed") return VariantTag::perturbed;
  if (s == "auxiliary-linear") return VariantTag::auxiliary_linear;
  if (s == "linear-mu") return VariantTag::linear_mu;
  if (s == "undamped-linear") return VariantTag::undamped_linear;
  throw ConfigError("unknown variant '" + s + "'");
}

inline CoefficientProfile parse_profile(const Config& cfg, const std::string& prefix,
                                        double L) {
  const std::string kind = cfg.get_or("model", prefix + "_kind", "zero");
  if (kind == "zero") return CoefficientProfile::constant(0.0);
  const double amp = cfg.get_double("model", prefix + "_amplitude");
  if (kind == "constant") return CoefficientProfile::constant(amp);
  if (kind == "indicator" || kind == "smoothed-indicator") {
    const double lo = cfg.get_double_or("model", prefix + "_support_lo", 0.0);
    const double hi = cfg.get_double_or("model", prefix + "_support_hi", L);
    const double cells = cfg.get_double_or("model", prefix + "_transition_cells", 2.0);
    return CoefficientProfile::indicator(amp, lo, hi, kind == "smoothed-indicator", cells);
  }
  throw ConfigError("unknown profile kind '" + kind + "' for " + prefix);
}

inline Scenario load_scenario(const Config& cfg, std::vector<std::string>* warnings = nullptr) {
  const auto miss = cfg.missing({{"model", "L"},
                                 {"model", "h"},
                                 {"model", "variant"},
                                 {"numerics", "n"},
                                 {"numerics", "dt"},
                                 {"numerics", "t_final"},
                                 {"initial", "u0"}});
  if (!miss.empty()) {
    std::string msg = "config is missing required keys:";
    for (const auto& m : miss) msg += " " + m + ";";
    throw ConfigError(msg);
  }

  Scenario sc;
  sc.name = cfg.get_or("model", "name", "scenario");
  const double L = cfg.get_double("model", "L");
  const double h = cfg.get_double("model", "h");
  const double mu1 = cfg.get_double_or("model", "mu1", 0.0);
  const double mu2 = cfg.get_double_or("model", "mu2", 0.0);
  const double xi = cfg.get_double_or("model", "xi", 1.0);
  auto a = parse_profile(cfg, "a", L);
  auto b = parse_profile(cfg, "b", L);
  const int n = static_cast<int>(cfg.get_int("numerics", "n"));
  const double dt_req = cfg.get_double("numerics", "dt");
  const double t_final = cfg.get_double("numerics", "t_final");

  bool adjusted = false;
  sc.params = SimParams::make(L, h, mu1, mu2, xi, std::move(a), std::move(b), n, dt_req,
                              t_final, &adjusted);
  if (adjusted && warnings)
    warnings->push_back("dt adjusted to h/" + std::to_string(sc.params.delay_steps) + " = " +
                        std::to_string(sc.params.dt()) + " so the delay buffer aligns");
  sc.params.snapshot_stride =
      static_cast<int>(cfg.get_int_or("numerics", "snapshot_stride", 10));
  const std::string kernel = cfg.get_or("numerics", "delay_kernel", "drho");
  if (kernel == "rho") sc.params.b_energy_kernel = RhoKernel::rho;
  else if (kernel != "drho") throw ConfigError("delay_kernel must be 'drho' or 'rho'");
  sc.seed = static_cast<std::uint64_t>(cfg.get_int_or("numerics", "seed", 42));

  sc.variant = SystemVariant::make(parse_variant(cfg.get("model", "variant")));
  if (cfg.has("model", "nonlinearity"))
    sc.variant.nonlinearity_on = cfg.get_bool_or("model", "nonlinearity", true);

  // initial state and history
  const auto u0 = named_function(cfg.get("initial", "u0"), L,
                                 cfg.get_double_or("initial", "u0_amplitude", 1.0),
                                 cfg.get_double_or("initial", "u0_mode", 1.0));
  const std::string hkind = cfg.get_or("initial", "history", "zero");
  HistorySampler past;
  if (hkind == "zero") {
    past = zero_history();
  } else if (hkind == "constant_profile") {
    past = [u0](double x, double) { return u0(x); };
  } else if (hkind == "product") {
    auto f = named_function(cfg.get("initial", "history_f"), L,
                            cfg.get_double_or("initial", "history_amplitude", 1.0),
                            cfg.get_double_or("initial", "history_mode", 1.0));
    auto g = named_time_factor(cfg.get_or("initial", "history_g", "one"),
                               cfg.get_double_or("initial", "history_rate", 1.0));
    past = product_history(std::move(f), std::move(g));
  } else {
    throw ConfigError("unknown history kind '" + hkind +
                      "' (available: zero, constant_profile, product)");
  }
  sc.z0 = [u0, past](double x, double t) { return t >= 0.0 ? u0(x) : past(x, t); };

  for (const std::string& c : {"dissipation", "lyapunov"}) {
    if (cfg.get_bool_or("checks", c, false)) {
      CheckRequest req;
      req.name = c;
      req.expect_violate = cfg.get_or("checks", c + "_expect", "hold") == "violate";
      req.slack_e0_factor = cfg.get_double_or("checks", c + "_slack_e0_factor", -1.0);
      sc.checks.push_back(req);
    }
  }
  sc.observability_T = cfg.get_double_or("checks", "observability_T", 0.0);
  sc.outdir = cfg.get_or("model", "outdir", "out_" + sc.name);
  return sc;
}

inline DissipationLaw law_for_variant(const SystemVariant& v) {
  switch (v.tag) {
    case VariantTag::undamped_linear: return DissipationLaw::undamped_identity;
    case VariantTag::mu:
    case VariantTag::linear_mu: return DissipationLaw::mu_c0;
    case VariantTag::perturbed:
    case VariantTag::auxiliary_linear: return DissipationLaw::xi_monotone;
    case VariantTag::damped_delayed: return DissipationLaw::dd_growth;
  }
  return DissipationLaw::undamped_identity;
}

inline void write_trace_csv(const std::string& path, const EnergyTrace& tr) {
  CsvWriter w(path, {"t", "nsq", "e_dd", "e_mu", "e_xi", "v1", "v2_mu", "v2_aux",
                     "uxx0_sq", "uxx0_flux", "damp_a", "damp_b", "damp_delay_a",
                     "damp_delay_b"});
  for (std::size_t k = 0; k < tr.size(); ++k)
    w.row({tr.t[k], tr.nsq[k], tr.e_dd[k], tr.e_mu[k], tr.e_xi[k], tr.v1[k], tr.v2_mu[k],
           tr.v2_aux[k], tr.uxx0_sq[k], tr.uxx0_flux[k], tr.damp_a[k], tr.damp_b[k],
           tr.damp_delay_a[k], tr.damp_delay_b[k]});
}

inline void write_snapshots_csv(const std::string& path, const std::vector<State>& snaps,
                                const SpatialGrid& g) {
  CsvWriter w(path, {"t", "x", "u"});
  for (const auto& s : snaps)
    for (int i = 0; i < g.n; ++i) w.row({s.time, g.x[i], s.values[i]});
}

/// Energy column the variant's decay statements refer to.
inline const std::vector<double>& variant_energy(const EnergyTrace& tr,
                                                 const SystemVariant& v) {
  switch (v.tag) {
    case VariantTag::undamped_linear: return tr.nsq;
    case VariantTag::mu:
    case VariantTag::linear_mu: return tr.e_mu;
    case VariantTag::damped_delayed: return tr.e_dd;
    default: return tr.e_xi;
  }
}

struct ScenarioResult {
  Trajectory trajectory;
  std::vector<CheckReport> reports;
  int exit_code = 0;
};

/// Run one scenario end to end and persist trace.csv, snapshots.csv,
/// checks.csv, constants.txt and logenergy.csv under the output directory.
/// The exit code is nonzero iff a requested check fails that was not marked
/// expect = violate.
inline ScenarioResult run_scenario(const Scenario& sc, std::ostream& log = std::cerr) {
  namespace fs = std::filesystem;
  ScenarioResult res;
  const SpatialGrid g = SpatialGrid::make(sc.params.length, sc.params.n);

  res.trajectory = simulate(sc.params, sc.variant, sc.z0);
  for (const auto& wmsg : res.trajectory.warnings) log << "warning: " << wmsg << "\n";

  fs::create_directories(sc.outdir);
  write_trace_csv(sc.outdir + "/trace.csv", res.trajectory.trace);
  write_snapshots_csv(sc.outdir + "/snapshots.csv", res.trajectory.snapshots, g);

  const auto& E = variant_energy(res.trajectory.trace, sc.variant);
  {
    CsvWriter w(sc.outdir + "/logenergy.csv", {"t", "ln_e"});
    for (std::size_t k = 0; k < E.size(); ++k)
      if (E[k] > 0.0) w.row({res.trajectory.trace.t[k], std::log(E[k])});
  }
  {
    std::ofstream out(sc.outdir + "/constants.txt");
    const auto tc = theory_table(sc.params.length, sc.params.delay, sc.params.mu1,
                                 sc.params.mu2, sc.params.xi);
    const auto rep = validate(sc.params);
    out << "delay_condition_ok " << (rep.delay_window_ok ? 1 : 0) << "\n";
    out << "length_ok " << (rep.length_ok ? 1 : 0) << "\n";
    if (tc.c0) out << "C0 " << *tc.c0 << "\n";
    if (tc.local.ok)
      out << "local alpha " << tc.local.alpha << " beta " << tc.local.beta << " gamma "
          << tc.local.gamma << " kappa " << tc.local.kappa << " r " << tc.local.r << "\n";
    if (tc.aux.ok)
      out << "aux alpha " << tc.aux.alpha << " beta " << tc.aux.beta << " gamma "
          << tc.aux.gamma << " kappa " << tc.aux.kappa << "\n";
    if (tc.t0) out << "T0 " << *tc.t0 << "\n";
    if (tc.t_min) out << "T_min " << *tc.t_min << "\n";
    if (tc.nu) out << "nu " << *tc.nu << "\n";
    if (tc.delta) out << "delta " << *tc.delta << "\n";
  }

  const auto& E0col = variant_energy(res.trajectory.trace, sc.variant);
  for (const auto& req : sc.checks) {
    std::optional<double> slack;
    if (req.slack_e0_factor > 0.0) slack = req.slack_e0_factor * E0col.front();
    std::optional<CheckReport> rep;
    if (req.name == "dissipation") {
      try {
        rep = dissipation_check(res.trajectory.trace, sc.params, law_for_variant(sc.variant),
                                slack);
      } catch (const std::invalid_argument& e) {
        log << "note: dissipation check not evaluable: " << e.what() << "\n";
        CheckReport r;
        r.name = "dissipation";
        r.pass = false;
        r.worst = std::numeric_limits<double>::infinity();
        rep = r;
      }
    } else if (req.name == "lyapunov") {
      if (sc.variant.tag == VariantTag::mu || sc.variant.tag == VariantTag::linear_mu) {
        const auto c = local_decay_constants(sc.params.length, sc.params.delay, sc.params.mu1,
                                     sc.params.mu2, sc.params.xi);
        if (c.ok)
          rep = lyapunov_decay_check(res.trajectory.trace, sc.params, c.alpha, c.beta,
                                     c.gamma, LyapunovFamily::mu, slack);
        else
          log << "warning: lyapunov check skipped, no admissible constants\n";
      } else {
        const auto c = auxiliary_decay_constants(sc.params.length, sc.params.delay, sc.params.xi);
        if (c.ok)
          rep = lyapunov_decay_check(res.trajectory.trace, sc.params, c.alpha, c.beta,
                                     c.gamma, LyapunovFamily::aux, slack);
        else
          log << "warning: lyapunov check skipped, no admissible constants\n";
      }
    }
    if (!rep) continue;
    if (!rep->pass && !req.expect_violate) res.exit_code = 1;
    if (!rep->pass && req.expect_violate)
      log << "note: check '" << rep->name << "' violated as expected\n";
    res.reports.push_back(*rep);
  }
  if (sc.observability_T > 0.0) {
    const auto obs =
        observability_ratio(res.trajectory.trace, sc.params, sc.observability_T);
    CheckReport rep;
    rep.name = "observability_ratio";
    rep.worst = obs.degenerate ? -1.0 : obs.ratio;
    rep.worst_time = sc.observability_T;
    rep.slack = 0.0;
    rep.pass = !obs.degenerate;
    if (obs.degenerate) log << "note: observability sample degenerate (zero denominator)\n";
    res.reports.push_back(rep);
  }
  {
    CsvWriter w(sc.outdir + "/checks.csv", {"name", "worst", "worst_time", "slack", "pass"});
    for (const auto& r : res.reports) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%d", r.name.c_str(), r.worst,
                    r.worst_time, r.slack, r.pass ? 1 : 0);
      w.raw_row(buf);
    }
  }
  return res;
}

inline ScenarioResult run_scenario_file(const std::string& path,
                                        std::ostream& log = std::cerr) {
  const Config cfg = Config::parse_file(path);
  std::vector<std::string> warnings;
  Scenario sc = load_scenario(cfg, &warnings);
  for (const auto& wmsg : warnings) log << "warning: " << wmsg << "\n";
  return run_scenario(sc, log);
}

}  // namespace kawalab
