// Command-line laboratory for the delayed Kawahara equation.
//
// Subcommands: simulate, check-theory, spectrum, fit-decay, observability,
// sweep.  Scenario configs are INI-style key = value files; see the bundled
// scenarios/ directory.

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <future>
#include <iostream>
#include <thread>

#include "kawalab/kawalab.hpp"

namespace {

using namespace kawalab;

void print_theory(const TheoryConstants& tc) {
  auto p = [](const char* k, double v) { std::printf("  %-10s %.17g\n", k, v); };
  std::printf("theory constants\n");
  if (tc.c0) p("C0", *tc.c0);
  else std::printf("  C0         (absent: delay condition fails)\n");
  if (tc.local.ok) {
    std::printf("  -- local decay (mu system) --\n");
    p("alpha_max", tc.local.alpha_max);
    p("beta_max", tc.local.beta_max);
    p("alpha", tc.local.alpha);
    p("beta", tc.local.beta);
    p("gamma", tc.local.gamma);
    p("kappa", tc.local.kappa);
    p("r_max", tc.local.r_max);
    p("r", tc.local.r);
  } else {
    std::printf("  -- local decay constants absent (need L < pi*sqrt(3) and the delay window) --\n");
  }
  if (tc.aux.ok) {
    std::printf("  -- auxiliary system --\n");
    p("alpha_max", tc.aux.alpha_max);
    p("beta_max", tc.aux.beta_max);
    p("alpha", tc.aux.alpha);
    p("beta", tc.aux.beta);
    p("gamma", tc.aux.gamma);
    p("kappa", tc.aux.kappa);
    if (tc.t0) p("T0", *tc.t0);
    if (tc.t_min) p("T_min", *tc.t_min);
    if (tc.nu) p("nu", *tc.nu);
    if (tc.delta) p("delta", *tc.delta);
  } else {
    std::printf("  -- auxiliary constants absent (need L < pi*sqrt(3) and xi > 1) --\n");
  }
}

struct SweepAxis {
  std::string key;
  double lo = 0, hi = 0;
  int count = 0;
};

SweepAxis parse_axis(const std::string& spec) {
  SweepAxis ax;
  const auto p1 = spec.find(':');
  const auto p2 = spec.find(':', p1 + 1);
  const auto p3 = spec.find(':', p2 + 1);
  if (p1 == std::string::npos || p2 == std::string::npos || p3 == std::string::npos)
    throw std::runtime_error("--vary expects key:lo:hi:count, got '" + spec + "'");
  ax.key = spec.substr(0, p1);
  ax.lo = std::stod(spec.substr(p1 + 1, p2 - p1 - 1));
  ax.hi = std::stod(spec.substr(p2 + 1, p3 - p2 - 1));
  ax.count = std::stoi(spec.substr(p3 + 1));
  if (ax.count < 1) throw std::runtime_error("--vary count must be >= 1");
  return ax;
}

double axis_value(const SweepAxis& ax, int i) {
  if (ax.count == 1) return ax.lo;
  return ax.lo + (ax.hi - ax.lo) * i / (ax.count - 1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kawalab: numerical laboratory for the delayed Kawahara equation"};
  app.require_subcommand(1);

  // --- simulate
  std::string sim_config;
  auto* sim = app.add_subcommand("simulate", "run a scenario config, write CSV artifacts");
  sim->add_option("config", sim_config, "scenario config file")->required();

  // --- check-theory
  double L = 1, h = 1, mu1 = 2, mu2 = 1, xi = 1.5;
  double eta = 0.5, eps = 0.25, s = 0.0, bnorm = 0.0, frac = 0.5;
  auto* thy = app.add_subcommand("check-theory", "print the explicit stability constants");
  thy->set_help_flag("--help", "print this help message");  // frees --h for the delay
  thy->add_option("--L", L)->required();
  thy->add_option("--h", h)->required();
  thy->add_option("--mu1", mu1)->required();
  thy->add_option("--mu2", mu2)->required();
  thy->add_option("--xi", xi)->required();
  thy->add_option("--eta", eta, "auxiliary parameter in (0,1), default 0.5");
  thy->add_option("--eps", eps, "auxiliary parameter, eta+eps < 1, default 0.25");
  thy->add_option("--s", s, "shift in [0, T0), default 0");
  thy->add_option("--b-norm", bnorm, "||b||_inf entering T_min, default 0");
  thy->add_option("--fraction", frac, "selection point inside open constraint regions");

  // --- spectrum
  std::string spec_config, spec_out = "spectrum.csv", spec_variant = "mu";
  int spec_n = 32, spec_mrho = 40;
  auto* spc = app.add_subcommand("spectrum", "eigenvalues of the augmented generator");
  spc->add_option("config", spec_config, "scenario config file")->required();
  spc->add_option("--n", spec_n, "u-grid points for the operator");
  spc->add_option("--m-rho", spec_mrho, "rho-grid points");
  spc->add_option("--variant", spec_variant, "mu or aux");
  spc->add_option("--out", spec_out, "output CSV");

  // --- fit-decay
  std::string fit_trace, fit_which = "mu";
  double fit_t0 = -1, fit_t1 = -1;
  auto* fit = app.add_subcommand("fit-decay", "fit an exponential rate to a trace.csv");
  fit->add_option("trace", fit_trace, "trace.csv from simulate")->required();
  fit->add_option("--which", fit_which, "energy column: dd|mu|xi|nsq");
  fit->add_option("--t-start", fit_t0, "window start (default: 20% of horizon)");
  fit->add_option("--t-end", fit_t1, "window end (default: horizon)");

  // --- observability
  std::string obs_config;
  double obs_T = 1.0;
  auto* obs = app.add_subcommand("observability", "observability ratio of a scenario run");
  obs->add_option("config", obs_config)->required();
  obs->add_option("--T", obs_T, "observation window length")->required();

  // --- sweep
  std::vector<std::string> vary;
  std::string sweep_config, sweep_out = "sweep.csv";
  int sweep_jobs = static_cast<int>(std::thread::hardware_concurrency());
  auto* swp = app.add_subcommand("sweep",
                                 "grid over two parameters; theory table per point, or "
                                 "full scenario runs when --config is given");
  swp->add_option("--vary", vary, "axis spec key:lo:hi:count (repeat twice)")
      ->expected(1, 2)->required();
  swp->add_option("--config", sweep_config, "base scenario for simulation sweeps");
  swp->add_option("--out", sweep_out, "output CSV");
  swp->add_option("--jobs", sweep_jobs, "worker pool size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) {
      const auto res = run_scenario_file(sim_config);
      for (const auto& r : res.reports)
        std::printf("check %-24s worst=%.6g at t=%.4g slack=%.3g %s\n", r.name.c_str(),
                    r.worst, r.worst_time, r.slack, r.pass ? "pass" : "FAIL");
      return res.exit_code;
    }

    if (*thy) {
      print_theory(theory_table(L, h, mu1, mu2, xi, eta, eps, s, bnorm, frac));
      return 0;
    }

    if (*spc) {
      const Config cfg = Config::parse_file(spec_config);
      Scenario sc = load_scenario(cfg);
      const auto variant =
          spec_variant == "aux" ? AugmentedVariant::aux : AugmentedVariant::mu;
      const auto op = assemble(sc.params, variant, spec_n, spec_mrho);
      const auto spec = spectral_abscissa(op);
      CsvWriter w(spec_out, {"re", "im"});
      for (const auto& ev : spec.eigenvalues) w.row({ev.real(), ev.imag()});
      std::printf("abscissa %.17g\n", spec.abscissa);
      for (const auto& ev : spec.rightmost)
        std::printf("rightmost %.17g %+.17gi\n", ev.real(), ev.imag());
      return 0;
    }

    if (*fit) {
      const auto table = read_csv(fit_trace);
      const std::string col = fit_which == "nsq" ? "nsq" : "e_" + fit_which;
      const auto t = table.col("t");
      const auto E = table.col(col);
      const double t_end = fit_t1 > 0 ? fit_t1 : t.back();
      const double t_start = fit_t0 >= 0 ? fit_t0 : 0.2 * t.back();
      const auto f = fit_decay(t, E, t_start, t_end);
      std::printf("gamma_emp %.17g\nkappa_emp %.17g\nresidual %.17g\nwindow %.17g %.17g\n",
                  f.gamma_emp, f.kappa_emp, f.residual, f.t_start, f.t_end);
      return 0;
    }

    if (*obs) {
      const Config cfg = Config::parse_file(obs_config);
      Scenario sc = load_scenario(cfg);
      if (sc.params.t_final < obs_T) sc.params.t_final = obs_T;
      const auto res = simulate(sc.params, sc.variant, sc.z0);
      const auto o = observability_ratio(res.trace, sc.params, obs_T);
      if (o.degenerate) {
        std::printf("degenerate (denominator %.3g, E0 %.3g)\n", o.denominator, o.e0);
        return 1;
      }
      std::printf("ratio %.17g\n", o.ratio);
      const auto c = c0(sc.params.delay, sc.params.mu1, sc.params.mu2, sc.params.xi);
      if (c) {
        const auto [gam, nu] = nu_from_observability(obs_T, o.ratio, *c);
        std::printf("contraction %.17g\nnu %.17g\n", gam, nu);
      }
      return 0;
    }

    if (*swp) {
      std::vector<SweepAxis> axes;
      for (const auto& v : vary) axes.push_back(parse_axis(v));
      if (axes.size() == 1) axes.push_back({axes[0].key, 0, 0, 0});
      const SweepAxis& ax = axes[0];
      const SweepAxis& ay = axes[1];
      const int ny = std::max(1, ay.count);

      struct Row { std::vector<double> v; };
      std::vector<Row> rows(static_cast<std::size_t>(ax.count) * ny);

      auto set_param = [](Scenario& sc, const std::string& key, double val) {
        if (key == "L") sc.params.length = val;
        else if (key == "h") sc.params.delay = val;
        else if (key == "mu1") sc.params.mu1 = val;
        else if (key == "mu2") sc.params.mu2 = val;
        else if (key == "xi") sc.params.xi = val;
        else throw std::runtime_error("sweep: cannot vary '" + key + "'");
      };

      const bool theory_only = sweep_config.empty();
      std::optional<Scenario> base;
      if (!theory_only) base = load_scenario(Config::parse_file(sweep_config));

      std::atomic<int> next{0};
      const int total = ax.count * ny;
      auto worker = [&]() {
        for (int idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1)) {
          const int i = idx / ny, j = idx % ny;
          double Lv = L, hv = h, m1 = mu1, m2 = mu2, xv = xi;
          Scenario sc;
          if (base) sc = *base;
          auto apply = [&](const std::string& key, double val) {
            if (base) { set_param(sc, key, val); return; }
            if (key == "L") Lv = val;
            else if (key == "h") hv = val;
            else if (key == "mu1") m1 = val;
            else if (key == "mu2") m2 = val;
            else if (key == "xi") xv = val;
            else throw std::runtime_error("sweep: cannot vary '" + key + "'");
          };
          apply(ax.key, axis_value(ax, i));
          if (ay.count > 0) apply(ay.key, axis_value(ay, j));
          Row r;
          r.v = {axis_value(ax, i), ay.count > 0 ? axis_value(ay, j) : 0.0};
          if (theory_only) {
            if (base) { Lv = sc.params.length; hv = sc.params.delay; }
            const auto tc = theory_table(Lv, hv, m1, m2, xv);
            r.v.push_back(tc.c0 ? *tc.c0 : -1.0);
            r.v.push_back(tc.local.ok ? tc.local.gamma : -1.0);
            r.v.push_back(tc.local.ok ? tc.local.kappa : -1.0);
            r.v.push_back(tc.aux.ok ? tc.aux.gamma : -1.0);
          } else {
            sc.outdir = sweep_out + ".d/" + std::to_string(idx);
            std::ostringstream devnull;
            const auto res = run_scenario(sc, devnull);
            const auto& tr = res.trajectory.trace;
            const auto& E = variant_energy(tr, sc.variant);
            r.v.push_back(E.front());
            r.v.push_back(E.back());
            double gamma_emp = 0.0;
            if (E.back() > 0.0 && E.front() > 0.0) {
              const auto win = default_fit_window(tr.t.back());
              gamma_emp = fit_decay(tr.t, E, win.first, win.second).gamma_emp;
            }
            r.v.push_back(gamma_emp);
            r.v.push_back(res.exit_code == 0 ? 1.0 : 0.0);
          }
          rows[idx] = std::move(r);
        }
      };
      std::vector<std::future<void>> pool;
      const int jobs = std::max(1, sweep_jobs);
      for (int k = 0; k < jobs; ++k) pool.push_back(std::async(std::launch::async, worker));
      for (auto& f : pool) f.get();

      std::vector<std::string> header = {ax.key, ay.count > 0 ? ay.key : "unused"};
      if (theory_only) {
        header.insert(header.end(), {"c0", "local_gamma", "local_kappa", "aux_gamma"});
      } else {
        header.insert(header.end(), {"e0", "e_final", "gamma_emp", "checks_ok"});
      }
      CsvWriter w(sweep_out, header);
      for (const auto& r : rows) w.row(r.v);
      std::printf("wrote %d rows to %s\n", total, sweep_out.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
