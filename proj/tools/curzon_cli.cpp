// Command-line front end: every computation in the library is exposed as a
// subcommand with a shared key=value config file and stable CSV/JSON outputs.
//
// Exit codes: 0 success, 1 argument/config error, 2 numerical failure.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "curzon/analysis.hpp"
#include "curzon/config.hpp"
#include "curzon/csv.hpp"
#include "curzon/dynamics.hpp"
#include "curzon/errors.hpp"
#include "curzon/integrate.hpp"
#include "curzon/metric.hpp"
#include "curzon/papercheck.hpp"
#include "curzon/report.hpp"

namespace {

using namespace curzon;

const char* class_name(StabilityClass c) {
  switch (c) {
    case StabilityClass::center: return "center";
    case StabilityClass::saddle: return "saddle";
    default: return "degenerate";
  }
}

struct GlobalFlags {
  std::string config_path;
  double m = 1.0;
  std::string gamma_mode, sign_mode, field_mode, h2_mode, method;
  double dt = 1e-3, rtol = 1e-10;
  double escape_rho_max = 1e3, escape_z_max = 1e3;
  std::uint64_t seed = 1;
};

// Config file first (if any), explicit flags override.
RunConfig resolve_config(const CLI::App& app, const GlobalFlags& gf) {
  RunConfig cfg;
  if (!gf.config_path.empty()) cfg = load_config_file(gf.config_path);
  if (app.count("--m")) apply_config_value(cfg, "m", fmt_g17(gf.m));
  if (app.count("--gamma-mode")) apply_config_value(cfg, "gamma_mode", gf.gamma_mode);
  if (app.count("--sign-mode")) apply_config_value(cfg, "sign_mode", gf.sign_mode);
  if (app.count("--field-mode")) apply_config_value(cfg, "field_mode", gf.field_mode);
  if (app.count("--h2-mode")) apply_config_value(cfg, "h2_mode", gf.h2_mode);
  if (app.count("--method")) apply_config_value(cfg, "method", gf.method);
  if (app.count("--dt")) apply_config_value(cfg, "dt", fmt_g17(gf.dt));
  if (app.count("--rtol")) apply_config_value(cfg, "rtol", fmt_g17(gf.rtol));
  if (app.count("--escape-rho-max"))
    apply_config_value(cfg, "escape_rho_max", fmt_g17(gf.escape_rho_max));
  if (app.count("--escape-z-max"))
    apply_config_value(cfg, "escape_z_max", fmt_g17(gf.escape_z_max));
  if (app.count("--seed")) apply_config_value(cfg, "seed", std::to_string(gf.seed));
  return cfg;
}

// ---------------------------------------------------------------- equilibria

struct EquilibriaArgs {
  double rho_min = 1.05, rho_max = 6.0;
  int n = 100;
  std::string out = "equilibria.csv";
};

void run_equilibria(const EquilibriaArgs& args) {
  if (args.n < 1) throw config_error("equilibria: flag --n must be >= 1");
  CsvWriter csv(args.out);
  csv.header({"rho0", "E2_solved", "L2_solved", "E2_closed", "L2_closed", "vpp", "vpp_printed",
              "g", "vzz", "class", "sign_agreement"});
  for (int i = 0; i < args.n; ++i) {
    const double rho0 =
        args.n == 1 ? args.rho_min
                    : args.rho_min + (args.rho_max - args.rho_min) * double(i) / (args.n - 1);
    csv.begin_row();
    try {
      const EquilibriumRecord eq = equilibrium_solve(rho0);
      csv.field(eq.rho0)
          .field(eq.E2_solved)
          .field(eq.L2_solved)
          .field(eq.E2_closed)
          .field(eq.L2_closed)
          .field(eq.vpp)
          .field(eq.vpp_printed)
          .field(eq.g)
          .field(eq.vzz)
          .field(std::string(class_name(eq.stability_class)))
          .field(std::string(eq.sign_agreement ? "true" : "false"));
    } catch (const degenerate_error&) {
      // singular system (rho0 at/near 2): keep the row, mark it degenerate
      csv.field(rho0);
      for (int k = 0; k < 8; ++k) csv.field(quiet_nan);
      csv.field(std::string("degenerate")).field(std::string("false"));
    }
    csv.end_row();
  }
}

// ------------------------------------------------------------ potential-grid

struct GridArgs {
  double rho_min = 0.5, rho_max = 5.0, z_min = -3.0, z_max = 3.0;
  int n_rho = 50, n_z = 50;
  std::string out = "potential_grid.csv";
};

void run_potential_grid(const GridArgs& args, const RunConfig& cfg) {
  if (args.n_rho < 1 || args.n_z < 1)
    throw config_error("potential-grid: flags --n-rho and --n-z must be >= 1");
  const MetricParams params{cfg.m, cfg.gamma_mode};
  CsvWriter csv(args.out);
  csv.header({"rho", "z", "psi", "gamma", "omega", "laplace_residual", "weyl_res_rho",
              "weyl_res_z"});
  for (int i = 0; i < args.n_rho; ++i) {
    const double rho =
        args.n_rho == 1
            ? args.rho_min
            : args.rho_min + (args.rho_max - args.rho_min) * double(i) / (args.n_rho - 1);
    for (int j = 0; j < args.n_z; ++j) {
      const double z =
          args.n_z == 1 ? args.z_min
                        : args.z_min + (args.z_max - args.z_min) * double(j) / (args.n_z - 1);
      const FieldPoint pt{rho, z};
      csv.begin_row();
      csv.field(rho).field(z);
      auto guarded = [&](auto&& fn) {
        try {
          csv.field(fn());
        } catch (const error&) {
          csv.field(quiet_nan);
        }
      };
      guarded([&] { return psi(pt, params); });
      guarded([&] { return gamma_fn(pt, params); });
      guarded([&] { return omega(pt, params); });
      guarded([&] { return laplace_residual(pt, params); });
      WeylResiduals wr{quiet_nan, quiet_nan};
      try {
        wr = weyl_residuals(pt, params, cfg.sign_mode);
      } catch (const error&) {
      }
      csv.field(wr.r_rho).field(wr.r_z);
      csv.end_row();
    }
  }
}

// ------------------------------------------------------------------ orbits

struct OrbitArgs {
  double equilibrium_rho0 = 0.0;
  double e2 = 0.0, l2 = 0.0;
  double rho = 0.0, z = 0.0, p_rho = 0.0, p_z = 0.0;
  bool have_equilibrium = false;
};

OrbitConstants orbit_constants(const CLI::App& sub, const OrbitArgs& args) {
  const bool eq = sub.count("--equilibrium") > 0;
  const bool direct = sub.count("--e2") > 0 || sub.count("--l2") > 0;
  if (eq == direct)
    throw config_error("exactly one of --equilibrium or (--e2 and --l2) is required");
  if (eq) {
    const EquilibriumRecord rec = equilibrium_solve(args.equilibrium_rho0);
    return {rec.E2_solved, rec.L2_solved};
  }
  if (sub.count("--e2") == 0 || sub.count("--l2") == 0)
    throw config_error("flags --e2 and --l2 must be given together");
  return {args.e2, args.l2};
}

struct IntegrateArgs {
  OrbitArgs orbit;
  double dt = 0.0;  // 0 = take from config
  std::size_t steps = 10000;
  std::size_t every = 1;
  std::string out = "trajectory.csv";
};

void run_integrate(const CLI::App& sub, const IntegrateArgs& args, const RunConfig& cfg) {
  const OrbitConstants oc = orbit_constants(sub, args.orbit);
  IntegrateOptions opts;
  opts.rtol = cfg.rtol;
  opts.escape_rho_max = cfg.escape_rho_max;
  opts.escape_z_max = cfg.escape_z_max;
  opts.record_every = args.every == 0 ? 1 : args.every;
  opts.field_mode = cfg.field_mode;
  const double dt = args.dt > 0.0 ? args.dt : cfg.dt;
  const PhasePoint p0{args.orbit.rho, args.orbit.z, args.orbit.p_rho, args.orbit.p_z};
  const Trajectory traj = integrate(p0, oc, dt, args.steps, cfg.method, opts);

  CsvWriter csv(args.out);
  csv.header({"tau", "rho", "z", "p_rho", "p_z", "F", "drift"});
  const double f0 = traj.f_values.front();
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const PhasePoint& p = traj.samples[i];
    csv.begin_row();
    csv.field(p.tau).field(p.rho).field(p.z).field(p.p_rho).field(p.p_z)
        .field(traj.f_values[i]).field(traj.f_values[i] - f0);
    csv.end_row();
  }
}

struct PoincareArgs {
  OrbitArgs orbit;
  std::size_t crossings = 100;
  double max_tau = 1e5;
  std::string out = "section.csv";
};

void run_poincare(const CLI::App& sub, const PoincareArgs& args, const RunConfig& cfg) {
  const OrbitConstants oc = orbit_constants(sub, args.orbit);
  PoincareOptions opts;
  opts.rtol = cfg.rtol;
  opts.max_tau = args.max_tau;
  opts.escape_rho_max = cfg.escape_rho_max;
  opts.escape_z_max = cfg.escape_z_max;
  opts.field_mode = cfg.field_mode;
  const PhasePoint p0{args.orbit.rho, args.orbit.z, args.orbit.p_rho, args.orbit.p_z};
  const auto points = poincare_section(p0, oc, args.crossings, opts);

  CsvWriter csv(args.out);
  csv.header({"idx", "tau_cross", "rho", "p_rho", "residual"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    csv.begin_row();
    csv.field(double(i)).field(points[i].tau_cross).field(points[i].rho)
        .field(points[i].p_rho).field(points[i].refine_residual);
    csv.end_row();
  }
}

// ------------------------------------------------------------------- period

struct PeriodArgs {
  double rho0 = 4.0;
  double h0 = 1e-3;
  int decades = 4;
  int per_decade = 5;
  std::string convention = "physical";
  bool fit = false;
  std::string out = "period.csv";
  std::string fit_out;
};

void run_period(const PeriodArgs& args) {
  Convention conv;
  if (args.convention == "physical") conv = Convention::physical;
  else if (args.convention == "printed") conv = Convention::printed;
  else throw config_error("period: flag --convention expects physical|printed");

  const EquilibriumRecord eq = equilibrium_solve(args.rho0);
  const auto samples = period_scan(args.rho0, args.h0, args.decades, args.per_decade, conv);

  CsvWriter csv(args.out);
  csv.header({"h", "rho_minus", "rho_plus", "eps", "delta", "eta", "T", "quad_error"});
  for (const PeriodSample& s : samples) {
    csv.begin_row();
    csv.field(s.h).field(s.rho_minus).field(s.rho_plus).field(s.eps).field(s.delta)
        .field(s.eta).field(s.T).field(s.quad_error);
    csv.end_row();
  }

  if (args.fit) {
    const LogFit fit = log_fit(samples, conv, eq.g);
    nlohmann::ordered_json j;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r_squared"] = fit.r_squared;
    j["implied_g"] = fit.implied_g;
    j["g_reference"] = fit.g_reference;
    const std::string path = args.fit_out.empty() ? args.out + ".fit.json" : args.fit_out;
    std::ofstream out(path);
    if (!out) throw config_error("period: cannot open fit output file '" + path + "'");
    out << j.dump(2) << '\n';
  }
}

// ---------------------------------------------------------------- papercheck

struct PapercheckArgs {
  std::string out = "report.json";
  std::string csv_out;
  std::size_t samples = 1000;
  double c7_rho0 = 4.0;
  double c7_h0 = 1e-4;
  int c7_decades = 4;
  int c7_per_decade = 5;
};

void run_papercheck(const PapercheckArgs& args, const RunConfig& cfg) {
  CheckConfig check_cfg;
  check_cfg.seed = cfg.seed;
  check_cfg.n_samples = args.samples;
  check_cfg.c7_rho0 = args.c7_rho0;
  check_cfg.c7_h0 = args.c7_h0;
  check_cfg.c7_decades = args.c7_decades;
  check_cfg.c7_per_decade = args.c7_per_decade;
  check_cfg.gamma_mode = cfg.gamma_mode;

  const auto checks = run_checks(check_cfg);
  std::ofstream out(args.out);
  if (!out) throw config_error("papercheck: cannot open output file '" + args.out + "'");
  out << report_json(checks, check_cfg).dump(2) << '\n';
  if (!args.csv_out.empty()) {
    std::ofstream csv(args.csv_out);
    if (!csv) throw config_error("papercheck: cannot open csv file '" + args.csv_out + "'");
    csv << report_csv_text(checks);
  }
  for (const CheckResult& c : checks)
    std::printf("%s %-12s %s\n", c.id.c_str(), detail::status_name(c.status),
                c.description.c_str());
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chazy-Curzon reduced geodesic dynamics: equilibria, orbits, period function, "
               "and formula audits"};
  app.require_subcommand(1);

  GlobalFlags gf;
  app.add_option("--config", gf.config_path, "key=value config file (see README)")
      ->envname("CURZON_CONFIG");
  app.add_option("--m", gf.m, "mass in geometrized units (dimensionless)")
      ->capture_default_str();
  app.add_option("--gamma-mode", gf.gamma_mode, "gamma variant: paper|standard");
  app.add_option("--sign-mode", gf.sign_mode, "field-equation sign: paper_plus|standard_minus");
  app.add_option("--field-mode", gf.field_mode, "equations of motion: gradient|printed");
  app.add_option("--h2-mode", gf.h2_mode, "reduced Hamiltonian: printed|canonical");
  app.add_option("--method", gf.method, "integrator: leapfrog|adaptive_rk");
  app.add_option("--dt", gf.dt, "base step in tau (dimensionless)")->capture_default_str();
  app.add_option("--rtol", gf.rtol, "adaptive integrator relative tolerance")
      ->capture_default_str();
  app.add_option("--escape-rho-max", gf.escape_rho_max, "escape bound on rho")
      ->capture_default_str();
  app.add_option("--escape-z-max", gf.escape_z_max, "escape bound on |z|")
      ->capture_default_str();
  app.add_option("--seed", gf.seed, "random seed for sampled audits")->capture_default_str();

  EquilibriaArgs eq_args;
  CLI::App* eq = app.add_subcommand("equilibria", "scan the circular-orbit family over rho0");
  eq->add_option("--rho-min", eq_args.rho_min, "smallest rho0 (geometrized)")
      ->capture_default_str();
  eq->add_option("--rho-max", eq_args.rho_max, "largest rho0 (geometrized)")
      ->capture_default_str();
  eq->add_option("--n", eq_args.n, "number of grid points")->capture_default_str();
  eq->add_option("--out", eq_args.out, "output CSV path")->capture_default_str();

  GridArgs grid_args;
  CLI::App* grid = app.add_subcommand("potential-grid", "sample psi, gamma, Omega and the "
                                                        "field-equation residuals to CSV");
  grid->add_option("--rho-min", grid_args.rho_min, "grid start in rho")->capture_default_str();
  grid->add_option("--rho-max", grid_args.rho_max, "grid end in rho")->capture_default_str();
  grid->add_option("--z-min", grid_args.z_min, "grid start in z")->capture_default_str();
  grid->add_option("--z-max", grid_args.z_max, "grid end in z")->capture_default_str();
  grid->add_option("--n-rho", grid_args.n_rho, "grid points in rho")->capture_default_str();
  grid->add_option("--n-z", grid_args.n_z, "grid points in z")->capture_default_str();
  grid->add_option("--out", grid_args.out, "output CSV path")->capture_default_str();

  IntegrateArgs int_args;
  CLI::App* integ = app.add_subcommand("integrate", "propagate one orbit of the reduced system");
  integ->add_option("--equilibrium", int_args.orbit.equilibrium_rho0,
                    "use solved constants of the equilibrium at this rho0");
  integ->add_option("--e2", int_args.orbit.e2, "energy squared (signed)");
  integ->add_option("--l2", int_args.orbit.l2, "angular momentum squared (signed)");
  integ->add_option("--rho", int_args.orbit.rho, "initial rho")->required();
  integ->add_option("--z", int_args.orbit.z, "initial z")->capture_default_str();
  integ->add_option("--p-rho", int_args.orbit.p_rho, "initial p_rho")->capture_default_str();
  integ->add_option("--p-z", int_args.orbit.p_z, "initial p_z")->capture_default_str();
  integ->add_option("--dt", int_args.dt, "step in tau (0 = config value)")
      ->capture_default_str();
  integ->add_option("--steps", int_args.steps, "number of steps")->capture_default_str();
  integ->add_option("--every", int_args.every, "record every k-th step")->capture_default_str();
  integ->add_option("--out", int_args.out, "output CSV path")->capture_default_str();

  PoincareArgs poin_args;
  CLI::App* poin = app.add_subcommand("poincare", "surface-of-section crossings {z=0, p_z>0}");
  poin->add_option("--equilibrium", poin_args.orbit.equilibrium_rho0,
                   "use solved constants of the equilibrium at this rho0");
  poin->add_option("--e2", poin_args.orbit.e2, "energy squared (signed)");
  poin->add_option("--l2", poin_args.orbit.l2, "angular momentum squared (signed)");
  poin->add_option("--rho", poin_args.orbit.rho, "initial rho")->required();
  poin->add_option("--z", poin_args.orbit.z, "initial z")->capture_default_str();
  poin->add_option("--p-rho", poin_args.orbit.p_rho, "initial p_rho")->capture_default_str();
  poin->add_option("--p-z", poin_args.orbit.p_z, "initial p_z")->capture_default_str();
  poin->add_option("--crossings", poin_args.crossings, "number of crossings to collect")
      ->capture_default_str();
  poin->add_option("--max-tau", poin_args.max_tau, "give up beyond this tau")
      ->capture_default_str();
  poin->add_option("--out", poin_args.out, "output CSV path")->capture_default_str();

  PeriodArgs per_args;
  CLI::App* per = app.add_subcommand("period", "period function T(h) near an equilibrium");
  per->add_option("--rho0", per_args.rho0, "equilibrium radius")->required();
  per->add_option("--h0", per_args.h0, "largest |h| of the scan")->capture_default_str();
  per->add_option("--decades", per_args.decades, "decades of |h| to scan")
      ->capture_default_str();
  per->add_option("--per-decade", per_args.per_decade, "samples per decade")
      ->capture_default_str();
  per->add_option("--convention", per_args.convention, "period convention: physical|printed")
      ->capture_default_str();
  per->add_flag("--fit", per_args.fit, "append a JSON log-fit record");
  per->add_option("--out", per_args.out, "output CSV path")->capture_default_str();
  per->add_option("--fit-out", per_args.fit_out, "fit JSON path (default <out>.fit.json)");

  PapercheckArgs pc_args;
  CLI::App* pc = app.add_subcommand("papercheck", "run the published-formula audit registry "
                                                  "C1..C7");
  pc->add_option("--out", pc_args.out, "report JSON path")->capture_default_str();
  pc->add_option("--csv", pc_args.csv_out, "flat summary CSV path (optional)");
  pc->add_option("--samples", pc_args.samples, "sample count for identity checks")
      ->capture_default_str();
  pc->add_option("--c7-rho0", pc_args.c7_rho0, "saddle rho0 for the period-law check")
      ->capture_default_str();
  pc->add_option("--c7-h0", pc_args.c7_h0, "largest |h| of the C7 scan")
      ->capture_default_str();
  pc->add_option("--c7-decades", pc_args.c7_decades, "C7 scan decades")->capture_default_str();
  pc->add_option("--c7-per-decade", pc_args.c7_per_decade, "C7 samples per decade")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    const RunConfig cfg = resolve_config(app, gf);
    if (eq->parsed()) run_equilibria(eq_args);
    if (grid->parsed()) run_potential_grid(grid_args, cfg);
    if (integ->parsed()) run_integrate(*integ, int_args, cfg);
    if (poin->parsed()) run_poincare(*poin, poin_args, cfg);
    if (per->parsed()) run_period(per_args);
    if (pc->parsed()) run_papercheck(pc_args, cfg);
  } catch (const config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
