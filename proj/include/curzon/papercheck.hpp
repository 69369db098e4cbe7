#pragma once
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "curzon/analysis.hpp"
#include "curzon/common.hpp"
#include "curzon/dynamics.hpp"
#include "curzon/errors.hpp"
#include "curzon/fit.hpp"
#include "curzon/metric.hpp"

// Fixed registry of formula audits: each check compares a published expression
// for the Chazy-Curzon reduced system against an independently derived
// counterpart and reports the numeric evidence. A mismatch is a finding, not a
// failure; checks only go inconclusive when they cannot execute.

namespace curzon {

enum class CheckStatus { match, mismatch, inconclusive };

struct CheckResult {
  std::string id;
  std::string description;
  CheckStatus status = CheckStatus::inconclusive;
  double max_abs_discrepancy = 0.0;
  std::size_t sample_count = 0;
  std::string details;
};

struct CheckConfig {
  std::uint64_t seed = 1;
  std::size_t n_samples = 1000;
  double identity_tol = 1e-10;   // for algebraic identities
  double exact_tol = 1e-12;      // for by-construction residuals
  double slope_tol = 0.05;       // for fitted slopes
  double rho_scan_min = 1.05;
  double rho_scan_max = 6.0;
  int rho_scan_n = 100;
  double c7_rho0 = 4.0;          // saddle equilibrium for the period-law check
  double c7_h0 = 1e-4;
  int c7_decades = 4;
  int c7_per_decade = 5;
  GammaMode gamma_mode = GammaMode::standard;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

inline const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::match: return "match";
    case CheckStatus::mismatch: return "mismatch";
    default: return "inconclusive";
  }
}

struct SamplePoint {
  double rho, z, p_rho, p_z, E2, L2;
};

inline std::vector<SamplePoint> sample_points(const CheckConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u_rho(0.5, 10.0);
  std::uniform_real_distribution<double> u_z(-5.0, 5.0);
  std::uniform_real_distribution<double> u_p(-1.0, 1.0);
  std::uniform_real_distribution<double> u_e2(-1.5, 1.5);
  std::uniform_real_distribution<double> u_l2(-20.0, 20.0);
  std::vector<SamplePoint> pts;
  pts.reserve(cfg.n_samples);
  while (pts.size() < cfg.n_samples) {
    SamplePoint s{u_rho(rng), u_z(rng), u_p(rng), u_p(rng), u_e2(rng), u_l2(rng)};
    if (std::hypot(s.rho, s.z) < 0.3) continue;
    pts.push_back(s);
  }
  return pts;
}

// C1: published tau-equations of motion vs exact gradient of F.
inline CheckResult check_c1(const CheckConfig& cfg) {
  CheckResult r;
  r.id = "C1";
  r.description = "equations of motion: published RHS vs exact gradient of F";
  const auto pts = sample_points(cfg);
  double max_diff = 0.0, max_other = 0.0, max_local = 0.0;
  for (const auto& s : pts) {
    const PhasePoint p{s.rho, s.z, s.p_rho, s.p_z};
    const OrbitConstants oc{s.E2, s.L2};
    const FieldDeriv grad = f_vector_field(p, oc, FieldMode::gradient);
    const FieldDeriv prt = f_vector_field(p, oc, FieldMode::printed);
    max_other = std::max({max_other, std::abs(grad.rho_dot - prt.rho_dot),
                          std::abs(grad.z_dot - prt.z_dot),
                          std::abs(grad.p_z_dot - prt.p_z_dot)});
    const double diff = prt.p_rho_dot - grad.p_rho_dot;
    max_diff = std::max(max_diff, std::abs(diff));
    // the difference should be exactly the extra (rho^2 - rho) in the E^2 term
    const double rr = std::hypot(s.rho, s.z);
    const double expected = -s.E2 * (sqr(s.rho) - s.rho) * std::exp(2.0 / rr) / (rr * rr * rr);
    max_local = std::max(max_local, std::abs(diff - expected));
  }
  r.sample_count = pts.size();
  r.max_abs_discrepancy = max_diff;
  r.status = max_diff > cfg.identity_tol ? CheckStatus::mismatch : CheckStatus::match;
  r.details = "published p_rho' carries rho^2 where the gradient carries rho (ratio rho on the "
              "first term); max |p_rho' difference| = " + fmt(max_diff) +
              ", difference localized to that term to " + fmt(max_local) +
              ", other components agree to " + fmt(max_other);
  return r;
}

// C2: published equilibrium condition vs the condition satisfied by the
// solved family, plus the condition implied by the published vector field.
inline CheckResult check_c2(const CheckConfig& cfg) {
  CheckResult r;
  r.id = "C2";
  r.description = "equilibrium condition: E^2 rho^2 e^{4/rho} = L^2 (rho-1) vs solved family";
  double max_rel_printed = 0.0, max_rel_field = 0.0, max_rel_field_closed = 0.0;
  std::size_t n = 0;
  for (int i = 0; i < cfg.rho_scan_n; ++i) {
    const double rho = cfg.rho_scan_min +
                       (cfg.rho_scan_max - cfg.rho_scan_min) * double(i) / (cfg.rho_scan_n - 1);
    if (std::abs(rho - 2.0) < 0.05) continue;
    const EquilibriumRecord eq = equilibrium_solve(rho);
    const double e4 = std::exp(4.0 / rho);
    const double t1 = eq.E2_solved * sqr(rho) * e4;
    const double t2 = eq.L2_solved * (rho - 1.0);
    const double scale = std::abs(t1) + std::abs(t2);
    max_rel_printed = std::max(max_rel_printed, std::abs(t1 - t2) / scale);
    // fixed points of the published field satisfy the rho^3 variant instead
    const double t1f = eq.E2_solved * rho * sqr(rho) * e4;
    const double res_field = t1f - t2;
    max_rel_field = std::max(max_rel_field, std::abs(res_field) / (std::abs(t1f) + std::abs(t2)));
    // that residual has the closed form L^2 (rho-1)^2
    const double closed = eq.L2_solved * sqr(rho - 1.0);
    max_rel_field_closed = std::max(
        max_rel_field_closed, std::abs(res_field - closed) / std::max(1.0, std::abs(closed)));
    ++n;
  }
  r.sample_count = n;
  r.max_abs_discrepancy = max_rel_printed;
  r.status = max_rel_printed < cfg.exact_tol ? CheckStatus::match : CheckStatus::mismatch;
  r.details = "solved {F=0, dF/drho=0} family satisfies the published condition to rel " +
              fmt(max_rel_printed) +
              "; the published field's own fixed-point condition (rho^3 variant) misses by rel " +
              fmt(max_rel_field) + " and equals L^2 (rho-1)^2 to rel " + fmt(max_rel_field_closed);
  return r;
}

// C3: published closed forms for (E^2, L^2) vs the 2x2 solve of {F=0, F_rho=0}.
inline CheckResult check_c3(const CheckConfig& cfg) {
  CheckResult r;
  r.id = "C3";
  r.description = "closed-form (E^2, L^2): published signs and F-level vs solved system";
  double max_mag_rel = 0.0, max_f_solved = 0.0, max_f_printed_dev = 0.0;
  std::size_t n = 0, sign_agree = 0;
  for (int i = 0; i < cfg.rho_scan_n; ++i) {
    const double rho = cfg.rho_scan_min +
                       (cfg.rho_scan_max - cfg.rho_scan_min) * double(i) / (cfg.rho_scan_n - 1);
    if (std::abs(rho - 2.0) < 0.05) continue;
    const EquilibriumRecord eq = equilibrium_solve(rho);
    max_mag_rel = std::max(max_mag_rel, eq.mag_rel_err);
    max_f_solved = std::max(max_f_solved, std::abs(eq.f_level));
    if (eq.sign_agreement) ++sign_agree;
    const OrbitConstants printed{eq.E2_closed, eq.L2_closed};
    const double f_printed = f_hamiltonian(PhasePoint{rho, 0.0, 0.0, 0.0}, printed);
    max_f_printed_dev = std::max(max_f_printed_dev, std::abs(f_printed - 1.0));
    ++n;
  }
  r.sample_count = n;
  r.max_abs_discrepancy = 1.0 + max_f_printed_dev;  // published pair sits on F = 1, not F = 0
  r.status = sign_agree == n && max_f_printed_dev < cfg.exact_tol ? CheckStatus::match
                                                                  : CheckStatus::mismatch;
  char buf[160];
  std::snprintf(buf, sizeof buf, "sign agreement at %zu of %zu points; ", sign_agree, n);
  r.details = std::string(buf) + "magnitudes agree to rel " + fmt(max_mag_rel) +
              "; solved pair has |F| <= " + fmt(max_f_solved) +
              "; published pair has F = 1 (deviation <= " + fmt(max_f_printed_dev) +
              ") although it is derived from F = 0";
  return r;
}

// C4: admissibility window of real (E, L) vs the claimed 1 < rho < 2.
inline CheckResult check_c4(const CheckConfig& cfg) {
  CheckResult r;
  r.id = "C4";
  r.description = "admissibility window: claimed (1,2) vs scan of both sign conventions";
  std::size_t n = 0, solved_disagree = 0;
  double solved_lo = quiet_nan, solved_hi = quiet_nan;
  double printed_lo = quiet_nan, printed_hi = quiet_nan;
  for (int i = 0; i < cfg.rho_scan_n; ++i) {
    const double rho = cfg.rho_scan_min +
                       (cfg.rho_scan_max - cfg.rho_scan_min) * double(i) / (cfg.rho_scan_n - 1);
    if (std::abs(rho - 2.0) < 0.05) continue;
    const EquilibriumRecord eq = equilibrium_solve(rho);
    const bool in_claim = rho > 1.0 && rho < 2.0;
    const bool solved_ok = OrbitConstants{eq.E2_solved, eq.L2_solved}.admissible();
    const bool printed_ok = OrbitConstants{eq.E2_closed, eq.L2_closed}.admissible();
    if (solved_ok != in_claim) ++solved_disagree;
    if (solved_ok) {
      if (std::isnan(solved_lo)) solved_lo = rho;
      solved_hi = rho;
    }
    if (printed_ok) {
      if (std::isnan(printed_lo)) printed_lo = rho;
      printed_hi = rho;
    }
    ++n;
  }
  r.sample_count = n;
  r.max_abs_discrepancy = double(solved_disagree) / double(n);
  r.status = solved_disagree == 0 ? CheckStatus::match : CheckStatus::mismatch;
  r.details = "published-sign pair admissible on [" + fmt(printed_lo) + ", " + fmt(printed_hi) +
              "] (matches the claim); solved pair admissible on [" + fmt(solved_lo) + ", " +
              fmt(solved_hi) + "], disagreeing with the claimed window at " +
              std::to_string(solved_disagree) + " of " + std::to_string(n) + " grid points";
  return r;
}

// C5: gamma field equations across {exponent 2, 4} x {plus, minus}.
inline CheckResult check_c5(const CheckConfig& cfg) {
  CheckResult r;
  r.id = "C5";
  r.description = "gamma field equations: residuals across gamma variant x sign variant";
  const auto pts = sample_points(cfg);
  double maxres[2][2] = {{0, 0}, {0, 0}};  // [gamma][sign]
  const GammaMode gmodes[2] = {GammaMode::standard, GammaMode::paper};
  const SignMode smodes[2] = {SignMode::standard_minus, SignMode::paper_plus};
  for (const auto& s : pts) {
    if (s.rho < 0.3) continue;
    for (int gi = 0; gi < 2; ++gi)
      for (int si = 0; si < 2; ++si) {
        const MetricParams mp{1.0, gmodes[gi]};
        const WeylResiduals res = weyl_residuals(FieldPoint{s.rho, s.z}, mp, smodes[si]);
        maxres[gi][si] = std::max({maxres[gi][si], std::abs(res.r_rho), std::abs(res.r_z)});
      }
  }
  r.sample_count = pts.size();
  r.max_abs_discrepancy = maxres[0][0];
  r.status = maxres[0][0] < cfg.identity_tol ? CheckStatus::match : CheckStatus::mismatch;
  r.details = "max |residual|: (standard gamma, minus) = " + fmt(maxres[0][0]) +
              " [certified]; (standard, plus) = " + fmt(maxres[0][1]) +
              "; (exponent-4 gamma, minus) = " + fmt(maxres[1][0]) +
              "; (exponent-4, plus) = " + fmt(maxres[1][1]);
  return r;
}

// C6: mutual consistency of the published H2, V_eff, Omega and F.
inline CheckResult check_c6(const CheckConfig& cfg) {
  CheckResult r;
  r.id = "C6";
  r.description = "published H2 / V_eff / Omega / F mutual consistency";
  const auto pts = sample_points(cfg);
  const MetricParams mp{1.0, cfg.gamma_mode};
  double id_veff = 0.0, id_h2c = 0.0, mis_h2_omega2f = 0.0, mis_h2_modes = 0.0;
  for (const auto& s : pts) {
    const PhasePoint p{s.rho, s.z, s.p_rho, s.p_z};
    const OrbitConstants oc{s.E2, s.L2};
    const double om2 = sqr(omega(FieldPoint{s.rho, s.z}, mp));
    const double v = v_potential(s.rho, s.z, oc);
    const double veff = v_eff(s.rho, s.z, oc, mp);
    id_veff = std::max(id_veff, std::abs(veff - om2 * v) /
                                    std::max(1.0, std::abs(veff)));
    const double h2c = h2_hamiltonian(p, oc, mp, H2Mode::canonical);
    const double direct = 0.5 * om2 * (sqr(s.p_rho) + sqr(s.p_z)) + v;
    id_h2c = std::max(id_h2c, std::abs(h2c - direct) / std::max(1.0, std::abs(h2c)));
    const double h2p = h2_hamiltonian(p, oc, mp, H2Mode::printed);
    const double f = f_hamiltonian(p, oc);
    mis_h2_omega2f = std::max(mis_h2_omega2f, std::abs(h2p - om2 * f));
    mis_h2_modes = std::max(mis_h2_modes, std::abs(h2p - h2c));
  }
  r.sample_count = pts.size();
  r.max_abs_discrepancy = mis_h2_omega2f;
  r.status = mis_h2_omega2f < cfg.identity_tol ? CheckStatus::match : CheckStatus::mismatch;
  r.details = "identities found: V_eff = Omega^2 v_F (rel " + fmt(id_veff) +
              "), canonical H2 = Omega^2 |p|^2/2 + v_F (rel " + fmt(id_h2c) +
              "); published H2 != Omega^2 F (max " + fmt(mis_h2_omega2f) +
              "), published vs canonical H2 (max " + fmt(mis_h2_modes) +
              "): the published F divides only the kinetic term by Omega^2";
  return r;
}

// C7: period branching slope vs the claimed coefficient 2 g(rho0).
inline CheckResult check_c7(const CheckConfig& cfg) {
  CheckResult r;
  r.id = "C7";
  r.description = "period branching: fitted log-slope vs claimed 2 g(rho0)";
  // calibration toy: v = -x^2/2 + x^4/4, saddle at 0 with v'' = -1
  Potential1D toy = [](double x) { return -0.5 * x * x + 0.25 * sqr(x) * sqr(x); };
  const auto toy_phys = period_scan(toy, 0.0, 0.0, 0.0, 3.0, 1.0, -1.0, 1e-3, 4, 5,
                                    Convention::physical);
  const auto toy_prt = period_scan(toy, 0.0, 0.0, 0.0, 3.0, 1.0, -1.0, 1e-3, 4, 5,
                                   Convention::printed);
  const LogFit fit_toy_phys = log_fit(toy_phys, Convention::physical, std::sqrt(2.0));
  const LogFit fit_toy_prt = log_fit(toy_prt, Convention::printed, std::sqrt(2.0));
  const double toy_dev_phys = std::abs(fit_toy_phys.slope - 1.0);
  const double toy_dev_prt = std::abs(fit_toy_prt.slope - std::sqrt(2.0)) / std::sqrt(2.0);

  // Chazy-Curzon saddle
  const EquilibriumRecord eq = equilibrium_solve(cfg.c7_rho0);
  if (eq.stability_class != StabilityClass::saddle)
    throw degenerate_error("check_c7: configured rho0 is not a saddle equilibrium");
  const auto cc_phys = period_scan(cfg.c7_rho0, cfg.c7_h0, cfg.c7_decades, cfg.c7_per_decade,
                                   Convention::physical);
  const auto cc_prt = period_scan(cfg.c7_rho0, cfg.c7_h0, cfg.c7_decades, cfg.c7_per_decade,
                                  Convention::printed);
  const LogFit fit_cc_phys = log_fit(cc_phys, Convention::physical, eq.g);
  const LogFit fit_cc_prt = log_fit(cc_prt, Convention::printed, eq.g);
  const double cc_dev = std::abs(fit_cc_phys.implied_g - eq.g) / eq.g;

  // the claim T = 2 g log(eta) + analytic: fit printed-convention T against
  // ln|eta| and compare the slope with 2 g
  std::vector<double> x, y;
  for (const auto& s : cc_prt) {
    x.push_back(std::log(std::abs(s.eta)));
    y.push_back(s.T);
  }
  const LinearFitResult fit_eta = linear_fit(x, y);
  const double two_g = 2.0 * eq.g;
  const double eta_dev = std::abs(fit_eta.slope - two_g) / two_g;

  r.sample_count = toy_phys.size() + toy_prt.size() + cc_phys.size() + cc_prt.size();
  r.max_abs_discrepancy = std::max({toy_dev_phys, toy_dev_prt, cc_dev, eta_dev});
  r.status = toy_dev_phys < 0.03 && toy_dev_prt < 0.03 && cc_dev < cfg.slope_tol &&
                     eta_dev < cfg.slope_tol
                 ? CheckStatus::match
                 : CheckStatus::mismatch;
  r.details = "toy slope (physical) = " + fmt(fit_toy_phys.slope) + " vs 1; toy slope (printed) = " +
              fmt(fit_toy_prt.slope) + " vs sqrt(2); saddle rho0 = " + fmt(cfg.c7_rho0) +
              ": implied g = " + fmt(fit_cc_phys.implied_g) + " vs g = " + fmt(eq.g) +
              " (r^2 = " + fmt(fit_cc_phys.r_squared) +
              "); printed-convention slope against ln|eta| = " + fmt(fit_eta.slope) +
              " vs claimed 2 g = " + fmt(two_g) +
              ": the claimed coefficient holds in the printed convention against ln(eta)";
  return r;
}

} // namespace detail

inline std::vector<CheckResult> run_checks(const CheckConfig& cfg = {}) {
  using Runner = CheckResult (*)(const CheckConfig&);
  struct Entry {
    const char* id;
    const char* description;
    Runner run;
  };
  static constexpr Entry registry[] = {
      {"C1", "equations of motion: published RHS vs exact gradient of F", detail::check_c1},
      {"C2", "equilibrium condition: E^2 rho^2 e^{4/rho} = L^2 (rho-1) vs solved family",
       detail::check_c2},
      {"C3", "closed-form (E^2, L^2): published signs and F-level vs solved system",
       detail::check_c3},
      {"C4", "admissibility window: claimed (1,2) vs scan of both sign conventions",
       detail::check_c4},
      {"C5", "gamma field equations: residuals across gamma variant x sign variant",
       detail::check_c5},
      {"C6", "published H2 / V_eff / Omega / F mutual consistency", detail::check_c6},
      {"C7", "period branching: fitted log-slope vs claimed 2 g(rho0)", detail::check_c7},
  };
  std::vector<CheckResult> results;
  results.reserve(std::size(registry));
  for (const Entry& entry : registry) {
    try {
      results.push_back(entry.run(cfg));
    } catch (const std::exception& ex) {
      CheckResult failed;
      failed.id = entry.id;
      failed.description = entry.description;
      failed.status = CheckStatus::inconclusive;
      failed.details = std::string("execution failed: ") + ex.what();
      results.push_back(std::move(failed));
    }
  }
  return results;
}

} // namespace curzon
