#pragma once
#include <cmath>
#include <functional>
#include <string>

#include "curzon/common.hpp"
#include "curzon/errors.hpp"
#include "curzon/metric.hpp"

// Reduced meridian-plane dynamics of the Chazy-Curzon geodesic flow.
//
// Working objects (m = 1 throughout the reduced system):
//   F  = (p_rho^2 + p_z^2)/2 + v(rho, z)                    tau-time Hamiltonian
//   v  = 1/2 - (E^2/2) e^{2/r} + (L^2 / 2 rho^2) e^{-2/r},  r = sqrt(rho^2+z^2)
//   H2 = Omega^2 ((p_rho^2+p_z^2)/2 + V_eff)                t-time reduced Hamiltonian
//
// The published right-hand side of the tau-equations of motion differs from the
// exact gradient of F in the first term of p_rho' (rho^2 where the gradient has
// rho); both variants are kept behind FieldMode. Likewise H2 is available as
// printed and as rebuilt from the 4D mass-shell Hamiltonian (H2Mode).

namespace curzon {

enum class FieldMode { gradient, printed };
enum class H2Mode { printed, canonical };
enum class StabilityClass { center, saddle, degenerate };
enum class Axis { rho, z };

struct OrbitConstants {
  double E2 = 0.0;  // conserved energy squared (signed; negative = inadmissible)
  double L2 = 0.0;  // conserved angular momentum squared (signed)
  bool admissible() const { return E2 >= 0.0 && L2 >= 0.0; }
};

struct PhasePoint {
  double rho = 1.0;
  double z = 0.0;
  double p_rho = 0.0;
  double p_z = 0.0;
  double tau = 0.0;  // reparametrized time, d tau = Omega^2 dt
};

struct FieldDeriv {
  double rho_dot = 0.0;
  double z_dot = 0.0;
  double p_rho_dot = 0.0;
  double p_z_dot = 0.0;
};

struct EquilibriumRecord {
  double rho0 = 0.0;
  double E2_solved = 0.0, L2_solved = 0.0;  // from the 2x2 solve of {F=0, dF/drho=0}
  double E2_closed = 0.0, L2_closed = 0.0;  // published closed forms, verbatim signs
  double f_level = 0.0;                     // F at (0,0,rho0,0) with the solved pair
  double vpp = 0.0;                         // d^2v/drho^2 at (rho0, 0), solved pair
  double vpp_printed = 0.0;                 // published second-derivative formula
  double g = quiet_nan;                     // sqrt(2)/sqrt(-vpp) when vpp < 0
  double vzz = 0.0;                         // transverse curvature d^2v/dz^2, solved pair
  StabilityClass stability_class = StabilityClass::degenerate;
  bool sign_agreement = false;              // solved vs closed pair, componentwise signs
  double mag_rel_err = 0.0;                 // max relative |solved| vs |closed| difference
};

namespace detail {

inline double checked_radius(double rho, double z, const char* where) {
  if (rho < r_min)
    throw domain_error(std::string(where) + ": rho below r_min");
  const double r = std::hypot(rho, z);
  if (r < r_min)
    throw domain_error(std::string(where) + ": point within r_min of the singularity");
  return r;
}

} // namespace detail

// --------------------------------------------------------------------------
// F-system: potential, Hamiltonian, vector field
// --------------------------------------------------------------------------

inline double v_potential(double rho, double z, const OrbitConstants& oc) {
  const double r = detail::checked_radius(rho, z, "v_potential");
  const double ep = checked_exp(2.0 / r, "v_potential");
  const double em = std::exp(-2.0 / r);
  return 0.5 - 0.5 * oc.E2 * ep + oc.L2 / (2.0 * rho * rho) * em;
}

// Exact gradient of v.
inline Grad2 v_gradient(double rho, double z, const OrbitConstants& oc) {
  const double r = detail::checked_radius(rho, z, "v_gradient");
  const double r3 = r * r * r;
  const double ep = checked_exp(2.0 / r, "v_gradient");
  const double em = std::exp(-2.0 / r);
  const double rho3 = rho * rho * rho;
  const double d_rho = oc.E2 * rho * ep / r3 + oc.L2 * em * (1.0 / (rho * r3) - 1.0 / rho3);
  const double d_z = z * (oc.E2 * ep + oc.L2 * em / (rho * rho)) / r3;
  return {d_rho, d_z};
}

inline double f_hamiltonian(const PhasePoint& p, const OrbitConstants& oc) {
  return 0.5 * (sqr(p.p_rho) + sqr(p.p_z)) + v_potential(p.rho, p.z, oc);
}

// tau-time equations of motion. `gradient` takes the exact gradient of F;
// `printed` reproduces the published right-hand side verbatim.
inline FieldDeriv f_vector_field(const PhasePoint& p, const OrbitConstants& oc,
                                 FieldMode mode = FieldMode::gradient) {
  const double r = detail::checked_radius(p.rho, p.z, "f_vector_field");
  const double r3 = r * r * r;
  const double ep = checked_exp(2.0 / r, "f_vector_field");
  const double em = std::exp(-2.0 / r);
  const double rho = p.rho;
  const double rho3 = rho * rho * rho;
  const double first_factor = mode == FieldMode::printed ? rho * rho : rho;
  FieldDeriv d;
  d.rho_dot = p.p_rho;
  d.z_dot = p.p_z;
  d.p_rho_dot = -oc.E2 * first_factor * ep / r3 - oc.L2 * em / (r3 * rho) + oc.L2 * em / rho3;
  d.p_z_dot = -p.z * (oc.E2 * rho * rho * ep + oc.L2 * em) / (r3 * rho * rho);
  return d;
}

// --------------------------------------------------------------------------
// t-time reduced system: V_eff, H2, and the 4D mass-shell residual
// --------------------------------------------------------------------------

// Published effective potential V_eff = -Phi/2,
// Phi = e^{-2 gamma} (E^2 - e^{2 psi} - rho^{-2} e^{4 psi} L^2).
inline double v_eff(double rho, double z, const OrbitConstants& oc,
                    const MetricParams& params = {}) {
  detail::checked_radius(rho, z, "v_eff");
  const FieldPoint pt{rho, z};
  const double ps = psi(pt, params);
  const double e2psi = checked_exp(2.0 * ps, "v_eff");
  const double phi = checked_exp(-2.0 * gamma_fn(pt, params), "v_eff") *
                     (oc.E2 - e2psi - oc.L2 * sqr(e2psi) / sqr(rho));
  return -0.5 * phi;
}

// H4 + 1/2 with p_t = -E, p_phi = L, assembled from the inverse Weyl metric.
// Vanishes on the physical mass shell.
inline double h4_residual(const PhasePoint& p, const OrbitConstants& oc,
                          const MetricParams& params = {}) {
  detail::checked_radius(p.rho, p.z, "h4_residual");
  const FieldPoint pt{p.rho, p.z};
  const double ps = psi(pt, params);
  const double om2 = sqr(omega(pt, params));
  const double h4 = 0.5 * (-checked_exp(-2.0 * ps, "h4_residual") * oc.E2 +
                           om2 * (sqr(p.p_rho) + sqr(p.p_z)) +
                           checked_exp(2.0 * ps, "h4_residual") * oc.L2 / sqr(p.rho));
  return h4 + 0.5;
}

// Reduced t-time Hamiltonian. `printed` evaluates Omega^2 (|p|^2/2 + V_eff)
// as published; `canonical` rebuilds it from the mass shell (H4 + 1/2).
inline double h2_hamiltonian(const PhasePoint& p, const OrbitConstants& oc,
                             const MetricParams& params = {},
                             H2Mode mode = H2Mode::canonical) {
  if (mode == H2Mode::printed) {
    const double om2 = sqr(omega(FieldPoint{p.rho, p.z}, params));
    return om2 * (0.5 * (sqr(p.p_rho) + sqr(p.p_z)) + v_eff(p.rho, p.z, oc, params));
  }
  return h4_residual(p, oc, params);
}

// Potential term of the canonical H2: U_c = (1 - e^{-2 psi} E^2 + e^{2 psi} L^2/rho^2)/2.
// Coincides with v for m = 1.
inline double h2_canonical_potential(double rho, double z, const OrbitConstants& oc,
                                     const MetricParams& params = {}) {
  detail::checked_radius(rho, z, "h2_canonical_potential");
  const double ps = psi(FieldPoint{rho, z}, params);
  return 0.5 * (1.0 - checked_exp(-2.0 * ps, "h2_canonical_potential") * oc.E2 +
                checked_exp(2.0 * ps, "h2_canonical_potential") * oc.L2 / sqr(rho));
}

// Time substitution d tau = Omega^2 dt applied to the canonical H2 gives the
// separable Hamiltonian |p|^2/2 + U_c/Omega^2 on the H2 = 0 level set.
inline double reduced_potential_canonical(double rho, double z, const OrbitConstants& oc,
                                          const MetricParams& params = {}) {
  const double om2 = sqr(omega(FieldPoint{rho, z}, params));
  return h2_canonical_potential(rho, z, oc, params) / om2;
}

inline Grad2 reduced_potential_canonical_grad(double rho, double z, const OrbitConstants& oc,
                                              const MetricParams& params = {}) {
  detail::checked_radius(rho, z, "reduced_potential_canonical_grad");
  const FieldPoint pt{rho, z};
  const double ps = psi(pt, params);
  const double gm = gamma_fn(pt, params);
  const Grad2 dps = grad_psi(pt, params);
  const Grad2 dgm = grad_gamma(pt, params);
  // u = (e^{2g-2s} - E^2 e^{2g-4s} + L^2 e^{2g}/rho^2)/2
  const double a = checked_exp(2.0 * gm - 2.0 * ps, "reduced_potential_canonical_grad");
  const double b = checked_exp(2.0 * gm - 4.0 * ps, "reduced_potential_canonical_grad");
  const double c = checked_exp(2.0 * gm, "reduced_potential_canonical_grad");
  Grad2 out;
  out.d_rho = a * (dgm.d_rho - dps.d_rho) - oc.E2 * b * (dgm.d_rho - 2.0 * dps.d_rho) +
              oc.L2 * c * (dgm.d_rho / sqr(rho) - 1.0 / (rho * rho * rho));
  out.d_z = a * (dgm.d_z - dps.d_z) - oc.E2 * b * (dgm.d_z - 2.0 * dps.d_z) +
            oc.L2 * c * dgm.d_z / sqr(rho);
  return out;
}

// t-time vector field of the canonical H2 = Omega^2 |p|^2/2 + U_c.
inline FieldDeriv h2_canonical_field(const PhasePoint& p, const OrbitConstants& oc,
                                     const MetricParams& params = {}) {
  detail::checked_radius(p.rho, p.z, "h2_canonical_field");
  const FieldPoint pt{p.rho, p.z};
  const double ps = psi(pt, params);
  const double om2 = sqr(omega(pt, params));
  const Grad2 dps = grad_psi(pt, params);
  const Grad2 dgm = grad_gamma(pt, params);
  const double p2 = sqr(p.p_rho) + sqr(p.p_z);
  const double em2s = checked_exp(-2.0 * ps, "h2_canonical_field");
  const double e2s = checked_exp(2.0 * ps, "h2_canonical_field");
  // dU_c/dx = E^2 e^{-2s} s_x + L^2 e^{2s} (s_x/rho^2 - delta_{x,rho}/rho^3)
  const double du_rho = oc.E2 * em2s * dps.d_rho +
                        oc.L2 * e2s * (dps.d_rho / sqr(p.rho) - 1.0 / (p.rho * p.rho * p.rho));
  const double du_z = oc.E2 * em2s * dps.d_z + oc.L2 * e2s * dps.d_z / sqr(p.rho);
  FieldDeriv d;
  d.rho_dot = om2 * p.p_rho;
  d.z_dot = om2 * p.p_z;
  d.p_rho_dot = -(om2 * (dps.d_rho - dgm.d_rho) * p2 + du_rho);
  d.p_z_dot = -(om2 * (dps.d_z - dgm.d_z) * p2 + du_z);
  return d;
}

// --------------------------------------------------------------------------
// Equilibrium family (circular orbits of the reduced flow)
// --------------------------------------------------------------------------

// Published closed forms, verbatim including their signs:
//   L^2 = -rho^2 e^{2/rho} / (rho - 2),  E^2 = -(rho - 1) e^{-2/rho} / (rho - 2).
inline OrbitConstants equilibrium_closed_form(double rho0) {
  if (rho0 <= 0.0) throw domain_error("equilibrium_closed_form: rho0 must be positive");
  if (rho0 == 2.0)
    throw degenerate_error("equilibrium_closed_form: rho0 = 2 is a singular parameter");
  OrbitConstants oc;
  oc.L2 = -sqr(rho0) * std::exp(2.0 / rho0) / (rho0 - 2.0);
  oc.E2 = -(rho0 - 1.0) * std::exp(-2.0 / rho0) / (rho0 - 2.0);
  return oc;
}

// Published second-derivative formula for v at the equilibrium family:
// d^2 v / d rho^2 = -(rho^2 - 6 rho + 4) / (rho^4 (rho - 2)).
inline double vpp_printed_formula(double rho0) {
  return -(sqr(rho0) - 6.0 * rho0 + 4.0) / (sqr(sqr(rho0)) * (rho0 - 2.0));
}

// d^2v/drho^2 or d^2v/dz^2 at (rho0, 0) with (E^2, L^2) held fixed, analytic.
inline double v_second_derivative(double rho0, const OrbitConstants& oc, Axis which) {
  detail::checked_radius(rho0, 0.0, "v_second_derivative");
  const double ep = checked_exp(2.0 / rho0, "v_second_derivative");
  const double em = std::exp(-2.0 / rho0);
  const double r4 = sqr(sqr(rho0));
  if (which == Axis::rho) {
    const double r6 = r4 * sqr(rho0);
    return -2.0 * oc.E2 * ep * (1.0 + rho0) / r4 +
           oc.L2 * em * (3.0 * sqr(rho0) - 6.0 * rho0 + 2.0) / r6;
  }
  return (oc.E2 * ep + oc.L2 * em / sqr(rho0)) / (rho0 * rho0 * rho0);
}

inline StabilityClass classify_from_curvature(double vpp) {
  if (vpp > tol_degenerate) return StabilityClass::center;
  if (vpp < -tol_degenerate) return StabilityClass::saddle;
  return StabilityClass::degenerate;
}

// Solves the 2x2 linear system {F(0,0,rho0,0) = 0, dF/drho(0,0,rho0,0) = 0}
// in the unknowns (E^2, L^2), using the exact gradient of F. Signs come out of
// the solve; they are reported against the closed forms, never forced.
inline EquilibriumRecord equilibrium_solve(double rho0) {
  detail::checked_radius(rho0, 0.0, "equilibrium_solve");
  const double ep = checked_exp(2.0 / rho0, "equilibrium_solve");
  const double em = std::exp(-2.0 / rho0);
  const double rho2 = sqr(rho0);
  const double rho4 = sqr(rho2);
  // F   = 1/2 + aF E^2 + bF L^2
  // F_r =       aG E^2 + bG L^2
  const double a_f = -0.5 * ep;
  const double b_f = em / (2.0 * rho2);
  const double a_g = ep / rho2;
  const double b_g = em * (1.0 - rho0) / rho4;
  const double det = a_f * b_g - b_f * a_g;
  if (std::abs(det) < 1e-14)
    throw degenerate_error("equilibrium_solve: singular equilibrium system (rho0 near 2)");

  EquilibriumRecord rec;
  rec.rho0 = rho0;
  rec.E2_solved = -0.5 * b_g / det;  // Cramer, RHS = (-1/2, 0)
  rec.L2_solved = 0.5 * a_g / det;
  const OrbitConstants solved{rec.E2_solved, rec.L2_solved};
  const OrbitConstants closed = equilibrium_closed_form(rho0);
  rec.E2_closed = closed.E2;
  rec.L2_closed = closed.L2;
  rec.f_level = f_hamiltonian(PhasePoint{rho0, 0.0, 0.0, 0.0}, solved);
  rec.vpp = v_second_derivative(rho0, solved, Axis::rho);
  rec.vpp_printed = vpp_printed_formula(rho0);
  rec.g = rec.vpp < 0.0 ? std::sqrt(2.0) / std::sqrt(-rec.vpp) : quiet_nan;
  rec.vzz = v_second_derivative(rho0, solved, Axis::z);
  rec.stability_class = classify_from_curvature(rec.vpp);

  auto sign_of = [](double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); };
  rec.sign_agreement = sign_of(rec.E2_solved) == sign_of(rec.E2_closed) &&
                       sign_of(rec.L2_solved) == sign_of(rec.L2_closed);
  auto rel = [](double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s > 0.0 ? std::abs(std::abs(a) - std::abs(b)) / s : 0.0;
  };
  rec.mag_rel_err = std::max(rel(rec.E2_solved, rec.E2_closed),
                             rel(rec.L2_solved, rec.L2_closed));
  return rec;
}

inline EquilibriumRecord classify_equilibrium(double rho0) {
  return equilibrium_solve(rho0);
}

// --------------------------------------------------------------------------
// Poisson bracket (published ordering: momentum derivative first)
// --------------------------------------------------------------------------

using Observable = std::function<double(const PhasePoint&)>;

namespace detail {

inline constexpr double h_pb = 1e-5;  // relative FD step for bracket partials

// Central difference with one Richardson refinement in the given coordinate
// (0 = rho, 1 = z, 2 = p_rho, 3 = p_z).
inline double fd_partial(const Observable& f, const PhasePoint& p, int coord) {
  auto shifted = [&](double delta) {
    PhasePoint q = p;
    switch (coord) {
      case 0: q.rho += delta; break;
      case 1: q.z += delta; break;
      case 2: q.p_rho += delta; break;
      default: q.p_z += delta; break;
    }
    return f(q);
  };
  const double base = coord == 0   ? p.rho
                      : coord == 1 ? p.z
                      : coord == 2 ? p.p_rho
                                   : p.p_z;
  const double h = h_pb * std::max(1.0, std::abs(base));
  const double d_h = (shifted(h) - shifted(-h)) / (2.0 * h);
  const double d_h2 = (shifted(0.5 * h) - shifted(-0.5 * h)) / h;
  return (4.0 * d_h2 - d_h) / 3.0;
}

} // namespace detail

// {f, g} = sum_i df/dp_i dg/dq_i - df/dq_i dg/dp_i
inline double poisson_bracket(const Observable& f, const Observable& g, const PhasePoint& p) {
  const double f_rho = detail::fd_partial(f, p, 0);
  const double f_z = detail::fd_partial(f, p, 1);
  const double f_prho = detail::fd_partial(f, p, 2);
  const double f_pz = detail::fd_partial(f, p, 3);
  const double g_rho = detail::fd_partial(g, p, 0);
  const double g_z = detail::fd_partial(g, p, 1);
  const double g_prho = detail::fd_partial(g, p, 2);
  const double g_pz = detail::fd_partial(g, p, 3);
  return f_prho * g_rho + f_pz * g_z - f_rho * g_prho - f_z * g_pz;
}

} // namespace curzon
