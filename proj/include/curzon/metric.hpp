#pragma once
#include <cmath>

#include "curzon/common.hpp"
#include "curzon/errors.hpp"

// Chazy-Curzon Weyl potentials psi, gamma, the conformal factor Omega, their
// gradients, and the vacuum field-equation residuals.
//
// Line element (Weyl form, cylindrical chart (t, rho, z, phi)):
//   ds^2 = -e^{2 psi} dt^2 + e^{-2 psi} (e^{2 gamma}(drho^2 + dz^2) + rho^2 dphi^2)
//
// psi = -m / sqrt(rho^2 + z^2). Two gamma variants circulate for this solution:
// the standard one has (rho^2+z^2)^2 in the denominator, a published variant
// has (rho^2+z^2)^4. Both are kept behind GammaMode and adjudicated numerically
// by the papercheck module; nothing is silently corrected.

namespace curzon {

enum class GammaMode {
  paper,    // gamma = -m^2 rho^2 / (2 (rho^2+z^2)^4)
  standard  // gamma = -m^2 rho^2 / (2 (rho^2+z^2)^2)
};

// Sign between the psi-gradient squares in the gamma_rho field equation.
enum class SignMode {
  paper_plus,     // gamma_,rho = rho (psi_,rho^2 + psi_,z^2)
  standard_minus  // gamma_,rho = rho (psi_,rho^2 - psi_,z^2)
};

struct MetricParams {
  double m = 1.0;                              // mass, geometrized units
  GammaMode gamma_mode = GammaMode::standard;  // physical default; `paper` for audits
};

struct FieldPoint {
  double rho = 0.0;
  double z = 0.0;
};

struct Grad2 {
  double d_rho = 0.0;
  double d_z = 0.0;
};

namespace detail {

inline double radius_checked(const FieldPoint& pt, const char* where) {
  const double r = std::hypot(pt.rho, pt.z);
  if (r < r_min)
    throw domain_error(std::string(where) + ": point within r_min of the rho=z=0 singularity");
  return r;
}

inline void require_off_axis(const FieldPoint& pt, const char* where) {
  if (pt.rho < r_min)
    throw domain_error(std::string(where) + ": evaluation requires rho >= r_min");
}

} // namespace detail

inline double psi(const FieldPoint& pt, const MetricParams& params = {}) {
  const double r = detail::radius_checked(pt, "psi");
  return -params.m / r;
}

// Analytic gradient (m rho / r^3, m z / r^3). Derivative evaluations reject
// rho < r_min; closed limits on the axis are only provided for psi and gamma.
inline Grad2 grad_psi(const FieldPoint& pt, const MetricParams& params = {}) {
  detail::require_off_axis(pt, "grad_psi");
  const double r = detail::radius_checked(pt, "grad_psi");
  const double r3 = r * r * r;
  return {params.m * pt.rho / r3, params.m * pt.z / r3};
}

inline double gamma_fn(const FieldPoint& pt, const MetricParams& params = {}) {
  const double r = detail::radius_checked(pt, "gamma_fn");
  const double r2 = r * r;
  const double den = params.gamma_mode == GammaMode::paper ? sqr(sqr(r2)) : sqr(r2);
  return -sqr(params.m) * sqr(pt.rho) / (2.0 * den);
}

inline Grad2 grad_gamma(const FieldPoint& pt, const MetricParams& params = {}) {
  detail::require_off_axis(pt, "grad_gamma");
  const double r = detail::radius_checked(pt, "grad_gamma");
  const double r2 = r * r;
  const double m2 = sqr(params.m);
  if (params.gamma_mode == GammaMode::standard) {
    const double r6 = r2 * r2 * r2;
    return {m2 * pt.rho * (2.0 * sqr(pt.rho) - r2) / r6,
            2.0 * m2 * sqr(pt.rho) * pt.z / r6};
  }
  const double r10 = r2 * r2 * r2 * r2 * r2;
  return {m2 * pt.rho * (4.0 * sqr(pt.rho) - r2) / r10,
          4.0 * m2 * sqr(pt.rho) * pt.z / r10};
}

// Conformal factor Omega = e^(psi - gamma); -> 1 at spatial infinity.
inline double omega(const FieldPoint& pt, const MetricParams& params = {}) {
  return checked_exp(psi(pt, params) - gamma_fn(pt, params), "omega");
}

// Cylindrical Laplacian of psi, assembled term by term so rounding is visible:
// psi is harmonic, so the result is ~0 up to cancellation error.
inline double laplace_residual(const FieldPoint& pt, const MetricParams& params = {}) {
  detail::require_off_axis(pt, "laplace_residual");
  const double r = detail::radius_checked(pt, "laplace_residual");
  const double r2 = r * r;
  const double r5 = r2 * r2 * r;
  const double d_rho_rho = params.m * (r2 - 3.0 * sqr(pt.rho)) / r5;
  const double d_z_z = params.m * (r2 - 3.0 * sqr(pt.z)) / r5;
  const double d_rho_over_rho = params.m / (r2 * r);
  return d_rho_rho + d_rho_over_rho + d_z_z;
}

struct WeylResiduals {
  double r_rho = 0.0;  // gamma_,rho - rho (psi_,rho^2 +/- psi_,z^2)
  double r_z = 0.0;    // gamma_,z   - 2 rho psi_,rho psi_,z
};

inline WeylResiduals weyl_residuals(const FieldPoint& pt, const MetricParams& params,
                                    SignMode sign_mode) {
  detail::require_off_axis(pt, "weyl_residuals");
  const Grad2 dpsi = grad_psi(pt, params);
  const Grad2 dgam = grad_gamma(pt, params);
  const double sign = sign_mode == SignMode::paper_plus ? 1.0 : -1.0;
  const double rhs_rho = pt.rho * (sqr(dpsi.d_rho) + sign * sqr(dpsi.d_z));
  const double rhs_z = 2.0 * pt.rho * dpsi.d_rho * dpsi.d_z;
  return {dgam.d_rho - rhs_rho, dgam.d_z - rhs_z};
}

} // namespace curzon
