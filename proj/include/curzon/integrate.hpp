#pragma once
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "curzon/common.hpp"
#include "curzon/dynamics.hpp"
#include "curzon/errors.hpp"

// Propagation of the tau-time F-system and the t-time canonical H2 system:
// kick-drift-kick leapfrog for the separable F-system, Dormand-Prince 5(4)
// with step-size control for everything event-driven, surface-of-section
// crossing detection with root refinement, and a section rotation number.

namespace curzon {

enum class Method { leapfrog, adaptive_rk };

struct IntegrateOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double escape_rho_max = 1e3;
  double escape_z_max = 1e3;
  std::size_t record_every = 1;
  FieldMode field_mode = FieldMode::gradient;
};

struct Trajectory {
  std::vector<PhasePoint> samples;
  std::vector<double> f_values;   // conserved quantity per sample
  double drift_max = 0.0;         // max |F - F0| over every step taken
  Method method = Method::leapfrog;
  double step = 0.0;
};

struct SectionPoint {
  double rho = 0.0;
  double p_rho = 0.0;
  double tau_cross = 0.0;
  double refine_residual = 0.0;  // |z| at the refined crossing
};

// --------------------------------------------------------------------------
// Generic Dormand-Prince 5(4) core
// --------------------------------------------------------------------------

template <std::size_t N>
using State = std::array<double, N>;

namespace detail {

template <std::size_t N>
inline State<N> axpy(const State<N>& y, double h, const State<N>& k) {
  State<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h * k[i];
  return out;
}

} // namespace detail

// Integrates y' = rhs(t, y) from t to t_end. `dt_hint` carries the step size
// across calls. `step_cb(t, y)` runs after every accepted internal step.
template <std::size_t N, class RHS, class StepCb>
void rk_integrate_to(const RHS& rhs, double& t, State<N>& y, double t_end,
                     double rtol, double atol, double& dt_hint, StepCb&& step_cb) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  const double span = std::abs(t_end - t);
  if (span == 0.0) return;
  const double dir = t_end > t ? 1.0 : -1.0;
  double dt = dt_hint > 0.0 ? std::min(dt_hint, span) : std::min(1e-2, span);

  State<N> k1 = rhs(t, y);
  while (dir * (t_end - t) > 0.0) {
    dt = std::min(dt, std::abs(t_end - t));
    if (dt < 1e-14 * std::max(1.0, std::abs(t)))
      throw step_error("rk_integrate_to: step size underflow");
    const double h = dir * dt;

    const State<N> k2 = rhs(t + h * a21, detail::axpy(y, h * a21, k1));
    State<N> tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const State<N> k3 = rhs(t + h * (3.0 / 10), tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const State<N> k4 = rhs(t + h * (4.0 / 5), tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    const State<N> k5 = rhs(t + h * (8.0 / 9), tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const State<N> k6 = rhs(t + h, tmp);
    State<N> y_new;
    for (std::size_t i = 0; i < N; ++i)
      y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    const State<N> k7 = rhs(t + h, y_new);  // FSAL

    double err_norm = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                              e6 * k6[i] + e7 * k7[i]);
      const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err_norm += sqr(err / scale);
    }
    err_norm = std::sqrt(err_norm / N);

    if (err_norm <= 1.0) {
      t += h;
      y = y_new;
      k1 = k7;
      step_cb(t, y);
    }
    const double factor = err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
    dt *= std::min(5.0, std::max(0.2, factor));
  }
  dt_hint = dt;
}

template <std::size_t N, class RHS>
void rk_integrate_to(const RHS& rhs, double& t, State<N>& y, double t_end,
                     double rtol, double atol, double& dt_hint) {
  rk_integrate_to(rhs, t, y, t_end, rtol, atol, dt_hint,
                  [](double, const State<N>&) {});
}

// --------------------------------------------------------------------------
// Leapfrog for separable Hamiltonians |p|^2/2 + U(q)
// --------------------------------------------------------------------------

// One kick-drift-kick step. `force(rho, z)` returns (dU/drho, dU/dz); the
// step is time-reversible under dt -> -dt composed with momentum flip.
template <class GradU>
PhasePoint leapfrog_step(const PhasePoint& p, double dt, GradU&& grad_u) {
  const Grad2 g0 = grad_u(p.rho, p.z);
  PhasePoint q = p;
  q.p_rho -= 0.5 * dt * g0.d_rho;
  q.p_z -= 0.5 * dt * g0.d_z;
  q.rho += dt * q.p_rho;
  q.z += dt * q.p_z;
  const Grad2 g1 = grad_u(q.rho, q.z);
  q.p_rho -= 0.5 * dt * g1.d_rho;
  q.p_z -= 0.5 * dt * g1.d_z;
  q.tau = p.tau + dt;
  return q;
}

// F-system leapfrog step (gradient-mode force).
inline PhasePoint step_leapfrog(const PhasePoint& p, double dt, const OrbitConstants& oc) {
  if (dt == 0.0) throw domain_error("step_leapfrog: dt must be nonzero");
  return leapfrog_step(p, dt, [&oc](double rho, double z) { return v_gradient(rho, z, oc); });
}

// --------------------------------------------------------------------------
// F-system propagation
// --------------------------------------------------------------------------

namespace detail {

inline void check_bounds(const PhasePoint& p, const IntegrateOptions& opts) {
  if (p.rho > opts.escape_rho_max || std::abs(p.z) > opts.escape_z_max)
    throw escape_error("integrate: trajectory left the configured bounds");
  if (p.rho < r_min || std::hypot(p.rho, p.z) < r_min)
    throw singularity_error("integrate: trajectory approached the singularity");
}

// Force of the tau-time field for either field mode. Positions only.
inline Grad2 f_field_force(double rho, double z, const OrbitConstants& oc, FieldMode mode) {
  if (mode == FieldMode::gradient) return v_gradient(rho, z, oc);
  const FieldDeriv d = f_vector_field(PhasePoint{rho, z, 0.0, 0.0}, oc, FieldMode::printed);
  return {-d.p_rho_dot, -d.p_z_dot};
}

} // namespace detail

inline Trajectory integrate(const PhasePoint& p0, const OrbitConstants& oc, double dt,
                            std::size_t n_steps, Method method,
                            const IntegrateOptions& opts = {}) {
  if (n_steps < 1) throw domain_error("integrate: n_steps must be >= 1");
  if (dt <= 0.0) throw domain_error("integrate: dt must be positive");

  Trajectory traj;
  traj.method = method;
  traj.step = dt;
  traj.samples.reserve(n_steps / opts.record_every + 2);
  traj.f_values.reserve(n_steps / opts.record_every + 2);

  PhasePoint p = p0;
  const double f0 = f_hamiltonian(p, oc);
  auto record = [&](const PhasePoint& q, double f) {
    traj.samples.push_back(q);
    traj.f_values.push_back(f);
  };
  record(p, f0);

  if (method == Method::leapfrog) {
    auto force = [&](double rho, double z) {
      return detail::f_field_force(rho, z, oc, opts.field_mode);
    };
    for (std::size_t k = 1; k <= n_steps; ++k) {
      p = leapfrog_step(p, dt, force);
      detail::check_bounds(p, opts);
      const double f = f_hamiltonian(p, oc);
      traj.drift_max = std::max(traj.drift_max, std::abs(f - f0));
      if (k % opts.record_every == 0 || k == n_steps) record(p, f);
    }
    return traj;
  }

  auto rhs = [&](double, const State<4>& y) {
    const FieldDeriv d =
        f_vector_field(PhasePoint{y[0], y[1], y[2], y[3]}, oc, opts.field_mode);
    return State<4>{d.rho_dot, d.z_dot, d.p_rho_dot, d.p_z_dot};
  };
  State<4> y{p.rho, p.z, p.p_rho, p.p_z};
  double t = p0.tau;
  double dt_hint = dt;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    rk_integrate_to(rhs, t, y, p0.tau + double(k) * dt, opts.rtol, opts.atol, dt_hint,
                    [&](double, const State<4>& s) {
                      detail::check_bounds(PhasePoint{s[0], s[1], s[2], s[3]}, opts);
                    });
    p = PhasePoint{y[0], y[1], y[2], y[3], t};
    const double f = f_hamiltonian(p, oc);
    traj.drift_max = std::max(traj.drift_max, std::abs(f - f0));
    if (k % opts.record_every == 0 || k == n_steps) record(p, f);
  }
  return traj;
}

// --------------------------------------------------------------------------
// Canonical H2 flow (coordinate time) and its tau-reparametrized reduction
// --------------------------------------------------------------------------

// t-time flow of the canonical H2; the tau field of each sample accumulates
// d tau = Omega^2 dt. f_values carry H2 itself.
inline Trajectory integrate_h2_canonical(const PhasePoint& p0, const OrbitConstants& oc,
                                         const MetricParams& params, double dt,
                                         std::size_t n_steps,
                                         const IntegrateOptions& opts = {}) {
  if (n_steps < 1) throw domain_error("integrate_h2_canonical: n_steps must be >= 1");
  auto rhs = [&](double, const State<5>& y) {
    const PhasePoint q{y[0], y[1], y[2], y[3]};
    const FieldDeriv d = h2_canonical_field(q, oc, params);
    const double om2 = sqr(omega(FieldPoint{y[0], y[1]}, params));
    return State<5>{d.rho_dot, d.z_dot, d.p_rho_dot, d.p_z_dot, om2};
  };

  Trajectory traj;
  traj.method = Method::adaptive_rk;
  traj.step = dt;
  State<5> y{p0.rho, p0.z, p0.p_rho, p0.p_z, p0.tau};
  double t = 0.0;
  double dt_hint = dt;
  const double h0 = h2_hamiltonian(p0, oc, params, H2Mode::canonical);
  traj.samples.push_back(p0);
  traj.f_values.push_back(h0);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    rk_integrate_to(rhs, t, y, double(k) * dt, opts.rtol, opts.atol, dt_hint,
                    [&](double, const State<5>& s) {
                      detail::check_bounds(PhasePoint{s[0], s[1], s[2], s[3]}, opts);
                    });
    const PhasePoint p{y[0], y[1], y[2], y[3], y[4]};
    const double h = h2_hamiltonian(p, oc, params, H2Mode::canonical);
    traj.drift_max = std::max(traj.drift_max, std::abs(h - h0));
    if (k % opts.record_every == 0 || k == n_steps) {
      traj.samples.push_back(p);
      traj.f_values.push_back(h);
    }
  }
  return traj;
}

// tau-time flow of |p|^2/2 + U_c/Omega^2 (the time-substituted canonical H2).
inline Trajectory integrate_reduced_canonical(const PhasePoint& p0, const OrbitConstants& oc,
                                              const MetricParams& params, double dt,
                                              std::size_t n_steps,
                                              const IntegrateOptions& opts = {}) {
  if (n_steps < 1) throw domain_error("integrate_reduced_canonical: n_steps must be >= 1");
  auto rhs = [&](double, const State<4>& y) {
    const Grad2 g = reduced_potential_canonical_grad(y[0], y[1], oc, params);
    return State<4>{y[2], y[3], -g.d_rho, -g.d_z};
  };
  auto energy = [&](const PhasePoint& p) {
    return 0.5 * (sqr(p.p_rho) + sqr(p.p_z)) +
           reduced_potential_canonical(p.rho, p.z, oc, params);
  };

  Trajectory traj;
  traj.method = Method::adaptive_rk;
  traj.step = dt;
  State<4> y{p0.rho, p0.z, p0.p_rho, p0.p_z};
  double t = p0.tau;
  double dt_hint = dt;
  const double e0 = energy(p0);
  traj.samples.push_back(p0);
  traj.f_values.push_back(e0);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    rk_integrate_to(rhs, t, y, p0.tau + double(k) * dt, opts.rtol, opts.atol, dt_hint,
                    [&](double, const State<4>& s) {
                      detail::check_bounds(PhasePoint{s[0], s[1], s[2], s[3]}, opts);
                    });
    const PhasePoint p{y[0], y[1], y[2], y[3], t};
    const double e = energy(p);
    traj.drift_max = std::max(traj.drift_max, std::abs(e - e0));
    if (k % opts.record_every == 0 || k == n_steps) {
      traj.samples.push_back(p);
      traj.f_values.push_back(e);
    }
  }
  return traj;
}

// --------------------------------------------------------------------------
// Surface of section {z = 0, p_z > 0}
// --------------------------------------------------------------------------

struct PoincareOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_tau = 1e5;           // give up (no-crossing) beyond this
  double escape_rho_max = 1e3;
  double escape_z_max = 1e3;
  FieldMode field_mode = FieldMode::gradient;
};

namespace detail {

// z at time s, re-integrated from (t0, y0) with a tight tolerance. Used by the
// crossing refinement so the reported residual is measured on the true flow,
// not on an interpolant.
template <class RHS>
State<4> reintegrate(const RHS& rhs, const State<4>& y0, double t0, double s) {
  State<4> y = y0;
  double t = t0;
  double dt_hint = std::abs(s - t0);
  if (dt_hint > 0.0) rk_integrate_to(rhs, t, y, s, 1e-13, 1e-14, dt_hint);
  return y;
}

} // namespace detail

namespace detail {

// Refine an upward z-crossing bracketed by consecutive accepted steps.
// Bisection with secant proposals on tau; every evaluation re-integrates the
// true flow from the bracket start, so the residual is honest.
template <class RHS>
std::pair<SectionPoint, double> refine_crossing(const RHS& rhs, const State<4>& y_a,
                                                double t_a, double t_b, double z_b) {
  double a = t_a, b = t_b;
  double s_curr = b, z_curr = z_b;
  double s_prev = a, z_prev = y_a[1];
  State<4> y_cross = reintegrate(rhs, y_a, t_a, t_b);
  for (int it = 0; it < 80 && std::abs(z_curr) > 1e-12; ++it) {
    double cand;
    if (z_curr != z_prev) {
      cand = s_curr - z_curr * (s_curr - s_prev) / (z_curr - z_prev);
      if (!(cand > a && cand < b)) cand = 0.5 * (a + b);
    } else {
      cand = 0.5 * (a + b);
    }
    const State<4> yc = reintegrate(rhs, y_a, t_a, cand);
    s_prev = s_curr;
    z_prev = z_curr;
    s_curr = cand;
    z_curr = yc[1];
    y_cross = yc;
    if (z_curr >= 0.0) b = cand;
    else a = cand;
  }
  if (std::abs(z_curr) > 1e-10)
    throw convergence_error("poincare_section: crossing refinement stalled");
  SectionPoint sp;
  sp.rho = y_cross[0];
  sp.p_rho = y_cross[2];
  sp.tau_cross = s_curr;
  sp.refine_residual = std::abs(z_curr);
  return {sp, y_cross[3]};
}

} // namespace detail

inline std::vector<SectionPoint> poincare_section(const PhasePoint& p0,
                                                  const OrbitConstants& oc,
                                                  std::size_t n_crossings,
                                                  const PoincareOptions& opts = {}) {
  if (n_crossings < 1) throw domain_error("poincare_section: n_crossings must be >= 1");
  auto rhs = [&](double, const State<4>& y) {
    const FieldDeriv d =
        f_vector_field(PhasePoint{y[0], y[1], y[2], y[3]}, oc, opts.field_mode);
    return State<4>{d.rho_dot, d.z_dot, d.p_rho_dot, d.p_z_dot};
  };
  IntegrateOptions bounds;
  bounds.escape_rho_max = opts.escape_rho_max;
  bounds.escape_z_max = opts.escape_z_max;

  std::vector<SectionPoint> points;
  points.reserve(n_crossings);
  State<4> y{p0.rho, p0.z, p0.p_rho, p0.p_z};
  double t = p0.tau;
  double dt_hint = 0.0;
  State<4> prev_y = y;
  double prev_t = t;
  // detection runs on every accepted internal step, so closely spaced
  // crossings within one driver chunk are not lost
  auto on_step = [&](double tc, const State<4>& s) {
    detail::check_bounds(PhasePoint{s[0], s[1], s[2], s[3]}, bounds);
    if (prev_y[1] < 0.0 && s[1] >= 0.0 && points.size() < n_crossings) {
      const auto [sp, pz_cross] = detail::refine_crossing(rhs, prev_y, prev_t, tc, s[1]);
      if (pz_cross > 0.0) points.push_back(sp);
    }
    prev_y = s;
    prev_t = tc;
  };

  while (points.size() < n_crossings) {
    if (t - p0.tau > opts.max_tau)
      throw convergence_error("poincare_section: no crossing within max_tau");
    rk_integrate_to(rhs, t, y, t + 1.0, opts.rtol, opts.atol, dt_hint, on_step);
  }
  return points;
}

// Mean normalized angular advance per crossing about the section centroid,
// measured in axis-normalized coordinates, result in [0, 1).
inline double rotation_number(std::span<const SectionPoint> points) {
  const std::size_t n = points.size();
  if (n < 8) throw insufficient_data_error("rotation_number: need >= 8 section points");
  double cq = 0.0, cp = 0.0;
  for (const auto& s : points) {
    cq += s.rho;
    cp += s.p_rho;
  }
  cq /= double(n);
  cp /= double(n);
  double sqq = 0.0, spp = 0.0, sqp = 0.0;
  for (const auto& s : points) {
    const double dq = s.rho - cq, dp = s.p_rho - cp;
    sqq += dq * dq;
    spp += dp * dp;
    sqp += dq * dp;
  }
  const double scale = std::max(std::abs(cq), 1.0);
  if (sqq <= sqr(1e-12 * scale) * n || spp <= sqr(1e-12 * scale) * n)
    throw degenerate_error("rotation_number: section points are degenerate (identical or collinear)");
  const double corr = sqp / std::sqrt(sqq * spp);
  if (std::abs(corr) > 1.0 - 1e-12)
    throw degenerate_error("rotation_number: section points are collinear");

  const double sq = std::sqrt(sqq / double(n));
  const double sp = std::sqrt(spp / double(n));
  double sum = 0.0;
  auto angle = [&](const SectionPoint& s) {
    // clockwise-positive: a harmonic section map advances by +omega * T_return
    return std::atan2(-(s.p_rho - cp) / sp, (s.rho - cq) / sq);
  };
  double prev = angle(points[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const double cur = angle(points[i]);
    double d = cur - prev;
    while (d <= -M_PI) d += 2.0 * M_PI;
    while (d > M_PI) d -= 2.0 * M_PI;
    sum += d;
    prev = cur;
  }
  const double mean = sum / double(n - 1) / (2.0 * M_PI);
  double nu = std::fmod(mean, 1.0);
  if (nu < 0.0) nu += 1.0;
  return nu;
}

} // namespace curzon
