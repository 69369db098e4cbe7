#pragma once
#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "curzon/dynamics.hpp"
#include "curzon/errors.hpp"
#include "curzon/fit.hpp"
#include "curzon/quadrature.hpp"
#include "curzon/rootfind.hpp"

// Period function T(h) on the invariant plane {z = p_z = 0}: turning points by
// bracketed root solve, singularity-free quadrature via the substitution
// rho = mid + halfwidth * sin(theta), and the logarithmic branching fit near
// saddle-type equilibria.

namespace curzon {

using Potential1D = std::function<double(double)>;

// `physical` integrates dt = drho / sqrt(2 (h - v)) from |p|^2/2 + v = h;
// `printed` drops the factor 2 under the root, scaling T by sqrt(2).
enum class Convention { physical, printed };

struct TurningPoints {
  double rho_minus = 0.0;
  double rho_plus = 0.0;
};

struct PeriodSample {
  double h = 0.0;           // energy offset from the critical level
  double rho_minus = 0.0;
  double rho_plus = 0.0;
  double eps = 0.0;         // rho_plus - rho0
  double delta = 0.0;       // rho0 - rho_minus
  double eta = 0.0;         // eps / delta
  double T = 0.0;
  double quad_error = 0.0;
};

struct LogFit {
  double slope = 0.0;       // of T against ln(1/|h|)
  double intercept = 0.0;
  double r_squared = 0.0;
  double implied_g = 0.0;   // slope normalized by the convention factor
  double g_reference = 0.0; // sqrt(2)/sqrt(-v''(rho0))
};

// --------------------------------------------------------------------------
// Turning points
// --------------------------------------------------------------------------

namespace detail {

inline void check_side_monotone(const Potential1D& v, double target, double a, double b) {
  // coarse sanity scan: one sign change of v - target per side of the well
  int changes = 0;
  const int n = 64;
  double prev = v(a) - target;
  for (int i = 1; i <= n; ++i) {
    const double x = a + (b - a) * double(i) / n;
    const double cur = v(x) - target;
    if (prev != 0.0 && cur != 0.0 && (prev > 0.0) != (cur > 0.0)) ++changes;
    prev = cur;
  }
  if (changes > 1)
    throw bracket_error("turning_points: bracket side is not monotone through the target level");
}

} // namespace detail

// Roots of v(x) = target on both sides of an interior point x_inside where
// v(x_inside) < target. Refined to machine precision in x; the value residual
// must come out below 1e-12.
inline TurningPoints turning_points(const Potential1D& v, double target, double lo, double hi,
                                    double x_inside) {
  if (!(lo < x_inside && x_inside < hi))
    throw bracket_error("turning_points: x_inside must lie strictly inside the bracket");
  const double f_lo = v(lo) - target;
  const double f_hi = v(hi) - target;
  const double f_in = v(x_inside) - target;
  if (f_in >= 0.0)
    throw bracket_error("turning_points: no bracket (interior point is not below the level)");
  if (f_lo <= 0.0 || f_hi <= 0.0)
    throw bracket_error("turning_points: no bracket (ends do not rise above the level)");
  detail::check_side_monotone(v, target, lo, x_inside);
  detail::check_side_monotone(v, target, x_inside, hi);

  auto f = [&](double x) { return v(x) - target; };
  const RootResult left = find_root(f, lo, x_inside);
  const RootResult right = find_root(f, x_inside, hi);
  if (std::abs(left.f_at_x) > 1e-12 || std::abs(right.f_at_x) > 1e-12)
    throw convergence_error("turning_points: root residual above 1e-12");
  return {left.x, right.x};
}

// --------------------------------------------------------------------------
// Period quadrature
// --------------------------------------------------------------------------

// Period of the bounded orbit at level (level + h) in the well around
// x_inside. The sin substitution absorbs both inverse-square-root endpoint
// singularities; Gauss-Legendre with node doubling does the rest.
inline PeriodSample period_quadrature(const Potential1D& v, double level, double h, double lo,
                                      double hi, double x_inside, double rho0,
                                      Convention conv, double quad_rel_tol = 1e-9) {
  const double target = level + h;
  const TurningPoints tp = turning_points(v, target, lo, hi, x_inside);
  const double mid = 0.5 * (tp.rho_minus + tp.rho_plus);
  const double half = 0.5 * (tp.rho_plus - tp.rho_minus);
  const double k = conv == Convention::physical ? 2.0 : 1.0;

  long interior_nonpositive = 0;
  auto integrand = [&](double theta) {
    const double s = std::sin(theta);
    const double w = target - v(mid + half * s);
    if (w <= 0.0) {
      if (std::abs(s) < 0.999) ++interior_nonpositive;
      return 0.0;
    }
    return half * std::cos(theta) / std::sqrt(k * w);
  };
  const QuadResult q = integrate_adaptive_gl(integrand, -M_PI / 2, M_PI / 2, quad_rel_tol);
  if (interior_nonpositive > 0)
    throw convergence_error("period_quadrature: integrand vanished away from the turning points");

  PeriodSample sample;
  sample.h = h;
  sample.rho_minus = tp.rho_minus;
  sample.rho_plus = tp.rho_plus;
  sample.eps = tp.rho_plus - rho0;
  sample.delta = rho0 - tp.rho_minus;
  sample.eta = sample.delta != 0.0 ? sample.eps / sample.delta : quiet_nan;
  sample.T = 2.0 * q.value;
  sample.quad_error = 2.0 * q.error_estimate;
  return sample;
}

// --------------------------------------------------------------------------
// Scan geometry for the Chazy-Curzon equilibrium family
// --------------------------------------------------------------------------

struct ScanGeometry {
  EquilibriumRecord eq;
  double lo = 0.0, hi = 0.0;  // bracket confining the target well
  double x_inside = 0.0;      // well minimum
  double h_sign = 1.0;        // +1 center (h -> 0+), -1 saddle (h -> 0-)
  double depth = 0.0;         // level - v(x_inside), saddle only
};

namespace detail {

// Expand from x0 in direction dir until v >= threshold; the walk must be
// monotone, otherwise the requested offsets poke over the confining barrier.
inline double expand_to_level(const Potential1D& v, double x0, double dir, double threshold,
                              double max_span) {
  const double step = max_span / 4096.0;
  double x = x0;
  double v_prev = v(x);
  for (int i = 1; i <= 4096; ++i) {
    x = x0 + dir * step * double(i);
    const double v_cur = v(x);
    if (v_cur >= threshold) return x;
    if (v_cur < v_prev - 1e-15)
      throw domain_error("period_scan: well is not confined at the requested offsets");
    v_prev = v_cur;
  }
  throw domain_error("period_scan: no bounded orbits on the chosen side");
}

} // namespace detail

// Locate the well that hosts the bounded orbits of a classified equilibrium.
// At a saddle, the adjacent well is found by sampling v' on both sides out to
// 5 * rho0 and picking the side with a sign change.
inline ScanGeometry resolve_scan_geometry(const EquilibriumRecord& eq, double h_max) {
  if (eq.stability_class == StabilityClass::degenerate)
    throw degenerate_error("resolve_scan_geometry: degenerate equilibrium");
  const OrbitConstants oc{eq.E2_solved, eq.L2_solved};
  Potential1D v = [oc](double rho) { return v_potential(rho, 0.0, oc); };
  const double level = eq.f_level;

  ScanGeometry geo;
  geo.eq = eq;
  if (eq.stability_class == StabilityClass::center) {
    geo.h_sign = 1.0;
    geo.x_inside = eq.rho0;
    geo.lo = detail::expand_to_level(v, eq.rho0, -1.0, level + 2.0 * h_max, 4.0 * eq.rho0);
    geo.hi = detail::expand_to_level(v, eq.rho0, +1.0, level + 2.0 * h_max, 4.0 * eq.rho0);
    geo.depth = 0.0;
    return geo;
  }

  // saddle: scan v' for a sign change on either side
  geo.h_sign = -1.0;
  const int n_scan = 2048;
  double x_min = quiet_nan;
  for (const double dir : {+1.0, -1.0}) {
    const double span = dir > 0.0 ? 4.0 * eq.rho0 : eq.rho0 - std::max(r_min * 10.0, eq.rho0 / 5.0);
    double x_prev = eq.rho0 + dir * 1e-4 * eq.rho0;
    double d_prev = v_gradient(x_prev, 0.0, oc).d_rho;
    for (int i = 1; i <= n_scan; ++i) {
      const double x = eq.rho0 + dir * (1e-4 * eq.rho0 + span * double(i) / n_scan);
      const double d = v_gradient(x, 0.0, oc).d_rho;
      if ((d_prev < 0.0) != (d < 0.0)) {
        const RootResult root = find_root(
            [&](double r) { return v_gradient(r, 0.0, oc).d_rho; },
            std::min(x_prev, x), std::max(x_prev, x));
        x_min = root.x;
        break;
      }
      x_prev = x;
      d_prev = d;
    }
    if (!std::isnan(x_min)) break;
  }
  if (std::isnan(x_min))
    throw domain_error("period_scan: no adjacent well (no sign change of v' on either side)");

  geo.x_inside = x_min;
  geo.depth = level - v(x_min);
  if (geo.depth <= h_max)
    throw domain_error("period_scan: h range exceeds the well depth");
  const double margin = 1e-9 * std::max(1.0, std::abs(level));
  if (x_min > eq.rho0) {
    geo.lo = eq.rho0;
    geo.hi = detail::expand_to_level(v, x_min, +1.0, level + margin, 8.0 * eq.rho0);
  } else {
    geo.hi = eq.rho0;
    geo.lo = detail::expand_to_level(v, x_min, -1.0, level + margin, eq.rho0);
  }
  return geo;
}

// --------------------------------------------------------------------------
// Period scans and the branching fit
// --------------------------------------------------------------------------

// Samples at |h| = h0 * 10^{-j/per_decade}, largest offset first.
inline std::vector<PeriodSample> period_scan(const Potential1D& v, double level, double rho0,
                                             double lo, double hi, double x_inside,
                                             double h_sign, double h0, int decades,
                                             int per_decade, Convention conv) {
  if (decades < 1 || per_decade < 1)
    throw domain_error("period_scan: decades and per_decade must be >= 1");
  if (h0 <= 0.0) throw domain_error("period_scan: h0 must be positive");
  std::vector<PeriodSample> samples;
  const int n = decades * per_decade;
  samples.reserve(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double mag = h0 * std::pow(10.0, -double(j) / per_decade);
    samples.push_back(period_quadrature(v, level, h_sign * mag, lo, hi, x_inside, rho0, conv));
  }
  return samples;
}

// Chazy-Curzon scan around the equilibrium at rho0 (solved constants).
inline std::vector<PeriodSample> period_scan(double rho0, double h0, int decades,
                                             int per_decade, Convention conv) {
  const EquilibriumRecord eq = equilibrium_solve(rho0);
  const ScanGeometry geo = resolve_scan_geometry(eq, h0);
  const OrbitConstants oc{eq.E2_solved, eq.L2_solved};
  Potential1D v = [oc](double rho) { return v_potential(rho, 0.0, oc); };
  return period_scan(v, eq.f_level, rho0, geo.lo, geo.hi, geo.x_inside, geo.h_sign, h0,
                     decades, per_decade, conv);
}

// Single Chazy-Curzon period sample, mostly a CLI convenience.
inline PeriodSample period_quadrature(double h, const EquilibriumRecord& eq, Convention conv) {
  const ScanGeometry geo = resolve_scan_geometry(eq, std::abs(h));
  const OrbitConstants oc{eq.E2_solved, eq.L2_solved};
  Potential1D v = [oc](double rho) { return v_potential(rho, 0.0, oc); };
  return period_quadrature(v, eq.f_level, h, geo.lo, geo.hi, geo.x_inside, eq.rho0, conv);
}

// Least-squares fit of T against ln(1/|h|). Requires >= 6 samples spanning
// >= 3 decades and a slope that clears its own standard error.
inline LogFit log_fit(std::span<const PeriodSample> samples, Convention conv,
                      double g_reference) {
  if (samples.size() < 6)
    throw insufficient_data_error("log_fit: need >= 6 samples");
  double h_min = std::abs(samples.front().h), h_max = h_min;
  for (const auto& s : samples) {
    h_min = std::min(h_min, std::abs(s.h));
    h_max = std::max(h_max, std::abs(s.h));
  }
  if (!(h_max / h_min >= 0.999e3))
    throw insufficient_data_error("log_fit: samples span fewer than 3 decades of |h|");

  std::vector<double> x, y;
  x.reserve(samples.size());
  y.reserve(samples.size());
  for (const auto& s : samples) {
    x.push_back(std::log(1.0 / std::abs(s.h)));
    y.push_back(s.T);
  }
  const LinearFitResult fit = linear_fit(x, y);
  if (fit.slope <= 4.0 * fit.slope_stderr)
    throw convergence_error("log_fit: slope indistinguishable from 0 (non-divergent data)");

  LogFit out;
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.r_squared = fit.r_squared;
  out.implied_g = fit.slope * (conv == Convention::physical ? std::sqrt(2.0) : 1.0);
  out.g_reference = g_reference;
  return out;
}

} // namespace curzon
