#pragma once
// Independent numerical oracles used by the test suites: finite differences,
// a cylindrical FD Laplacian, deterministic point sampling, and a polyline
// Hausdorff distance. These stay deliberately independent of the library's
// analytic paths they are checking.

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

using Fn2 = std::function<double(double, double)>;

// central difference gradient, default step 1e-6
inline std::array<double, 2> fd_grad(const Fn2& f, double x, double y, double h = 1e-6) {
  return {(f(x + h, y) - f(x - h, y)) / (2.0 * h),
          (f(x, y + h) - f(x, y - h)) / (2.0 * h)};
}

// 5-point central second derivative, default step 1e-4
inline double fd_second(const std::function<double(double)>& f, double x, double h = 1e-4) {
  return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2 * h)) /
         (12.0 * h * h);
}

// cylindrical Laplacian f_rr + f_r / rho + f_zz by finite differences
inline double fd_cyl_laplacian(const Fn2& f, double rho, double z, double h = 1e-4) {
  const double f_rr = (f(rho + h, z) - 2.0 * f(rho, z) + f(rho - h, z)) / (h * h);
  const double f_zz = (f(rho, z + h) - 2.0 * f(rho, z) + f(rho, z - h)) / (h * h);
  const double f_r = (f(rho + h, z) - f(rho - h, z)) / (2.0 * h);
  return f_rr + f_r / rho + f_zz;
}

inline double rel_err(double got, double want) {
  const double scale = std::max(std::abs(got), std::abs(want));
  return scale > 0.0 ? std::abs(got - want) / scale : 0.0;
}

struct DomainPoint {
  double rho, z;
};

// deterministic sample of the standard test box rho in [lo, hi], |z| <= z_max,
// r >= r_floor
inline std::vector<DomainPoint> sample_domain(std::size_t n, unsigned seed, double lo = 0.3,
                                              double hi = 10.0, double z_max = 5.0,
                                              double r_floor = 0.3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u_rho(lo, hi);
  std::uniform_real_distribution<double> u_z(-z_max, z_max);
  std::vector<DomainPoint> pts;
  pts.reserve(n);
  while (pts.size() < n) {
    DomainPoint p{u_rho(rng), u_z(rng)};
    if (std::hypot(p.rho, p.z) < r_floor) continue;
    pts.push_back(p);
  }
  return pts;
}

// ---------------------------------------------------------------- Hausdorff

using Curve = std::vector<std::array<double, 4>>;

inline double point_segment_dist2(const std::array<double, 4>& p, const std::array<double, 4>& a,
                                  const std::array<double, 4>& b) {
  double ab2 = 0.0, ap_ab = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double d = b[i] - a[i];
    ab2 += d * d;
    ap_ab += (p[i] - a[i]) * d;
  }
  const double t = ab2 > 0.0 ? std::min(1.0, std::max(0.0, ap_ab / ab2)) : 0.0;
  double d2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double d = p[i] - (a[i] + t * (b[i] - a[i]));
    d2 += d * d;
  }
  return d2;
}

inline double directed_hausdorff(const Curve& from, const Curve& to) {
  double worst = 0.0;
  for (const auto& p : from) {
    double best = 1e300;
    for (std::size_t i = 0; i + 1 < to.size(); ++i)
      best = std::min(best, point_segment_dist2(p, to[i], to[i + 1]));
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

inline double hausdorff(const Curve& a, const Curve& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

} // namespace oracles
