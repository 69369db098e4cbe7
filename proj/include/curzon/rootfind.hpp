#pragma once
#include <cmath>
#include <limits>
#include <utility>

#include "curzon/errors.hpp"

namespace curzon {

struct RootResult {
  double x = 0.0;
  double f_at_x = 0.0;
  int iters = 0;
};

// Bracketed root solve: bisection with a secant proposal whenever the secant
// step stays inside the current bracket. Converges to machine precision in x.
template <class F>
RootResult find_root(F&& f, double a, double b, int max_iter = 200) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return {a, 0.0, 0};
  if (fb == 0.0) return {b, 0.0, 0};
  if ((fa > 0.0) == (fb > 0.0))
    throw bracket_error("find_root: interval does not bracket a sign change");

  double x_prev = a, f_prev = fa;
  double x_curr = b, f_curr = fb;
  int it = 0;
  for (; it < max_iter; ++it) {
    double cand;
    const double denom = f_curr - f_prev;
    if (denom != 0.0) {
      cand = x_curr - f_curr * (x_curr - x_prev) / denom;
      if (!(cand > std::min(a, b) && cand < std::max(a, b))) cand = 0.5 * (a + b);
    } else {
      cand = 0.5 * (a + b);
    }
    // never accept a candidate that fails to shrink the bracket meaningfully
    const double width = std::abs(b - a);
    if (std::abs(cand - a) < 0.01 * width || std::abs(cand - b) < 0.01 * width)
      cand = 0.5 * (a + b);

    const double fc = f(cand);
    if (fc == 0.0) return {cand, 0.0, it + 1};
    if ((fc > 0.0) == (fa > 0.0)) {
      a = cand;
      fa = fc;
    } else {
      b = cand;
      fb = fc;
    }
    x_prev = x_curr;
    f_prev = f_curr;
    x_curr = cand;
    f_curr = fc;

    const double tol = 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::max(std::abs(a), std::abs(b)));
    if (std::abs(b - a) <= tol) break;
  }
  const double x = 0.5 * (a + b);
  return {x, f(x), it};
}

// Golden-section minimum of a unimodal function on [a, b].
template <class F>
double find_minimum(F&& f, double a, double b, int max_iter = 200) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
    const double tol = 1e-14 * std::max(1.0, std::abs(a) + std::abs(b));
    if (std::abs(b - a) <= tol) break;
  }
  return 0.5 * (a + b);
}

} // namespace curzon
