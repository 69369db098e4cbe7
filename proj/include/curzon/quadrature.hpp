#pragma once
#include <cmath>
#include <map>
#include <vector>

#include "curzon/errors.hpp"

namespace curzon {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;
};

namespace detail {

// Nodes by Newton iteration on P_n; standard trick, accurate to ~1e-15.
inline GaussLegendreRule build_gl_rule(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

} // namespace detail

// Immutable ladder of rules, built once on first use.
inline const std::map<int, GaussLegendreRule>& gl_rules() {
  static const std::map<int, GaussLegendreRule> table = [] {
    std::map<int, GaussLegendreRule> t;
    for (int n = 16; n <= 8192; n *= 2) t.emplace(n, detail::build_gl_rule(n));
    return t;
  }();
  return table;
}

inline constexpr int gl_max_nodes = 8192;

template <class F>
double integrate_gl(F&& f, double a, double b, int n) {
  const auto it = gl_rules().find(n);
  if (it == gl_rules().end()) throw convergence_error("integrate_gl: unsupported node count");
  const auto& rule = it->second;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return acc * half;
}

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int nodes_used = 0;
};

// Node-doubling driver: stop when successive refinements agree to rel_tol.
// Hitting the node cap is not an error; the last delta is the error estimate.
template <class F>
QuadResult integrate_adaptive_gl(F&& f, double a, double b, double rel_tol = 1e-9) {
  double prev = integrate_gl(f, a, b, 16);
  double err = std::abs(prev);
  for (int n = 32; n <= gl_max_nodes; n *= 2) {
    const double cur = integrate_gl(f, a, b, n);
    err = std::abs(cur - prev);
    prev = cur;
    if (err <= rel_tol * std::max(1.0, std::abs(cur)))
      return {cur, err, n};
  }
  return {prev, err, gl_max_nodes};
}

} // namespace curzon
