#pragma once
#include <cmath>
#include <limits>
#include <string>

#include "curzon/errors.hpp"

namespace curzon {

// Minimum radius for every field/potential evaluation: psi ~ -1/r diverges below.
inline constexpr double r_min = 1e-8;

// Curvature threshold separating center/saddle from degenerate.
inline constexpr double tol_degenerate = 1e-9;

// Largest exponent handed to std::exp before we call the point singular.
inline constexpr double exp_arg_max = 700.0;

inline constexpr double quiet_nan = std::numeric_limits<double>::quiet_NaN();

inline double sqr(double x) { return x * x; }

// exp with an overflow guard; fields blow up like exp(2/r) near the singularity.
inline double checked_exp(double arg, const char* where) {
  if (arg > exp_arg_max)
    throw singularity_error(std::string(where) + ": exponent overflow approaching the singularity");
  return std::exp(arg);
}

} // namespace curzon
