#pragma once
#include <stdexcept>
#include <string>

namespace curzon {

// Base for all numerical and domain failures. The CLI maps these to exit code 2.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct domain_error : error { using error::error; };        // point outside the evaluation domain
struct singularity_error : error { using error::error; };   // approached rho^2+z^2 -> 0 (or exp overflow)
struct escape_error : error { using error::error; };        // trajectory left the configured bounds
struct step_error : error { using error::error; };          // adaptive step size underflow
struct bracket_error : error { using error::error; };       // root not bracketed, or bad bracket shape
struct convergence_error : error { using error::error; };   // iteration failed to converge
struct degenerate_error : error { using error::error; };    // singular linear system / degenerate geometry
struct insufficient_data_error : error { using error::error; };

// Configuration and argument problems. The CLI maps these to exit code 1.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace curzon
