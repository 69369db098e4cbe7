#pragma once
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "curzon/dynamics.hpp"
#include "curzon/errors.hpp"
#include "curzon/integrate.hpp"
#include "curzon/metric.hpp"

// Plain-text key=value run configuration. Strict parsing: unknown keys are
// rejected, a version key is required, numeric settings are range-checked.
// Command-line flags override file values.

namespace curzon {

inline constexpr const char* config_version = "1";

struct RunConfig {
  std::string version = config_version;
  double m = 1.0;
  GammaMode gamma_mode = GammaMode::standard;
  SignMode sign_mode = SignMode::standard_minus;
  FieldMode field_mode = FieldMode::gradient;
  H2Mode h2_mode = H2Mode::canonical;
  Method method = Method::leapfrog;
  double dt = 1e-3;
  double rtol = 1e-10;
  double escape_rho_max = 1e3;
  double escape_z_max = 1e3;
  std::uint64_t seed = 1;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': not a number: '" + value + "'");
  }
  if (pos != value.size())
    throw config_error("config key '" + key + "': trailing characters in '" + value + "'");
  return out;
}

inline void check_range(const std::string& key, double v, double lo, double hi) {
  if (!(v >= lo && v <= hi))
    throw config_error("config key '" + key + "': value out of range [" +
                       std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

} // namespace detail

inline void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "version") {
    if (value != config_version)
      throw config_error("config key 'version': unsupported value '" + value + "'");
    cfg.version = value;
  } else if (key == "m") {
    const double v = detail::parse_double(key, value);
    if (v <= 0.0) throw config_error("config key 'm': must be positive");
    cfg.m = v;
  } else if (key == "gamma_mode") {
    if (value == "paper") cfg.gamma_mode = GammaMode::paper;
    else if (value == "standard") cfg.gamma_mode = GammaMode::standard;
    else throw config_error("config key 'gamma_mode': expected paper|standard");
  } else if (key == "sign_mode") {
    if (value == "paper_plus") cfg.sign_mode = SignMode::paper_plus;
    else if (value == "standard_minus") cfg.sign_mode = SignMode::standard_minus;
    else throw config_error("config key 'sign_mode': expected paper_plus|standard_minus");
  } else if (key == "field_mode") {
    if (value == "gradient") cfg.field_mode = FieldMode::gradient;
    else if (value == "printed") cfg.field_mode = FieldMode::printed;
    else throw config_error("config key 'field_mode': expected gradient|printed");
  } else if (key == "h2_mode") {
    if (value == "printed") cfg.h2_mode = H2Mode::printed;
    else if (value == "canonical") cfg.h2_mode = H2Mode::canonical;
    else throw config_error("config key 'h2_mode': expected printed|canonical");
  } else if (key == "method") {
    if (value == "leapfrog") cfg.method = Method::leapfrog;
    else if (value == "adaptive_rk") cfg.method = Method::adaptive_rk;
    else throw config_error("config key 'method': expected leapfrog|adaptive_rk");
  } else if (key == "dt") {
    const double v = detail::parse_double(key, value);
    detail::check_range(key, v, 1e-12, 1.0);
    cfg.dt = v;
  } else if (key == "rtol") {
    const double v = detail::parse_double(key, value);
    detail::check_range(key, v, 1e-14, 1e-2);
    cfg.rtol = v;
  } else if (key == "escape_rho_max") {
    const double v = detail::parse_double(key, value);
    if (v <= 0.0) throw config_error("config key 'escape_rho_max': must be positive");
    cfg.escape_rho_max = v;
  } else if (key == "escape_z_max") {
    const double v = detail::parse_double(key, value);
    if (v <= 0.0) throw config_error("config key 'escape_z_max': must be positive");
    cfg.escape_z_max = v;
  } else if (key == "seed") {
    try {
      cfg.seed = std::stoull(value);
    } catch (const std::exception&) {
      throw config_error("config key 'seed': not an unsigned integer: '" + value + "'");
    }
  } else {
    throw config_error("config: unknown key '" + key + "'");
  }
}

inline RunConfig load_config(std::istream& in) {
  RunConfig cfg;
  bool saw_version = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (key == "version") saw_version = true;
    apply_config_value(cfg, key, value);
  }
  if (!saw_version) throw config_error("config: missing required key 'version'");
  return cfg;
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open file '" + path + "'");
  return load_config(in);
}

} // namespace curzon
