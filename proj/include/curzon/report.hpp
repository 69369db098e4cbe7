#pragma once
#include <string>
#include <vector>

#include <json.hpp>

#include "curzon/csv.hpp"
#include "curzon/papercheck.hpp"

// Serialization of the audit report: JSON for the full record, CSV for a flat
// summary. Field order is fixed so identical runs produce identical bytes.

namespace curzon {

inline nlohmann::ordered_json report_json(const std::vector<CheckResult>& checks,
                                          const CheckConfig& cfg) {
  nlohmann::ordered_json j;
  j["version"] = config_version;
  j["seed"] = cfg.seed;
  j["config"] = {
      {"n_samples", cfg.n_samples},
      {"identity_tol", cfg.identity_tol},
      {"exact_tol", cfg.exact_tol},
      {"slope_tol", cfg.slope_tol},
      {"rho_scan_min", cfg.rho_scan_min},
      {"rho_scan_max", cfg.rho_scan_max},
      {"rho_scan_n", cfg.rho_scan_n},
      {"c7_rho0", cfg.c7_rho0},
      {"c7_h0", cfg.c7_h0},
      {"c7_decades", cfg.c7_decades},
      {"c7_per_decade", cfg.c7_per_decade},
      {"gamma_mode", cfg.gamma_mode == GammaMode::paper ? "paper" : "standard"},
  };
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const CheckResult& c : checks) {
    nlohmann::ordered_json jc;
    jc["id"] = c.id;
    jc["description"] = c.description;
    jc["status"] = detail::status_name(c.status);
    jc["max_abs_discrepancy"] = c.max_abs_discrepancy;
    jc["sample_count"] = c.sample_count;
    jc["details"] = c.details;
    arr.push_back(std::move(jc));
  }
  j["checks"] = std::move(arr);
  return j;
}

inline std::string report_csv_text(const std::vector<CheckResult>& checks) {
  std::string out = "id,status,max_abs_discrepancy,sample_count,description\n";
  for (const CheckResult& c : checks) {
    out += c.id;
    out += ',';
    out += detail::status_name(c.status);
    out += ',';
    out += fmt_g17(c.max_abs_discrepancy);
    out += ',';
    out += std::to_string(c.sample_count);
    out += ',';
    out += '"' + c.description + '"';
    out += '\n';
  }
  return out;
}

} // namespace curzon
