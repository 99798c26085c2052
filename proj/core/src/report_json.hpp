#pragma once

// Internal JSON conversions shared by the library sources; not installed.

#include "json.hpp"
#include "sparsegd/theory.hpp"

namespace sparsegd::detail {

// Iteration counts can overflow doubles' useful range; the reporting rule is
// +infinity beyond 2^63 - 1, encoded as the string "inf" since JSON has no
// infinity literal.
inline nlohmann::json json_number(double value) {
  const double reported = theory::reported_iterations(value);
  if (std::isinf(reported)) return "inf";
  return reported;
}

inline nlohmann::json theory_report_json(const theory::TheoryReport& report) {
  nlohmann::json j;
  j["inputs"] = {{"w_max", report.inputs.w_max}, {"w_min", report.inputs.w_min},
                 {"epsilon", report.inputs.epsilon}, {"N", report.inputs.depth},
                 {"p", report.inputs.p}, {"k", report.inputs.k},
                 {"noise_linf", report.inputs.noise_linf}, {"alpha", report.inputs.alpha},
                 {"eta", report.inputs.eta}};
  j["phi"] = report.phi ? nlohmann::json(*report.phi) : nlohmann::json(nullptr);
  j["psi"] = report.psi ? nlohmann::json(*report.psi) : nlohmann::json(nullptr);
  j["zeta"] = report.zeta;
  j["alpha_max"] = report.alpha_max.value;
  j["alpha_max_includes_depth_terms"] = report.alpha_max.depth_terms_applicable;
  j["eta_max"] = report.eta_max;
  if (report.window) {
    j["T_l"] = json_number(report.window->t_lower);
    j["T_u"] = json_number(report.window->t_upper);
    j["feasible"] = report.window->feasible;
    j["indicator_A"] = report.window->indicator_a;
  } else {
    j["T_l"] = nullptr;
    j["T_u"] = nullptr;
    j["feasible"] = nullptr;
    j["indicator_A"] = nullptr;
  }
  j["predicted_off_support"] = report.predicted_off_support;
  return j;
}

}  // namespace sparsegd::detail
