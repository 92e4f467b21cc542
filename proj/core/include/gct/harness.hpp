#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gct/gformula.hpp"
#include "gct/outcome.hpp"
#include "gct/plans.hpp"
#include "gct/scenario.hpp"

namespace gct {

/// Half the L1 distance, with each side's leftover mass as an extra cell.
/// Throws DomainError if the supports differ.
double tv_distance(const OutcomeDist& p, const OutcomeDist& q);

struct VerifyParams {
  std::size_t oracle_n = 200000;
  std::size_t mc_n = 200000;
  int m = 200;
  int n_max = 4;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct VerifyReport {
  std::string scenario_id;
  Plan plan;
  VerifyParams params;
  Tolerances tolerances;

  OutcomeDist oracle_dist;
  OutcomeDist mc_dist;
  QuadratureResult quad;
  std::vector<double> mc_stderr;
  std::vector<double> oracle_stderr;

  double tv_oracle_mc = 0.0;
  double tv_oracle_quad = 0.0;
  double tv_mc_quad = 0.0;
  /// Effective thresholds: max(fixed tolerance, 3 standard errors).
  double limit_oracle_mc = 0.0;
  double limit_mc_quad = 0.0;

  bool nuc_flag = false;
  bool pass = false;
  std::string error;

  double oracle_seconds = 0.0;
  double mc_seconds = 0.0;
  double quad_seconds = 0.0;
};

/// Runs the counterfactual oracle and both formula evaluators and compares
/// them. With no unmeasured confounding every pairwise distance must be
/// within tolerance; otherwise the oracle must sit at least the confounding
/// floor away from the formula. Component failures are recorded in `error`
/// and yield pass = false.
VerifyReport verify(const ScenarioModel& model, const Plan& g, const VerifyParams& params);

nlohmann::json to_json(const VerifyReport& report);
std::string csv_header();
std::string to_csv_row(const VerifyReport& report);

}  // namespace gct
