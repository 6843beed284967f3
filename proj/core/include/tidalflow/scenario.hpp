#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tidalflow/dao.hpp"
#include "tidalflow/eval.hpp"
#include "tidalflow/ga.hpp"
#include "tidalflow/mcdm.hpp"

namespace tidalflow {

/// One self-contained experiment description: network, demand, objective
/// weighting, simulator, optimizer, and consensus settings.
struct Scenario {
  int format = 1;
  std::string name;
  Network network;
  DemandProfile demand;

  ImportanceMatrix primary_matrix;
  double cr_threshold = 0.1;
  std::optional<std::vector<double>> sub_weights_f;  // overrides entropy
  std::optional<std::vector<double>> sub_weights_n;

  SimConfig sim;
  InjectionMode injection_mode = InjectionMode::uniform;
  EmissionFactors emissions;
  WebsterConfig webster;
  GAConfig ga;
  EvaluatorKind ga_evaluator = EvaluatorKind::mesosim;
  double oversaturation_penalty = 1000.0;
  DaoConfig dao;
  EvaluatorKind dao_evaluator = EvaluatorKind::webster_analytic;
  int dao_rounds = 20;
};

/// Throws Error(ParseError) on malformed input.
Scenario load_scenario(const std::string& path);

/// Collects every section's validation issues; empty means clean.
std::vector<std::string> validate_scenario(const Scenario& scenario);

/// Assembles weights (AHP primary; entropy or explicit sub-weights), the
/// baseline-referenced scaler, and the injection schedule for one period.
/// Runs the baseline plan once under the chosen evaluator.
EvalContext build_context(const Scenario& scenario, const std::string& period,
                          EvaluatorKind evaluator);

/// Baseline plan for a period per the scenario's solver settings.
ControlPlan scenario_baseline(const Scenario& scenario,
                              const std::string& period);

/// Reads TIDALFLOW_THREADS; 0 or unset means sequential.
int configured_threads();

std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& plan_name,
                            const std::string& period, const Indicators& ind,
                            const PiBreakdown& pb);

}  // namespace tidalflow
