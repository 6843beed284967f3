#pragma once

#include <string>

#include "tidalflow/demand.hpp"
#include "tidalflow/mcdm.hpp"
#include "tidalflow/mesosim.hpp"
#include "tidalflow/network.hpp"
#include "tidalflow/webster.hpp"

namespace tidalflow {

enum class EvaluatorKind { webster_analytic, mesosim };

/// Everything needed to score a ControlPlan. Immutable while in use; safe
/// to share across concurrent fitness evaluations.
struct EvalContext {
  const Network* net = nullptr;
  const DemandProfile* demand = nullptr;
  std::string period;
  EvaluatorKind evaluator = EvaluatorKind::webster_analytic;

  WeightVector primary;  // (gamma_f, gamma_n)
  WeightVector sub_f;
  WeightVector sub_n;
  Scaler scaler;

  SimConfig sim;
  Schedule schedule;  // used by the mesosim evaluator
  EmissionFactors emissions;
  WebsterConfig webster;
  double oversaturation_penalty = 1000.0;
  int threads = 0;  // 0 = sequential
};

struct PlanScore {
  Indicators indicators;
  PiBreakdown breakdown;
  int oversaturated_movements = 0;
  double fitness = 0.0;  // PI + penalty * violations
};

/// Analytic indicators from the printed delay formula plus a stop/idle
/// proxy; violations counts oversaturated approach groups.
Indicators analytic_indicators(const Network& net, const ControlPlan& plan,
                               const DemandProfile& demand,
                               const std::string& period,
                               const WebsterConfig& webster,
                               const EmissionFactors& emissions,
                               int* violations);

Indicators simulated_indicators(const Network& net, const ControlPlan& plan,
                                const Schedule& schedule, const SimConfig& cfg,
                                const EmissionFactors& emissions,
                                std::vector<IntervalSample>* samples = nullptr);

PlanScore evaluate_plan(const ControlPlan& plan, const EvalContext& ctx);

/// Indicator table built from per-interval simulator samples, for EWM.
IndicatorTable interval_indicator_table(
    const std::vector<IntervalSample>& samples, const EmissionFactors& f);

/// Balanced lanes + cycle/greens from the flow-ratio solver on each
/// intersection's period flows, with the cycle clamped to [c_min, c_max]
/// and greens rescaled to keep sum(t_i) = C - L.
ControlPlan baseline_plan(const Network& net, const DemandProfile& demand,
                          const std::string& period,
                          const WebsterConfig& webster, double c_min,
                          double c_max);

/// Cycle and greens for one intersection from its flow ratios: exact
/// solver output when it fits the bounds and minimum greens, otherwise a
/// clamped proportional projection.
SignalTiming timing_for_node(const Network& net, const Intersection& node,
                             const std::map<std::string, double>& flows,
                             const LaneAllocation& alloc,
                             const WebsterConfig& webster, double c_min,
                             double c_max);

/// Flow ratio y per phase of one intersection under an allocation.
std::vector<double> phase_flow_ratios(const Network& net,
                                      const Intersection& node,
                                      const std::map<std::string, double>& flows,
                                      const LaneAllocation& alloc);

}  // namespace tidalflow
