#pragma once

#include <span>
#include <string>
#include <vector>

#include "tidalflow/network.hpp"

namespace tidalflow {

enum class WebsterVariant { as_printed, classical };

struct WebsterConfig {
  WebsterVariant variant = WebsterVariant::as_printed;
  double x_max = 0.9;              // target maximum saturation
  double saturation_guard = 1e-6;  // epsilon below 1 that still counts
};

/// One lane group at a signal: flow q and discharge capacity q* in veh/s,
/// green ratio lambda = t_i / C, degree of saturation x = q / (lambda s).
struct MovementInput {
  double q = 0.0;
  double qstar = 0.0;
  double lambda = 0.0;
  double x = 0.0;
};

/// x = q / (lambda * s). Throws InvalidGreenRatio / ZeroSaturationFlow.
double degree_of_saturation(double q_veh_s, double lambda, double s_veh_s);

/// Flow-weighted mean delay (seconds/vehicle) over movements.
/// Throws Oversaturated when any x >= 1 - guard, NoFlow when total q = 0.
double webster_delay(std::span<const MovementInput> movements, double cycle_s,
                     const WebsterConfig& cfg = {});

struct GreenSplitResult {
  double cycle_s = 0.0;
  std::vector<double> greens;  // per phase, same order as input
};

/// Cycle and greens satisfying sum(t_i) = C - L and t_i = C y_i / x_max
/// simultaneously, which forces C = L / (1 - Y / x_max).
/// Throws InfeasibleDemand when Y >= x_max, NonpositiveLostTime when L <= 0.
GreenSplitResult green_splits(std::span<const double> flow_ratios,
                              double lost_time_s,
                              const WebsterConfig& cfg = {});

/// Checks sum(t_i) = C - L (to 1e-9 s) and t_i >= min_green for every
/// intersection the plan covers. Reports, never throws.
std::vector<std::string> check_plan_feasibility(const ControlPlan& plan,
                                                const Network& net);

}  // namespace tidalflow
