#include "tidalflow/webster.hpp"

#include <cmath>

namespace tidalflow {

double degree_of_saturation(double q_veh_s, double lambda, double s_veh_s) {
  if (lambda <= 0.0 || lambda >= 1.0)
    throw Error(ErrorCode::InvalidGreenRatio,
                "green ratio must lie in (0,1), got " + std::to_string(lambda));
  if (s_veh_s <= 0.0)
    throw Error(ErrorCode::ZeroSaturationFlow,
                "saturation flow must be positive");
  return q_veh_s / (lambda * s_veh_s);
}

double webster_delay(std::span<const MovementInput> movements, double cycle_s,
                     const WebsterConfig& cfg) {
  double total_q = 0.0;
  double weighted = 0.0;
  for (const MovementInput& mv : movements) {
    if (mv.q <= 0.0) continue;
    if (mv.x >= 1.0 - cfg.saturation_guard)
      throw Error(ErrorCode::Oversaturated,
                  "degree of saturation " + std::to_string(mv.x));
    const double uniform =
        cfg.variant == WebsterVariant::as_printed
            ? cycle_s * (1.0 + mv.lambda) / (2.0 * (1.0 - mv.lambda * mv.x))
            : cycle_s * (1.0 - mv.lambda) * (1.0 - mv.lambda) /
                  (2.0 * (1.0 - mv.lambda * mv.x));
    const double random = mv.x * mv.x / (2.0 * mv.qstar * (1.0 - mv.x));
    weighted += (uniform + random) * mv.q;
    total_q += mv.q;
  }
  if (total_q <= 0.0)
    throw Error(ErrorCode::NoFlow, "all movements carry zero flow");
  return weighted / total_q;
}

GreenSplitResult green_splits(std::span<const double> flow_ratios,
                              double lost_time_s, const WebsterConfig& cfg) {
  if (lost_time_s <= 0.0)
    throw Error(ErrorCode::NonpositiveLostTime, std::to_string(lost_time_s));
  double total_y = 0.0;
  for (double y : flow_ratios) total_y += y;
  if (total_y >= cfg.x_max)
    throw Error(ErrorCode::InfeasibleDemand,
                "sum of flow ratios " + std::to_string(total_y) +
                    " reaches x_max " + std::to_string(cfg.x_max));
  GreenSplitResult out;
  out.cycle_s = lost_time_s / (1.0 - total_y / cfg.x_max);
  out.greens.reserve(flow_ratios.size());
  for (double y : flow_ratios) {
    out.greens.push_back(out.cycle_s * y / cfg.x_max);
  }
  return out;
}

std::vector<std::string> check_plan_feasibility(const ControlPlan& plan,
                                                const Network& net) {
  std::vector<std::string> issues;
  for (const auto& [node_id, timing] : plan.signal.timings) {
    const Intersection* node = net.find_intersection(node_id);
    if (!node) {
      issues.push_back("plan covers unknown intersection: " + node_id);
      continue;
    }
    if (timing.cycle_s <= 0) {
      issues.push_back("non-positive cycle at " + node_id);
      continue;
    }
    double total = 0.0;
    for (const Phase& phase : node->phases) {
      auto it = timing.greens.find(phase.id);
      if (it == timing.greens.end()) {
        issues.push_back("plan misses green for phase " + node_id + "/" +
                         phase.id);
        continue;
      }
      if (it->second < phase.min_green_s - 1e-9)
        issues.push_back("green below min_green at " + node_id + "/" +
                         phase.id);
      total += it->second;
    }
    const double budget = timing.cycle_s - node->lost_time_s;
    if (std::abs(total - budget) > 1e-9)
      issues.push_back("greens sum to " + std::to_string(total) +
                       " but cycle - lost time is " + std::to_string(budget) +
                       " at " + node_id);
  }
  return issues;
}

}  // namespace tidalflow
