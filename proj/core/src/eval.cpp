#include "tidalflow/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tidalflow {

std::vector<double> phase_flow_ratios(
    const Network& net, const Intersection& node,
    const std::map<std::string, double>& flows, const LaneAllocation& alloc) {
  const Network scoped = apply_lane_allocation(net, alloc);
  std::vector<double> ys;
  ys.reserve(node.phases.size());
  for (const Phase& phase : node.phases) {
    // Approach links share lane-group capacity; the phase flow ratio is
    // the worst approach it serves.
    double y = 0.0;
    for (const Movement& mv : phase.movements) {
      const Link* link = scoped.find_link(mv.in_link);
      const double s =
          scoped.effective_lanes(mv.in_link) * link->per_lane_saturation_flow;
      auto it = flows.find(mv.in_link);
      const double q = it == flows.end() ? 0.0 : it->second;
      if (s > 0) y = std::max(y, q / s);
    }
    ys.push_back(y);
  }
  return ys;
}

SignalTiming timing_for_node(const Network& net, const Intersection& node,
                             const std::map<std::string, double>& flows,
                             const LaneAllocation& alloc,
                             const WebsterConfig& webster, double c_min,
                             double c_max) {
  const std::vector<double> ys = phase_flow_ratios(net, node, flows, alloc);
  const double total_y = std::accumulate(ys.begin(), ys.end(), 0.0);

  SignalTiming timing;
  if (total_y > 0 && total_y < webster.x_max) {
    GreenSplitResult split = green_splits(ys, node.lost_time_s, webster);
    if (split.cycle_s >= c_min && split.cycle_s <= c_max) {
      bool min_ok = true;
      for (std::size_t i = 0; i < node.phases.size(); ++i) {
        if (split.greens[i] < node.phases[i].min_green_s) min_ok = false;
      }
      if (min_ok) {
        timing.cycle_s = split.cycle_s;
        for (std::size_t i = 0; i < node.phases.size(); ++i) {
          timing.greens[node.phases[i].id] = split.greens[i];
        }
        return timing;
      }
    }
  }
  // Projected fallback: clamp the cycle and hand out the green budget
  // proportionally to flow ratios on top of the minimum greens.
  double cycle = c_max;
  if (total_y > 0 && total_y < webster.x_max) {
    cycle = std::clamp(node.lost_time_s / (1.0 - total_y / webster.x_max),
                       c_min, c_max);
  } else if (total_y <= 0) {
    cycle = c_min;
  }
  double min_sum = 0.0;
  for (const Phase& phase : node.phases) min_sum += phase.min_green_s;
  const double budget = std::max(0.0, cycle - node.lost_time_s - min_sum);
  timing.cycle_s = cycle;
  for (std::size_t i = 0; i < node.phases.size(); ++i) {
    const double share = total_y > 0 ? ys[i] / total_y : 1.0 / ys.size();
    timing.greens[node.phases[i].id] =
        node.phases[i].min_green_s + budget * share;
  }
  return timing;
}

ControlPlan baseline_plan(const Network& net, const DemandProfile& demand,
                          const std::string& period,
                          const WebsterConfig& webster, double c_min,
                          double c_max) {
  ControlPlan plan;
  plan.lanes = balanced_allocation(net);
  const auto flows = link_flows(demand, period);
  for (const Intersection& node : net.intersections()) {
    plan.signal.timings[node.id] = timing_for_node(
        net, node, flows, plan.lanes, webster, c_min, c_max);
  }
  return plan;
}

Indicators analytic_indicators(const Network& net, const ControlPlan& plan,
                               const DemandProfile& demand,
                               const std::string& period,
                               const WebsterConfig& webster,
                               const EmissionFactors& emissions,
                               int* violations) {
  const Network scoped = apply_lane_allocation(net, plan.lanes);
  const auto mv_flows = movement_flows(demand, period);
  int bad = 0;

  double weighted_delay = 0.0;
  double weighted_stops = 0.0;
  double total_q = 0.0;  // veh/s across all served approach groups
  for (const Intersection& node : scoped.intersections()) {
    const SignalTiming& timing = plan.signal.timings.at(node.id);
    for (const Phase& phase : node.phases) {
      const double lambda = timing.greens.at(phase.id) / timing.cycle_s;
      std::map<std::string, double> q_by_approach;
      for (const Movement& mv : phase.movements) {
        auto it = mv_flows.find({mv.in_link, mv.out_link});
        if (it != mv_flows.end()) q_by_approach[mv.in_link] += it->second;
      }
      for (const auto& [in_link, q_veh_h] : q_by_approach) {
        if (q_veh_h <= 0) continue;
        const Link* link = scoped.find_link(in_link);
        const double s_veh_s = scoped.effective_lanes(in_link) *
                               link->per_lane_saturation_flow / 3600.0;
        const double q_veh_s = q_veh_h / 3600.0;
        total_q += q_veh_s;
        if (lambda <= 0 || lambda >= 1 || s_veh_s <= 0 ||
            q_veh_s / (lambda * s_veh_s) >= 1.0 - webster.saturation_guard) {
          ++bad;
          weighted_stops += q_veh_s;  // every vehicle stops at least once
          continue;
        }
        const double x = q_veh_s / (lambda * s_veh_s);
        MovementInput input{q_veh_s, lambda * s_veh_s, lambda, x};
        const double d = webster_delay({&input, 1}, timing.cycle_s, webster);
        const double stop_ratio =
            std::min(1.0, (1.0 - lambda) / (1.0 - lambda * x));
        weighted_delay += d * q_veh_s;
        weighted_stops += stop_ratio * q_veh_s;
      }
    }
  }
  if (violations) *violations = bad;

  const double mean_delay = total_q > 0 ? weighted_delay / total_q : 0.0;
  const double mean_stops = total_q > 0 ? weighted_stops / total_q : 0.0;
  const double hourly_vehicles = total_q * 3600.0;

  Indicators ind;
  ind.avg_delay = mean_delay;
  ind.total_delay = mean_delay * hourly_vehicles;  // veh-s per hour
  ind.stopped_delay = ind.total_delay;  // analytic delay is all stopped time
  ind.stop_frequency = mean_stops;

  SimMetrics proxy;
  proxy.total_delay_s = ind.total_delay;
  proxy.stopped_delay_s = ind.stopped_delay;
  proxy.idle_time_s = ind.stopped_delay;
  proxy.total_stops =
      static_cast<long>(std::lround(mean_stops * hourly_vehicles));
  double vkt = 0.0;
  for (const AccessFlow& access : demand.accesses) {
    auto it = access.flow_by_period.find(period);
    if (it == access.flow_by_period.end() || it->second <= 0) continue;
    double route_km = 0.0;
    for (const std::string& link_id : access.route) {
      route_km += scoped.find_link(link_id)->length_m / 1000.0;
    }
    vkt += it->second * route_km;  // veh-km per hour
  }
  proxy.vkt = vkt;

  const EmissionReport e = estimate_emissions(proxy, emissions);
  ind.co2 = e.co2;
  ind.nox = e.nox;
  ind.voc = e.voc;
  ind.fuel = e.fuel;
  return ind;
}

Indicators simulated_indicators(const Network& net, const ControlPlan& plan,
                                const Schedule& schedule, const SimConfig& cfg,
                                const EmissionFactors& emissions,
                                std::vector<IntervalSample>* samples) {
  Simulator sim(net, plan, schedule, cfg);
  const SimMetrics m = sim.run();
  if (samples) *samples = sim.interval_samples();
  const EmissionReport e = estimate_emissions(m, emissions);
  Indicators ind;
  ind.stopped_delay = m.stopped_delay_s;
  ind.stop_frequency = m.stops_per_vehicle;
  ind.avg_delay = m.avg_delay_s;
  ind.total_delay = m.total_delay_s;
  ind.co2 = e.co2;
  ind.nox = e.nox;
  ind.voc = e.voc;
  ind.fuel = e.fuel;
  return ind;
}

IndicatorTable interval_indicator_table(
    const std::vector<IntervalSample>& samples, const EmissionFactors& f) {
  IndicatorTable table;
  table.directions.assign(8, Direction::cost);
  for (const IntervalSample& s : samples) {
    SimMetrics m;
    m.total_delay_s = s.delay_s;
    m.stopped_delay_s = s.stopped_delay_s;
    m.idle_time_s = s.stopped_delay_s;
    m.vkt = s.vkt;
    m.total_stops = s.stops;
    const long dep = std::max(1L, s.departures);
    const EmissionReport e = estimate_emissions(m, f);
    table.rows.push_back({s.stopped_delay_s,
                          static_cast<double>(s.stops) / dep, s.delay_s / dep,
                          s.delay_s, e.co2, e.nox, e.voc, e.fuel});
  }
  return table;
}

PlanScore evaluate_plan(const ControlPlan& plan, const EvalContext& ctx) {
  PlanScore score;
  if (ctx.evaluator == EvaluatorKind::webster_analytic) {
    score.indicators = analytic_indicators(*ctx.net, plan, *ctx.demand,
                                           ctx.period, ctx.webster,
                                           ctx.emissions,
                                           &score.oversaturated_movements);
  } else {
    score.indicators = simulated_indicators(*ctx.net, plan, ctx.schedule,
                                            ctx.sim, ctx.emissions, nullptr);
  }
  score.breakdown = performance_breakdown(score.indicators, ctx.primary,
                                          ctx.sub_f, ctx.sub_n, ctx.scaler);
  score.fitness = score.breakdown.pi +
                  ctx.oversaturation_penalty * score.oversaturated_movements;
  return score;
}

}  // namespace tidalflow
