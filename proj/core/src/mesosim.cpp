#include "tidalflow/mesosim.hpp"

#include <cmath>

#include "tidalflow/webster.hpp"

namespace tidalflow {

EmissionReport estimate_emissions(const SimMetrics& m,
                                  const EmissionFactors& f) {
  auto one = [&](const EmissionFactors::Pollutant& p) {
    return p.per_km * m.vkt + p.per_idle_s * m.idle_time_s +
           p.per_stop * m.total_stops;
  };
  EmissionReport out;
  out.co2 = one(f.co2);
  out.nox = one(f.nox);
  out.voc = one(f.voc);
  out.fuel = one(f.fuel);
  return out;
}

Simulator::Simulator(const Network& net, const ControlPlan& plan,
                     const Schedule& schedule, const SimConfig& cfg)
    : plan_(plan), schedule_(schedule), cfg_(cfg) {
  auto issues = check_plan_feasibility(plan, net);
  for (const Intersection& node : net.intersections()) {
    if (!plan.signal.timings.count(node.id))
      issues.push_back("plan misses intersection " + node.id);
  }
  if (!issues.empty())
    throw Error(ErrorCode::InfeasiblePlan, issues.front());
  if (schedule.network_version != net.version())
    throw Error(ErrorCode::InfeasiblePlan,
                "schedule was built for a different network version");
  if (cfg.dt_s <= 0 || cfg.warmup_s >= cfg.horizon_s)
    throw Error(ErrorCode::InfeasiblePlan, "bad simulation config");

  net_ = apply_lane_allocation(net, plan.lanes);
  routes_ = schedule.routes;
  for (const Link& link : net_.links()) {
    LinkState state;
    state.capacity_veh_per_s =
        net_.effective_lanes(link.id) * link.per_lane_saturation_flow / 3600.0;
    state.free_flow_s = link.free_flow_time_s();
    state.length_km = link.length_m / 1000.0;
    links_[link.id] = state;
    link_order_.push_back(link.id);
  }
  total_steps_ = static_cast<int>(std::ceil(cfg.horizon_s / cfg.dt_s));
  warmup_steps_ = static_cast<int>(std::ceil(cfg.warmup_s / cfg.dt_s));
  interval_steps_ =
      std::max(1, static_cast<int>(std::lround(cfg.interval_s / cfg.dt_s)));
}

bool Simulator::movement_green(const std::string& in_link,
                               const std::string& out_link) const {
  const Link* link = net_.find_link(in_link);
  const Intersection* node = net_.find_intersection(link->to_node);
  if (!node) return true;  // unsignalized downstream end
  const Phase* serving = net_.serving_phase(in_link, out_link);
  if (!serving) return true;
  const SignalTiming& timing = plan_.signal.timings.at(node->id);
  const double cycle = timing.cycle_s;
  double local = std::fmod(clock_s() - timing.offset_s, cycle);
  if (local < 0) local += cycle;
  // Phases run in declared order; lost time is spread evenly after each.
  const double slack = node->lost_time_s / node->phases.size();
  double cursor = 0.0;
  for (const Phase& phase : node->phases) {
    const double green = timing.greens.at(phase.id);
    if (local >= cursor && local < cursor + green) return &phase == serving;
    cursor += green + slack;
  }
  return false;  // inside lost time
}

void Simulator::enter_link(Vehicle v, const std::string& link_id) {
  LinkState& state = links_.at(link_id);
  v.ready_s = clock_s() + state.free_flow_s;
  v.stopped = false;
  if (step_ >= warmup_steps_) {
    metrics_.vkt += state.length_km;
    current_interval_.vkt += state.length_km;
  }
  state.queue.push_back(std::move(v));
}

void Simulator::depart(Vehicle& v) {
  ++departed_;
  if (step_ >= warmup_steps_) {
    ++metrics_.departures;
    ++current_interval_.departures;
  }
}

void Simulator::flush_interval() {
  intervals_.push_back(current_interval_);
  current_interval_ = IntervalSample{};
  steps_into_interval_ = 0;
}

void Simulator::step() {
  const double now = clock_s();
  const bool counting = step_ >= warmup_steps_;

  // 1. Discharge queues, front first, gated by signal and saturation flow.
  for (const std::string& link_id : link_order_) {
    LinkState& state = links_.at(link_id);
    const Link* link = net_.find_link(link_id);
    bool accumulated = false;
    while (!state.queue.empty()) {
      Vehicle& front = state.queue.front();
      if (front.ready_s > now + 1e-9) break;
      const std::vector<std::string>& route = routes_.at(front.access);
      const bool last = front.route_pos + 1 >= route.size();
      if (!last && net_.has_intersection(link->to_node) &&
          !movement_green(link_id, route[front.route_pos + 1])) {
        break;
      }
      if (!accumulated) {
        state.discharge_backlog += state.capacity_veh_per_s * cfg_.dt_s;
        accumulated = true;
      }
      if (state.discharge_backlog < 1.0 - 1e-9) break;
      state.discharge_backlog -= 1.0;
      Vehicle v = std::move(state.queue.front());
      state.queue.pop_front();
      if (last) {
        depart(v);
      } else {
        ++v.route_pos;
        enter_link(std::move(v), route[v.route_pos]);
      }
    }
    if (state.queue.empty()) state.discharge_backlog = 0.0;
  }

  // 2. Accrue delay: a vehicle past its free-flow exit time is waiting at
  //    speed 0, which is below the stop threshold.
  for (const std::string& link_id : link_order_) {
    for (Vehicle& v : links_.at(link_id).queue) {
      if (v.ready_s > now + 1e-9) continue;
      v.delay_s += cfg_.dt_s;
      v.stopped_delay_s += cfg_.dt_s;
      if (counting) {
        metrics_.total_delay_s += cfg_.dt_s;
        metrics_.stopped_delay_s += cfg_.dt_s;
        metrics_.idle_time_s += cfg_.dt_s;
        current_interval_.delay_s += cfg_.dt_s;
        current_interval_.stopped_delay_s += cfg_.dt_s;
      }
      if (!v.stopped) {
        v.stopped = true;
        ++v.stops;
        if (counting) {
          ++metrics_.total_stops;
          ++current_interval_.stops;
        }
      }
    }
  }

  // 3. Inject scheduled arrivals.
  if (step_ < schedule_.steps()) {
    for (std::size_t a = 0; a < schedule_.access_ids.size(); ++a) {
      const int count = schedule_.counts[a][step_];
      if (count <= 0) continue;
      const int access_id = schedule_.access_ids[a];
      auto it = routes_.find(access_id);
      if (it == routes_.end()) continue;
      for (int k = 0; k < count; ++k) {
        Vehicle v;
        v.access = access_id;
        v.route_pos = 0;
        v.counted = counting;
        ++injected_;
        if (counting) ++metrics_.arrivals;
        enter_link(std::move(v), it->second.front());
      }
    }
  }

  ++step_;
  if (step_ > warmup_steps_) {
    if (++steps_into_interval_ >= interval_steps_) flush_interval();
  }
}

SimMetrics Simulator::metrics() const {
  SimMetrics out = metrics_;
  if (out.departures > 0) {
    out.avg_delay_s = out.total_delay_s / out.departures;
    out.stops_per_vehicle =
        static_cast<double>(out.total_stops) / out.departures;
  }
  return out;
}

SimMetrics Simulator::run() {
  while (!done()) step();
  if (steps_into_interval_ > 0) flush_interval();
  return metrics();
}

long Simulator::queued_vehicles() const {
  long total = 0;
  for (const auto& [id, state] : links_) {
    total += static_cast<long>(state.queue.size());
  }
  return total;
}

SimMetrics run_simulation(const Network& net, const ControlPlan& plan,
                          const Schedule& schedule, const SimConfig& cfg) {
  Simulator sim(net, plan, schedule, cfg);
  return sim.run();
}

}  // namespace tidalflow
