#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "tidalflow/demand.hpp"
#include "tidalflow/network.hpp"

namespace tidalflow {

struct SimConfig {
  double dt_s = 1.0;
  double horizon_s = 7200.0;
  double warmup_s = 300.0;
  double stop_speed_threshold_kmh = 5.0;
  double interval_s = 300.0;  // indicator sampling window for entropy weights
  std::uint64_t seed = 0;
};

struct SimMetrics {
  double total_delay_s = 0.0;    // D, veh-s
  double stopped_delay_s = 0.0;  // D_s, veh-s
  double avg_delay_s = 0.0;      // D_a, s per departed vehicle
  double stops_per_vehicle = 0.0;  // C_s
  double vkt = 0.0;              // vehicle-kilometers traveled
  double idle_time_s = 0.0;      // veh-s at stop
  long arrivals = 0;
  long departures = 0;
  long total_stops = 0;
};

struct EmissionFactors {
  struct Pollutant {
    double per_km = 0.0;
    double per_idle_s = 0.0;
    double per_stop = 0.0;
  };
  Pollutant co2, nox, voc, fuel;
};

struct EmissionReport {
  double co2 = 0.0;
  double nox = 0.0;
  double voc = 0.0;
  double fuel = 0.0;
};

/// Linear surrogate: E_p = per_km * vkt + per_idle_s * idle + per_stop * stops.
EmissionReport estimate_emissions(const SimMetrics& m,
                                  const EmissionFactors& f);

/// Raw per-interval accumulators, rows of the entropy-weight table.
struct IntervalSample {
  double delay_s = 0.0;
  double stopped_delay_s = 0.0;
  double vkt = 0.0;
  long stops = 0;
  long departures = 0;
};

/// Store-and-forward point-queue simulator. Vehicles traverse links at
/// free-flow time, then wait in a FIFO queue at the downstream end;
/// signalized approaches discharge only on green, up to saturation flow.
class Simulator {
 public:
  /// Throws InfeasiblePlan when the plan fails feasibility checks or the
  /// schedule was built for a different network version.
  Simulator(const Network& net, const ControlPlan& plan,
            const Schedule& schedule, const SimConfig& cfg);

  void step();
  bool done() const { return step_ >= total_steps_; }
  double clock_s() const { return step_ * cfg_.dt_s; }

  /// Runs to the horizon and returns metrics over the post-warmup window.
  SimMetrics run();
  SimMetrics metrics() const;

  // Whole-run conservation counters (not warmup-windowed).
  long injected() const { return injected_; }
  long departed() const { return departed_; }
  long in_network() const { return injected_ - departed_; }
  /// Direct count of vehicles sitting on links, for conservation checks.
  long queued_vehicles() const;

  const std::vector<IntervalSample>& interval_samples() const {
    return intervals_;
  }

 private:
  struct Vehicle {
    int access = 0;
    std::size_t route_pos = 0;
    double ready_s = 0.0;  // earliest exit from current link
    double delay_s = 0.0;
    double stopped_delay_s = 0.0;
    double distance_km = 0.0;
    int stops = 0;
    bool stopped = false;
    bool counted = false;  // injected after warmup
  };

  struct LinkState {
    std::deque<Vehicle> queue;
    double discharge_backlog = 0.0;  // fractional vehicles ready to go
    double capacity_veh_per_s = 0.0;
    double free_flow_s = 0.0;
    double length_km = 0.0;
  };

  bool movement_green(const std::string& in_link,
                      const std::string& out_link) const;
  void enter_link(Vehicle v, const std::string& link_id);
  void depart(Vehicle& v);
  void flush_interval();

  Network net_;  // with the plan's allocation applied
  ControlPlan plan_;
  Schedule schedule_;
  SimConfig cfg_;
  int step_ = 0;
  int total_steps_ = 0;
  int warmup_steps_ = 0;

  std::vector<std::string> link_order_;
  std::map<std::string, LinkState> links_;
  std::map<int, std::vector<std::string>> routes_;

  long injected_ = 0;
  long departed_ = 0;
  SimMetrics metrics_;
  IntervalSample current_interval_;
  std::vector<IntervalSample> intervals_;
  int interval_steps_ = 0;
  int steps_into_interval_ = 0;
};

SimMetrics run_simulation(const Network& net, const ControlPlan& plan,
                          const Schedule& schedule, const SimConfig& cfg);

}  // namespace tidalflow
