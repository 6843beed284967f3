#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tidalflow/network.hpp"

namespace tidalflow {

struct Period {
  std::string name;
  double start_s = 0.0;
  double end_s = 0.0;
};

struct AccessFlow {
  int id = 0;
  std::string entry_node;
  std::vector<std::string> route;  // ordered link ids, access to sink
  std::map<std::string, double> flow_by_period;  // period name -> veh/h
};

struct DemandProfile {
  std::vector<Period> periods;
  std::vector<AccessFlow> accesses;

  const Period* find_period(const std::string& name) const;
  const AccessFlow* find_access(int id) const;
};

std::vector<std::string> validate_demand(const DemandProfile& profile,
                                         const Network& net);

/// Piecewise-constant flow lookup; 0 outside all periods.
double flow_at(const DemandProfile& profile, int access, double t_s);

/// max(peak flows) / min(peak flows) across periods for one access.
double tidal_ratio(const DemandProfile& profile, int access);

enum class InjectionMode { uniform, poisson };

/// Per-access integer arrival counts for one period, one entry per step.
struct Schedule {
  std::string period;
  double dt_s = 1.0;
  std::uint64_t network_version = 0;
  std::vector<int> access_ids;
  std::vector<std::vector<int>> counts;  // [access][step]
  std::map<int, std::vector<std::string>> routes;  // access id -> link ids

  int steps() const {
    return counts.empty() ? 0 : static_cast<int>(counts.front().size());
  }
};

Schedule to_injection_schedule(const DemandProfile& profile,
                               const std::string& period, double dt_s,
                               InjectionMode mode, std::uint64_t seed,
                               std::uint64_t network_version = 0);

/// Total flow (veh/h) crossing each link in a period, from route demand.
std::map<std::string, double> link_flows(const DemandProfile& profile,
                                         const std::string& period);

/// Flow (veh/h) per movement (in_link, out_link) in a period.
std::map<std::pair<std::string, std::string>, double> movement_flows(
    const DemandProfile& profile, const std::string& period);

}  // namespace tidalflow
