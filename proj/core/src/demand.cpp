#include "tidalflow/demand.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tidalflow {

const Period* DemandProfile::find_period(const std::string& name) const {
  for (const Period& p : periods) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const AccessFlow* DemandProfile::find_access(int id) const {
  for (const AccessFlow& a : accesses) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

std::vector<std::string> validate_demand(const DemandProfile& profile,
                                         const Network& net) {
  std::vector<std::string> issues;
  for (std::size_t i = 0; i < profile.periods.size(); ++i) {
    const Period& a = profile.periods[i];
    if (a.end_s <= a.start_s)
      issues.push_back("period has non-positive duration: " + a.name);
    for (std::size_t j = i + 1; j < profile.periods.size(); ++j) {
      const Period& b = profile.periods[j];
      if (a.start_s < b.end_s && b.start_s < a.end_s)
        issues.push_back("overlapping periods: " + a.name + ", " + b.name);
    }
  }
  for (const AccessFlow& access : profile.accesses) {
    const std::string tag = "access " + std::to_string(access.id);
    for (const auto& [period, flow] : access.flow_by_period) {
      if (!std::isfinite(flow) || flow < 0)
        issues.push_back(tag + " has negative or non-finite flow in period " +
                         period);
    }
    if (access.route.empty()) {
      issues.push_back(tag + " has an empty route");
      continue;
    }
    const Link* first = net.find_link(access.route.front());
    if (!first) {
      issues.push_back(tag + " route starts at missing link: " +
                       access.route.front());
    } else if (first->from_node != access.entry_node) {
      issues.push_back(tag + " route does not start at its entry node");
    }
    for (std::size_t i = 0; i + 1 < access.route.size(); ++i) {
      const Link* cur = net.find_link(access.route[i]);
      const Link* nxt = net.find_link(access.route[i + 1]);
      if (!cur || !nxt) {
        issues.push_back(tag + " route references missing link");
        break;
      }
      if (cur->to_node != nxt->from_node) {
        issues.push_back(tag + " route is disconnected at " + cur->id + "->" +
                         nxt->id);
        break;
      }
    }
  }
  return issues;
}

double flow_at(const DemandProfile& profile, int access, double t_s) {
  const AccessFlow* a = profile.find_access(access);
  if (!a) throw Error(ErrorCode::UnknownAccess, std::to_string(access));
  for (const Period& p : profile.periods) {
    if (t_s >= p.start_s && t_s < p.end_s) {
      auto it = a->flow_by_period.find(p.name);
      return it == a->flow_by_period.end() ? 0.0 : it->second;
    }
  }
  return 0.0;
}

double tidal_ratio(const DemandProfile& profile, int access) {
  const AccessFlow* a = profile.find_access(access);
  if (!a) throw Error(ErrorCode::UnknownAccess, std::to_string(access));
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const Period& p : profile.periods) {
    auto it = a->flow_by_period.find(p.name);
    double flow = it == a->flow_by_period.end() ? 0.0 : it->second;
    lo = std::min(lo, flow);
    hi = std::max(hi, flow);
  }
  if (lo <= 0.0)
    throw Error(ErrorCode::UndefinedRatio,
                "access " + std::to_string(access) + " has a zero peak flow");
  return hi / lo;
}

Schedule to_injection_schedule(const DemandProfile& profile,
                               const std::string& period, double dt_s,
                               InjectionMode mode, std::uint64_t seed,
                               std::uint64_t network_version) {
  const Period* p = profile.find_period(period);
  if (!p) throw Error(ErrorCode::ParseError, "unknown period: " + period);
  if (dt_s <= 0) throw Error(ErrorCode::ParseError, "dt must be positive");
  const int steps = static_cast<int>(std::floor((p->end_s - p->start_s) / dt_s));

  Schedule sched;
  sched.period = period;
  sched.dt_s = dt_s;
  sched.network_version = network_version;
  for (const AccessFlow& access : profile.accesses) {
    auto it = access.flow_by_period.find(period);
    const double flow = it == access.flow_by_period.end() ? 0.0 : it->second;
    std::vector<int> counts(steps, 0);
    if (flow > 0) {
      if (mode == InjectionMode::uniform) {
        // Fractional backlog: emit floor of the cumulative target so that
        // period totals are exact.
        long emitted = 0;
        for (int k = 0; k < steps; ++k) {
          const double target = flow * (k + 1) * dt_s / 3600.0;
          const long due = static_cast<long>(std::floor(target + 1e-9));
          counts[k] = static_cast<int>(due - emitted);
          emitted = due;
        }
      } else {
        std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL *
                                    static_cast<std::uint64_t>(access.id + 1)));
        std::poisson_distribution<int> dist(flow * dt_s / 3600.0);
        for (int k = 0; k < steps; ++k) counts[k] = dist(rng);
      }
    }
    sched.access_ids.push_back(access.id);
    sched.counts.push_back(std::move(counts));
    sched.routes[access.id] = access.route;
  }
  return sched;
}

std::map<std::string, double> link_flows(const DemandProfile& profile,
                                         const std::string& period) {
  std::map<std::string, double> flows;
  for (const AccessFlow& access : profile.accesses) {
    auto it = access.flow_by_period.find(period);
    if (it == access.flow_by_period.end() || it->second <= 0) continue;
    for (const std::string& link : access.route) flows[link] += it->second;
  }
  return flows;
}

std::map<std::pair<std::string, std::string>, double> movement_flows(
    const DemandProfile& profile, const std::string& period) {
  std::map<std::pair<std::string, std::string>, double> flows;
  for (const AccessFlow& access : profile.accesses) {
    auto it = access.flow_by_period.find(period);
    if (it == access.flow_by_period.end() || it->second <= 0) continue;
    for (std::size_t i = 0; i + 1 < access.route.size(); ++i) {
      flows[{access.route[i], access.route[i + 1]}] += it->second;
    }
  }
  return flows;
}

}  // namespace tidalflow
