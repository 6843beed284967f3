#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tidalflow/error.hpp"

namespace tidalflow {

/// Directed roadway segment. A link paired with its opposite-direction twin
/// shares a pool of reversible lanes that can be granted to either side.
struct Link {
  std::string id;
  std::string from_node;
  std::string to_node;
  double length_m = 0.0;
  int lanes_total = 1;       // lanes in the balanced configuration
  int reversible_lanes = 0;  // this link's contribution to the shared pool
  double per_lane_saturation_flow = 1800.0;  // veh/h/lane
  double free_flow_speed_kmh = 40.0;
  std::optional<std::string> paired_link;
  bool closable = false;  // direction may drop to zero effective lanes

  int fixed_lanes() const { return lanes_total - reversible_lanes; }
  double free_flow_time_s() const {
    return length_m / (free_flow_speed_kmh / 3.6);
  }
};

struct Movement {
  std::string in_link;
  std::string out_link;
};

struct Phase {
  std::string id;
  std::vector<Movement> movements;
  double min_green_s = 0.0;
};

struct Intersection {
  std::string id;
  std::vector<Phase> phases;
  double lost_time_s = 0.0;
};

/// A reversible-lane pool covering one link pair. `forward` is the member
/// with the lexicographically smaller id; grants count lanes given to it.
struct ReversiblePool {
  std::string id;  // == forward link id
  std::string forward;
  std::string reverse;
  int size = 0;  // combined reversible lanes of both members
};

struct LaneAllocation {
  std::map<std::string, int> grants;  // pool id -> lanes granted to forward
};

/// Per-intersection signal timing. Greens are effective green seconds and
/// must sum to cycle - lost_time.
struct SignalTiming {
  double cycle_s = 0.0;
  std::map<std::string, double> greens;  // phase id -> t_i
  double offset_s = 0.0;
};

struct SignalPlan {
  std::map<std::string, SignalTiming> timings;  // intersection id -> timing
};

/// Joint decision variable: signal timing for every intersection plus a
/// lane grant for every reversible pool.
struct ControlPlan {
  SignalPlan signal;
  LaneAllocation lanes;
};

struct ValidationReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

class Network {
 public:
  Network() = default;
  Network(std::vector<Intersection> intersections, std::vector<Link> links);

  const std::vector<Intersection>& intersections() const {
    return intersections_;
  }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<ReversiblePool>& pools() const { return pools_; }
  std::uint64_t version() const { return version_; }
  const LaneAllocation& allocation() const { return allocation_; }

  const Link* find_link(const std::string& id) const;
  const Intersection* find_intersection(const std::string& id) const;
  const ReversiblePool* find_pool(const std::string& id) const;
  bool has_intersection(const std::string& node_id) const;

  /// Lanes currently serving `link_id` under the applied allocation.
  int effective_lanes(const std::string& link_id) const;

  /// Phase serving movement (in_link -> out_link) at the downstream
  /// intersection, or nullptr when the movement is unsignalized.
  const Phase* serving_phase(const std::string& in_link,
                             const std::string& out_link) const;

 private:
  friend Network apply_lane_allocation(const Network&, const LaneAllocation&);

  std::vector<Intersection> intersections_;
  std::vector<Link> links_;
  std::vector<ReversiblePool> pools_;
  LaneAllocation allocation_;  // balanced by default
  std::uint64_t version_ = 0;
  std::map<std::string, std::size_t> link_index_;
  std::map<std::string, std::size_t> intersection_index_;
};

ValidationReport validate_network(const Network& net);

/// Returns a copy of `net` with `alloc` applied and the version bumped.
/// Throws UnknownPool / AllocationOutOfRange.
Network apply_lane_allocation(const Network& net, const LaneAllocation& alloc);

/// Balanced allocation: every link keeps its own reversible lanes.
LaneAllocation balanced_allocation(const Network& net);

/// Effective saturation flow of a link (veh/h) under an allocation.
double saturation_flow(const Network& net, const std::string& link_id,
                       const LaneAllocation& alloc);

/// Flow ratio y = q / s. Throws ZeroSaturationFlow when s <= 0.
double flow_ratio(double q_veh_h, double s_veh_h);

/// Feasible grants for one pool given the >=1-lane-per-direction rule.
std::vector<int> feasible_grants(const Network& net, const ReversiblePool& pool);

/// Exhaustive cartesian product of feasible grants over all pools.
/// Deterministic order. Throws SearchSpaceTooLarge past `cap`.
std::vector<LaneAllocation> enumerate_allocations(const Network& net,
                                                  std::size_t cap = 1000000);

}  // namespace tidalflow
