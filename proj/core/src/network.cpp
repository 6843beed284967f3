#include "tidalflow/network.hpp"

#include <algorithm>
#include <set>

namespace tidalflow {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownAccess: return "UnknownAccess";
    case ErrorCode::NegativeFlow: return "NegativeFlow";
    case ErrorCode::UnknownPool: return "UnknownPool";
    case ErrorCode::AllocationOutOfRange: return "AllocationOutOfRange";
    case ErrorCode::ZeroSaturationFlow: return "ZeroSaturationFlow";
    case ErrorCode::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::InvalidGreenRatio: return "InvalidGreenRatio";
    case ErrorCode::Oversaturated: return "Oversaturated";
    case ErrorCode::NoFlow: return "NoFlow";
    case ErrorCode::InfeasibleDemand: return "InfeasibleDemand";
    case ErrorCode::NonpositiveLostTime: return "NonpositiveLostTime";
    case ErrorCode::InfeasiblePlan: return "InfeasiblePlan";
    case ErrorCode::NonReciprocal: return "NonReciprocal";
    case ErrorCode::NonPositiveEntry: return "NonPositiveEntry";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::DegenerateTable: return "DegenerateTable";
    case ErrorCode::MissingScaler: return "MissingScaler";
    case ErrorCode::UndefinedRatio: return "UndefinedRatio";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::InfeasibleLocalPlan: return "InfeasibleLocalPlan";
  }
  return "UnknownError";
}

Network::Network(std::vector<Intersection> intersections,
                 std::vector<Link> links)
    : intersections_(std::move(intersections)), links_(std::move(links)) {
  for (std::size_t i = 0; i < links_.size(); ++i) {
    link_index_[links_[i].id] = i;
  }
  for (std::size_t i = 0; i < intersections_.size(); ++i) {
    intersection_index_[intersections_[i].id] = i;
  }
  // Derive pools from paired reversible links; forward = smaller id.
  std::set<std::string> seen;
  for (const Link& link : links_) {
    if (link.reversible_lanes <= 0 || !link.paired_link) continue;
    const Link* other = find_link(*link.paired_link);
    if (!other) continue;
    const std::string& fwd = std::min(link.id, other->id);
    if (seen.count(fwd)) continue;
    seen.insert(fwd);
    ReversiblePool pool;
    pool.id = fwd;
    pool.forward = fwd;
    pool.reverse = std::max(link.id, other->id);
    pool.size = link.reversible_lanes + other->reversible_lanes;
    pools_.push_back(pool);
  }
  std::sort(pools_.begin(), pools_.end(),
            [](const ReversiblePool& a, const ReversiblePool& b) {
              return a.id < b.id;
            });
  allocation_ = balanced_allocation(*this);
}

const Link* Network::find_link(const std::string& id) const {
  auto it = link_index_.find(id);
  return it == link_index_.end() ? nullptr : &links_[it->second];
}

const Intersection* Network::find_intersection(const std::string& id) const {
  auto it = intersection_index_.find(id);
  return it == intersection_index_.end() ? nullptr
                                         : &intersections_[it->second];
}

const ReversiblePool* Network::find_pool(const std::string& id) const {
  for (const ReversiblePool& pool : pools_) {
    if (pool.id == id) return &pool;
  }
  return nullptr;
}

bool Network::has_intersection(const std::string& node_id) const {
  return intersection_index_.count(node_id) > 0;
}

int Network::effective_lanes(const std::string& link_id) const {
  const Link* link = find_link(link_id);
  if (!link) return 0;
  for (const ReversiblePool& pool : pools_) {
    if (pool.forward != link_id && pool.reverse != link_id) continue;
    auto it = allocation_.grants.find(pool.id);
    int grant = it != allocation_.grants.end()
                    ? it->second
                    : find_link(pool.forward)->reversible_lanes;
    if (pool.forward == link_id) return link->fixed_lanes() + grant;
    return link->fixed_lanes() + (pool.size - grant);
  }
  return link->lanes_total;
}

const Phase* Network::serving_phase(const std::string& in_link,
                                    const std::string& out_link) const {
  const Link* link = find_link(in_link);
  if (!link) return nullptr;
  const Intersection* node = find_intersection(link->to_node);
  if (!node) return nullptr;
  for (const Phase& phase : node->phases) {
    for (const Movement& mv : phase.movements) {
      if (mv.in_link == in_link && mv.out_link == out_link) return &phase;
    }
  }
  return nullptr;
}

ValidationReport validate_network(const Network& net) {
  ValidationReport report;
  auto add = [&](const std::string& msg) { report.issues.push_back(msg); };

  std::set<std::string> link_ids, node_ids;
  for (const Intersection& node : net.intersections()) {
    if (!node_ids.insert(node.id).second)
      add("duplicate intersection id: " + node.id);
    if (node.phases.empty()) add("intersection has no phases: " + node.id);
    if (node.lost_time_s < 0)
      add("negative lost time at intersection: " + node.id);
    std::set<std::pair<std::string, std::string>> served;
    for (const Phase& phase : node.phases) {
      if (phase.movements.empty())
        add("phase has no movements: " + node.id + "/" + phase.id);
      if (phase.min_green_s < 0)
        add("negative min_green: " + node.id + "/" + phase.id);
      for (const Movement& mv : phase.movements) {
        if (!served.insert({mv.in_link, mv.out_link}).second)
          add("movement served by more than one phase: " + mv.in_link + "->" +
              mv.out_link + " at " + node.id);
      }
    }
  }
  for (const Link& link : net.links()) {
    if (!link_ids.insert(link.id).second) add("duplicate link id: " + link.id);
    if (link.length_m <= 0) add("non-positive length on link: " + link.id);
    if (link.lanes_total < 1) add("link has no lanes: " + link.id);
    if (link.reversible_lanes < 0 || link.reversible_lanes > link.lanes_total)
      add("reversible lanes exceed total on link: " + link.id);
    if (link.per_lane_saturation_flow <= 0)
      add("non-positive saturation flow on link: " + link.id);
    if (link.free_flow_speed_kmh <= 0)
      add("non-positive free flow speed on link: " + link.id);
    if (link.paired_link) {
      const Link* other = net.find_link(*link.paired_link);
      if (!other) {
        add("link pairs with missing link: " + link.id);
      } else if (!other->paired_link || *other->paired_link != link.id) {
        add("asymmetric link pairing: " + link.id);
      }
    }
  }
  // Endpoints must be intersections or boundary nodes. A boundary node is
  // any node that is not an intersection; a link may not dangle on both
  // missing ends if a phase references it.
  std::set<std::string> referenced;
  for (const Intersection& node : net.intersections()) {
    for (const Phase& phase : node.phases) {
      for (const Movement& mv : phase.movements) {
        referenced.insert(mv.in_link);
        referenced.insert(mv.out_link);
        const Link* in = net.find_link(mv.in_link);
        const Link* out = net.find_link(mv.out_link);
        if (!in) add("phase references missing link: " + mv.in_link);
        if (!out) add("phase references missing link: " + mv.out_link);
        if (in && in->to_node != node.id)
          add("movement in-link does not end at intersection " + node.id +
              ": " + mv.in_link);
        if (out && out->from_node != node.id)
          add("movement out-link does not start at intersection " + node.id +
              ": " + mv.out_link);
      }
    }
  }
  for (const Intersection& node : net.intersections()) {
    bool any = false;
    for (const Link& link : net.links()) {
      if (link.to_node == node.id && referenced.count(link.id)) any = true;
    }
    if (!any) add("no phase serves any approach of intersection: " + node.id);
  }
  return report;
}

LaneAllocation balanced_allocation(const Network& net) {
  LaneAllocation alloc;
  for (const ReversiblePool& pool : net.pools()) {
    alloc.grants[pool.id] = net.find_link(pool.forward)->reversible_lanes;
  }
  return alloc;
}

Network apply_lane_allocation(const Network& net, const LaneAllocation& alloc) {
  for (const auto& [pool_id, grant] : alloc.grants) {
    const ReversiblePool* pool = net.find_pool(pool_id);
    if (!pool) throw Error(ErrorCode::UnknownPool, pool_id);
    if (grant < 0 || grant > pool->size)
      throw Error(ErrorCode::AllocationOutOfRange,
                  pool_id + " grant " + std::to_string(grant) + " on pool of " +
                      std::to_string(pool->size));
    const Link* fwd = net.find_link(pool->forward);
    const Link* rev = net.find_link(pool->reverse);
    if (fwd->fixed_lanes() + grant < 1 && !fwd->closable)
      throw Error(ErrorCode::AllocationOutOfRange,
                  "grant closes non-closable direction " + pool->forward);
    if (rev->fixed_lanes() + (pool->size - grant) < 1 && !rev->closable)
      throw Error(ErrorCode::AllocationOutOfRange,
                  "grant closes non-closable direction " + pool->reverse);
  }
  Network out = net;
  for (const auto& [pool_id, grant] : alloc.grants) {
    out.allocation_.grants[pool_id] = grant;
  }
  out.version_ = net.version() + 1;
  return out;
}

double saturation_flow(const Network& net, const std::string& link_id,
                       const LaneAllocation& alloc) {
  Network scoped = net;
  if (!alloc.grants.empty()) scoped = apply_lane_allocation(net, alloc);
  const Link* link = scoped.find_link(link_id);
  if (!link) return 0.0;
  return scoped.effective_lanes(link_id) * link->per_lane_saturation_flow;
}

double flow_ratio(double q_veh_h, double s_veh_h) {
  if (s_veh_h <= 0)
    throw Error(ErrorCode::ZeroSaturationFlow,
                "saturation flow must be positive");
  return q_veh_h / s_veh_h;
}

std::vector<int> feasible_grants(const Network& net,
                                 const ReversiblePool& pool) {
  const Link* fwd = net.find_link(pool.forward);
  const Link* rev = net.find_link(pool.reverse);
  std::vector<int> grants;
  for (int g = 0; g <= pool.size; ++g) {
    if (fwd->fixed_lanes() + g < 1 && !fwd->closable) continue;
    if (rev->fixed_lanes() + (pool.size - g) < 1 && !rev->closable) continue;
    grants.push_back(g);
  }
  return grants;
}

std::vector<LaneAllocation> enumerate_allocations(const Network& net,
                                                  std::size_t cap) {
  std::vector<std::vector<int>> choices;
  std::size_t total = 1;
  for (const ReversiblePool& pool : net.pools()) {
    choices.push_back(feasible_grants(net, pool));
    total *= choices.back().size();
    if (total > cap)
      throw Error(ErrorCode::SearchSpaceTooLarge,
                  "allocation space exceeds cap of " + std::to_string(cap));
  }
  std::vector<LaneAllocation> out;
  out.reserve(total);
  std::vector<std::size_t> idx(choices.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    LaneAllocation alloc;
    for (std::size_t p = 0; p < choices.size(); ++p) {
      alloc.grants[net.pools()[p].id] = choices[p][idx[p]];
    }
    out.push_back(std::move(alloc));
    for (std::size_t p = choices.size(); p-- > 0;) {
      if (++idx[p] < choices[p].size()) break;
      idx[p] = 0;
    }
  }
  return out;
}

}  // namespace tidalflow
