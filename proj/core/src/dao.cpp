#include "tidalflow/dao.hpp"

#include <algorithm>
#include <cmath>

#include "tidalflow/serialize.hpp"
#include "tidalflow/webster.hpp"

namespace tidalflow {

DaoState make_dao_state(const EvalContext& ctx, const ControlPlan& incumbent,
                        const ControlPlan& contract) {
  DaoState state;
  const double n = static_cast<double>(ctx.net->intersections().size());
  for (const Intersection& node : ctx.net->intersections()) {
    state.agents.push_back({node.id, 1.0 / n});
  }
  state.current = incumbent;
  state.contract = contract;
  return state;
}

Proposal submit_proposal(const Agent& agent, const DaoState& state,
                         const EvalContext& ctx, const DaoConfig& cfg) {
  const Network& net = *ctx.net;
  const Intersection* node = net.find_intersection(agent.id);
  if (!node)
    throw Error(ErrorCode::InfeasibleLocalPlan,
                "agent has no intersection: " + agent.id);

  Proposal proposal;
  proposal.agent_id = agent.id;
  proposal.plan = state.current;

  const auto flows = link_flows(*ctx.demand, ctx.period);
  const std::vector<double> ys =
      phase_flow_ratios(net, *node, flows, state.current.lanes);
  const double total_y = std::accumulate(ys.begin(), ys.end(), 0.0);
  if (total_y <= 0) {
    proposal.rationale = "no-change";
    return proposal;
  }

  proposal.plan.signal.timings[node->id] = timing_for_node(
      net, *node, flows, state.current.lanes, ctx.webster, cfg.c_min,
      cfg.c_max);
  proposal.rationale = "local-retiming";

  if (!check_plan_feasibility(proposal.plan, net).empty())
    throw Error(ErrorCode::InfeasibleLocalPlan, agent.id);
  return proposal;
}

std::vector<double> evaluate_candidates(const std::vector<Candidate>& cs,
                                        const EvalContext& ctx) {
  std::vector<double> scores;
  scores.reserve(cs.size());
  for (const Candidate& c : cs) {
    scores.push_back(evaluate_plan(c.plan, ctx).fitness);
  }
  return scores;
}

int tally(const std::vector<double>& scores,
          const std::vector<double>& weights, std::vector<int>* ballots) {
  if (scores.empty()) throw Error(ErrorCode::NoCandidates, "empty ballot");
  int favorite = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] < scores[favorite]) favorite = static_cast<int>(c);
  }
  // All agents share the contract evaluation, so every ballot lands on the
  // same candidate; support aggregation still follows the general rule.
  std::vector<double> support(scores.size(), 0.0);
  for (double w : weights) support[favorite] += w;
  if (ballots) ballots->assign(weights.size(), favorite);
  int winner = 0;
  for (std::size_t c = 1; c < support.size(); ++c) {
    if (support[c] > support[winner]) winner = static_cast<int>(c);
  }
  return winner;
}

std::vector<double> update_weights(const std::vector<double>& weights,
                                   const std::vector<double>& proposal_pi,
                                   double pi_best, const DaoConfig& cfg) {
  std::vector<double> next(weights.size());
  const double base = std::max(pi_best, 1e-12);
  double total = 0.0;
  for (std::size_t a = 0; a < weights.size(); ++a) {
    const double gap = (proposal_pi[a] - pi_best) / base;
    next[a] = std::max(weights[a] * std::exp(-cfg.eta * gap),
                       cfg.weight_floor);
    total += next[a];
  }
  for (double& w : next) w /= total;
  return next;
}

LedgerEntry consensus_round(DaoState& state, const EvalContext& ctx,
                            const DaoConfig& cfg) {
  LedgerEntry entry;
  entry.round = static_cast<int>(state.ledger.size());
  entry.prev_hash = state.ledger.empty() ? 0 : state.ledger.back().hash;

  entry.candidates.push_back({"incumbent", "", state.current});
  entry.candidates.push_back({"contract", "", state.contract});
  std::vector<std::size_t> proposal_index;
  for (const Agent& agent : state.agents) {
    Proposal p = submit_proposal(agent, state, ctx, cfg);
    proposal_index.push_back(entry.candidates.size());
    entry.candidates.push_back({"proposal", p.agent_id, p.plan});
  }

  entry.pi = evaluate_candidates(entry.candidates, ctx);

  std::vector<double> weights;
  for (const Agent& a : state.agents) weights.push_back(a.voting_weight);
  entry.chosen = tally(entry.pi, weights, &entry.ballots);

  const double pi_best = *std::min_element(entry.pi.begin(), entry.pi.end());
  std::vector<double> proposal_pi;
  for (std::size_t idx : proposal_index) proposal_pi.push_back(entry.pi[idx]);
  entry.post_weights = update_weights(weights, proposal_pi, pi_best, cfg);
  for (std::size_t a = 0; a < state.agents.size(); ++a) {
    state.agents[a].voting_weight = entry.post_weights[a];
  }

  state.current = entry.candidates[entry.chosen].plan;
  entry.hash = entry_hash(entry);
  state.ledger.push_back(entry);
  return entry;
}

std::uint64_t entry_hash(const LedgerEntry& entry) {
  LedgerEntry copy = entry;
  copy.hash = 0;
  const std::string canonical = ledger_entry_to_json(copy).dump();
  // FNV-1a, 64 bit.
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

bool verify_ledger(const std::vector<LedgerEntry>& ledger) {
  std::uint64_t prev = 0;
  for (const LedgerEntry& entry : ledger) {
    if (entry.prev_hash != prev) return false;
    if (entry_hash(entry) != entry.hash) return false;
    prev = entry.hash;
  }
  return true;
}

}  // namespace tidalflow
