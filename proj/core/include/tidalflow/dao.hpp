#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tidalflow/eval.hpp"

namespace tidalflow {

struct Agent {
  std::string id;  // one per intersection
  double voting_weight = 0.0;
};

struct Proposal {
  std::string agent_id;
  ControlPlan plan;
  std::string rationale;
};

/// A plan on the ballot: the incumbent, the smart-contract (optimizer)
/// plan, or an agent proposal.
struct Candidate {
  std::string kind;  // "incumbent" | "contract" | "proposal"
  std::string agent_id;
  ControlPlan plan;
};

struct LedgerEntry {
  int round = 0;
  std::vector<Candidate> candidates;
  std::vector<double> pi;        // per candidate
  std::vector<int> ballots;      // per agent, candidate index voted for
  int chosen = 0;
  std::vector<double> post_weights;  // per agent
  std::uint64_t prev_hash = 0;
  std::uint64_t hash = 0;
};

struct DaoConfig {
  double eta = 1.0;
  double weight_floor = 1e-6;
  double c_min = 40.0;
  double c_max = 180.0;
};

struct DaoState {
  std::vector<Agent> agents;
  ControlPlan current;
  ControlPlan contract;
  std::vector<LedgerEntry> ledger;
};

/// One agent per intersection with equal initial weights.
DaoState make_dao_state(const EvalContext& ctx, const ControlPlan& incumbent,
                        const ControlPlan& contract);

/// Local policy: re-time the agent's own intersection from its approach
/// flow ratios, keeping everything else at the current plan.
Proposal submit_proposal(const Agent& agent, const DaoState& state,
                         const EvalContext& ctx, const DaoConfig& cfg);

std::vector<double> evaluate_candidates(const std::vector<Candidate>& cs,
                                        const EvalContext& ctx);

/// Each agent casts its full weight for the lowest-PI candidate (ties to
/// the lowest index); the candidate with the most weighted support wins.
int tally(const std::vector<double>& scores,
          const std::vector<double>& weights, std::vector<int>* ballots);

/// Multiplicative incentive: w *= exp(-eta (PI_a - PI_best) / PI_best),
/// floored and renormalized.
std::vector<double> update_weights(const std::vector<double>& weights,
                                   const std::vector<double>& proposal_pi,
                                   double pi_best, const DaoConfig& cfg);

/// Full round: propose, evaluate, vote, reweight, append to the ledger.
LedgerEntry consensus_round(DaoState& state, const EvalContext& ctx,
                            const DaoConfig& cfg);

std::uint64_t entry_hash(const LedgerEntry& entry);

/// True when every entry's hash matches its contents and its predecessor.
bool verify_ledger(const std::vector<LedgerEntry>& ledger);

}  // namespace tidalflow
