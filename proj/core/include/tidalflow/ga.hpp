#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tidalflow/eval.hpp"

namespace tidalflow {

struct GAConfig {
  int population_size = 50;
  int generations = 100;
  int tournament_size = 3;
  double crossover_rate = 0.9;
  double blend_alpha = 0.5;
  double mutation_rate = 0.1;  // per gene
  int elitism = 2;
  std::uint64_t seed = 1;
  double c_min = 40.0;
  double c_max = 180.0;
};

/// Real genes per intersection: cycle, one raw green share per phase, and
/// an offset; one integer gene per reversible pool (lanes to forward).
struct Chromosome {
  std::vector<double> reals;
  std::vector<int> ints;
};

/// Maps chromosome slots onto the network's intersections and pools.
struct GenomeLayout {
  struct NodeSlot {
    std::string intersection;
    std::size_t base = 0;  // index of the cycle gene
    std::size_t phases = 0;
  };
  std::vector<NodeSlot> nodes;
  std::vector<std::string> pools;
  std::size_t real_count = 0;

  static GenomeLayout of(const Network& net);
};

/// Projects genes into bounds; idempotent.
Chromosome repair(Chromosome ch, const Network& net, const GAConfig& cfg);

/// Decodes into a plan that always passes feasibility: shares normalize to
/// the green budget on top of minimum greens, lane genes clamp to pools.
ControlPlan decode(const Chromosome& ch, const Network& net,
                   const GAConfig& cfg);

double fitness(const Chromosome& ch, const EvalContext& ctx,
               const GAConfig& cfg);

struct Population {
  std::vector<Chromosome> members;
  std::vector<double> fitness;
};

void evaluate_population(Population& pop, const EvalContext& ctx,
                         const GAConfig& cfg);

Population step_generation(const Population& pop, const EvalContext& ctx,
                           const GAConfig& cfg, std::mt19937_64& rng);

struct GAResult {
  ControlPlan best_plan;
  Chromosome best;
  double best_fitness = 0.0;
  std::vector<std::pair<double, double>> history;  // (best, mean) per gen
};

GAResult optimize(const EvalContext& ctx, const GAConfig& cfg);

}  // namespace tidalflow
