#include "tidalflow/ga.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace tidalflow {

GenomeLayout GenomeLayout::of(const Network& net) {
  GenomeLayout layout;
  std::size_t cursor = 0;
  for (const Intersection& node : net.intersections()) {
    GenomeLayout::NodeSlot slot;
    slot.intersection = node.id;
    slot.base = cursor;
    slot.phases = node.phases.size();
    cursor += 2 + node.phases.size();  // cycle + shares + offset
    layout.nodes.push_back(slot);
  }
  layout.real_count = cursor;
  for (const ReversiblePool& pool : net.pools()) {
    layout.pools.push_back(pool.id);
  }
  return layout;
}

namespace {

std::pair<int, int> grant_bounds(const Network& net,
                                 const ReversiblePool& pool) {
  const std::vector<int> grants = feasible_grants(net, pool);
  return {grants.front(), grants.back()};
}

}  // namespace

Chromosome repair(Chromosome ch, const Network& net, const GAConfig& cfg) {
  const GenomeLayout layout = GenomeLayout::of(net);
  if (ch.reals.size() != layout.real_count ||
      ch.ints.size() != layout.pools.size())
    throw Error(ErrorCode::ShapeMismatch, "chromosome does not fit network");
  for (const auto& slot : layout.nodes) {
    double& cycle = ch.reals[slot.base];
    cycle = std::clamp(cycle, cfg.c_min, cfg.c_max);
    for (std::size_t p = 0; p < slot.phases; ++p) {
      double& share = ch.reals[slot.base + 1 + p];
      share = std::clamp(share, 0.0, 1e3);
    }
    double& offset = ch.reals[slot.base + 1 + slot.phases];
    offset = std::fmod(offset, cfg.c_max);
    if (offset < 0) offset += cfg.c_max;
  }
  for (std::size_t p = 0; p < layout.pools.size(); ++p) {
    const auto [lo, hi] = grant_bounds(net, *net.find_pool(layout.pools[p]));
    ch.ints[p] = std::clamp(ch.ints[p], lo, hi);
  }
  return ch;
}

ControlPlan decode(const Chromosome& ch, const Network& net,
                   const GAConfig& cfg) {
  const GenomeLayout layout = GenomeLayout::of(net);
  if (ch.reals.size() != layout.real_count ||
      ch.ints.size() != layout.pools.size())
    throw Error(ErrorCode::ShapeMismatch, "chromosome does not fit network");
  ControlPlan plan;
  for (const auto& slot : layout.nodes) {
    const Intersection* node = net.find_intersection(slot.intersection);
    const double cycle =
        std::clamp(ch.reals[slot.base], cfg.c_min, cfg.c_max);
    double min_sum = 0.0;
    for (const Phase& phase : node->phases) min_sum += phase.min_green_s;
    const double budget = std::max(0.0, cycle - node->lost_time_s - min_sum);

    double share_sum = 0.0;
    for (std::size_t p = 0; p < slot.phases; ++p) {
      share_sum += std::max(0.0, ch.reals[slot.base + 1 + p]);
    }
    SignalTiming timing;
    timing.cycle_s = cycle;
    for (std::size_t p = 0; p < slot.phases; ++p) {
      const double share =
          share_sum > 0 ? std::max(0.0, ch.reals[slot.base + 1 + p]) / share_sum
                        : 1.0 / slot.phases;
      timing.greens[node->phases[p].id] =
          node->phases[p].min_green_s + budget * share;
    }
    double offset = std::fmod(ch.reals[slot.base + 1 + slot.phases], cycle);
    if (offset < 0) offset += cycle;
    timing.offset_s = offset;
    plan.signal.timings[node->id] = timing;
  }
  for (std::size_t p = 0; p < layout.pools.size(); ++p) {
    const ReversiblePool* pool = net.find_pool(layout.pools[p]);
    const auto [lo, hi] = grant_bounds(net, *pool);
    plan.lanes.grants[pool->id] = std::clamp(ch.ints[p], lo, hi);
  }
  return plan;
}

double fitness(const Chromosome& ch, const EvalContext& ctx,
               const GAConfig& cfg) {
  return evaluate_plan(decode(ch, *ctx.net, cfg), ctx).fitness;
}

void evaluate_population(Population& pop, const EvalContext& ctx,
                         const GAConfig& cfg) {
  pop.fitness.assign(pop.members.size(), 0.0);
  const int threads = std::max(0, ctx.threads);
  if (threads <= 1) {
    for (std::size_t i = 0; i < pop.members.size(); ++i) {
      pop.fitness[i] = fitness(pop.members[i], ctx, cfg);
    }
    return;
  }
  // Results land at fixed indices, so the merge is deterministic no matter
  // how the workers are scheduled.
  std::vector<std::thread> workers;
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < pop.members.size(); i += threads) {
        pop.fitness[i] = fitness(pop.members[i], ctx, cfg);
      }
    });
  }
  for (std::thread& t : workers) t.join();
}

namespace {

std::size_t tournament(const Population& pop, const GAConfig& cfg,
                       std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pop.members.size() - 1);
  std::size_t best = pick(rng);
  for (int k = 1; k < cfg.tournament_size; ++k) {
    const std::size_t challenger = pick(rng);
    if (pop.fitness[challenger] < pop.fitness[best]) best = challenger;
  }
  return best;
}

}  // namespace

Population step_generation(const Population& pop, const EvalContext& ctx,
                           const GAConfig& cfg, std::mt19937_64& rng) {
  const Network& net = *ctx.net;
  Population next;
  next.members.reserve(pop.members.size());

  // Elitism: carry the best k unchanged.
  std::vector<std::size_t> order(pop.members.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pop.fitness[a] < pop.fitness[b];
  });
  for (int e = 0; e < cfg.elitism && e < static_cast<int>(order.size()); ++e) {
    next.members.push_back(pop.members[order[e]]);
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (next.members.size() < pop.members.size()) {
    Chromosome a = pop.members[tournament(pop, cfg, rng)];
    Chromosome b = pop.members[tournament(pop, cfg, rng)];
    if (unit(rng) < cfg.crossover_rate) {
      for (std::size_t g = 0; g < a.reals.size(); ++g) {
        const double lo = std::min(a.reals[g], b.reals[g]);
        const double hi = std::max(a.reals[g], b.reals[g]);
        const double d = hi - lo;
        std::uniform_real_distribution<double> blend(lo - cfg.blend_alpha * d,
                                                     hi + cfg.blend_alpha * d);
        a.reals[g] = blend(rng);
        b.reals[g] = blend(rng);
      }
      for (std::size_t g = 0; g < a.ints.size(); ++g) {
        if (unit(rng) < 0.5) std::swap(a.ints[g], b.ints[g]);
      }
    }
    for (Chromosome* child : {&a, &b}) {
      const GenomeLayout layout = GenomeLayout::of(net);
      for (const auto& slot : layout.nodes) {
        if (unit(rng) < cfg.mutation_rate) {
          std::normal_distribution<double> jolt(0.0,
                                                0.1 * (cfg.c_max - cfg.c_min));
          child->reals[slot.base] += jolt(rng);
        }
        for (std::size_t p = 0; p < slot.phases; ++p) {
          if (unit(rng) < cfg.mutation_rate) {
            std::normal_distribution<double> jolt(0.0, 0.1);
            child->reals[slot.base + 1 + p] += jolt(rng);
          }
        }
        if (unit(rng) < cfg.mutation_rate) {
          std::normal_distribution<double> jolt(0.0, 0.1 * cfg.c_max);
          child->reals[slot.base + 1 + slot.phases] += jolt(rng);
        }
      }
      for (std::size_t g = 0; g < child->ints.size(); ++g) {
        if (unit(rng) < cfg.mutation_rate) {
          child->ints[g] += unit(rng) < 0.5 ? -1 : 1;
        }
      }
      *child = repair(std::move(*child), net, cfg);
      if (next.members.size() < pop.members.size()) {
        next.members.push_back(std::move(*child));
      }
    }
  }
  return next;
}

namespace {

Chromosome random_chromosome(const Network& net, const GAConfig& cfg,
                             std::mt19937_64& rng) {
  const GenomeLayout layout = GenomeLayout::of(net);
  Chromosome ch;
  ch.reals.resize(layout.real_count);
  std::uniform_real_distribution<double> cycle(cfg.c_min, cfg.c_max);
  std::uniform_real_distribution<double> share(0.0, 1.0);
  std::uniform_real_distribution<double> offset(0.0, cfg.c_max);
  for (const auto& slot : layout.nodes) {
    ch.reals[slot.base] = cycle(rng);
    for (std::size_t p = 0; p < slot.phases; ++p) {
      ch.reals[slot.base + 1 + p] = share(rng);
    }
    ch.reals[slot.base + 1 + slot.phases] = offset(rng);
  }
  for (const std::string& pool_id : layout.pools) {
    const auto [lo, hi] = grant_bounds(net, *net.find_pool(pool_id));
    std::uniform_int_distribution<int> grant(lo, hi);
    ch.ints.push_back(grant(rng));
  }
  return ch;
}

Chromosome seeded_chromosome(const Network& net, const EvalContext& ctx,
                             const GAConfig& cfg, std::mt19937_64& rng) {
  const ControlPlan seed = baseline_plan(*ctx.net, *ctx.demand, ctx.period,
                                         ctx.webster, cfg.c_min, cfg.c_max);
  const GenomeLayout layout = GenomeLayout::of(net);
  Chromosome ch;
  ch.reals.resize(layout.real_count);
  std::normal_distribution<double> jitter(0.0, 0.05);
  std::uniform_real_distribution<double> offset(0.0, cfg.c_max);
  for (const auto& slot : layout.nodes) {
    const Intersection* node = net.find_intersection(slot.intersection);
    const SignalTiming& timing = seed.signal.timings.at(slot.intersection);
    ch.reals[slot.base] = timing.cycle_s * (1.0 + jitter(rng));
    double total = 0.0;
    for (const Phase& phase : node->phases) total += timing.greens.at(phase.id);
    for (std::size_t p = 0; p < slot.phases; ++p) {
      const double g = timing.greens.at(node->phases[p].id);
      ch.reals[slot.base + 1 + p] =
          std::max(0.0, g / std::max(total, 1.0) + jitter(rng));
    }
    ch.reals[slot.base + 1 + slot.phases] = offset(rng);
  }
  for (const std::string& pool_id : layout.pools) {
    const auto [lo, hi] = grant_bounds(net, *net.find_pool(pool_id));
    std::uniform_int_distribution<int> grant(lo, hi);
    ch.ints.push_back(grant(rng));
  }
  return repair(std::move(ch), net, cfg);
}

}  // namespace

GAResult optimize(const EvalContext& ctx, const GAConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  Population pop;
  for (int i = 0; i < cfg.population_size; ++i) {
    pop.members.push_back(i < cfg.population_size / 2
                              ? seeded_chromosome(*ctx.net, ctx, cfg, rng)
                              : random_chromosome(*ctx.net, cfg, rng));
  }
  evaluate_population(pop, ctx, cfg);

  GAResult result;
  result.best_fitness = std::numeric_limits<double>::infinity();
  auto record = [&] {
    double best = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < pop.members.size(); ++i) {
      sum += pop.fitness[i];
      if (pop.fitness[i] < best) {
        best = pop.fitness[i];
        best_idx = i;
      }
    }
    if (best < result.best_fitness) {
      result.best_fitness = best;
      result.best = pop.members[best_idx];
    }
    result.history.emplace_back(result.best_fitness,
                                sum / pop.members.size());
  };
  record();
  for (int gen = 0; gen < cfg.generations; ++gen) {
    pop = step_generation(pop, ctx, cfg, rng);
    evaluate_population(pop, ctx, cfg);
    record();
  }
  result.best_plan = decode(result.best, *ctx.net, cfg);
  return result;
}

}  // namespace tidalflow
