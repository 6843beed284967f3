#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "tidalflow/eval.hpp"
#include "tidalflow/ga.hpp"
#include "tidalflow/mcdm.hpp"
#include "tidalflow/scenario.hpp"
#include "tidalflow/webster.hpp"

using namespace tidalflow;

namespace {

const Scenario& corridor() {
  static const Scenario sc = load_scenario(TIDALFLOW_SCENARIO);
  return sc;
}

const EvalContext& analytic_ctx() {
  static const EvalContext ctx =
      build_context(corridor(), "morning", EvaluatorKind::webster_analytic);
  return ctx;
}

const EvalContext& mesosim_ctx() {
  static const EvalContext ctx =
      build_context(corridor(), "morning", EvaluatorKind::mesosim);
  return ctx;
}

}  // namespace

static void BM_webster_delay(benchmark::State& state) {
  const std::vector<MovementInput> movements = {
      {0.2, 0.25, 0.5, 0.8}, {0.1, 0.15, 0.3, 0.67}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(webster_delay(movements, 60.0));
  }
}
BENCHMARK(BM_webster_delay);

static void BM_green_splits(benchmark::State& state) {
  const std::vector<double> y = {0.3, 0.1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(green_splits(y, 10.0));
  }
}
BENCHMARK(BM_green_splits);

static void BM_ahp_weights(benchmark::State& state) {
  const ImportanceMatrix m{{{1.0, 4.0}, {0.25, 1.0}}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(ahp_weights(m));
  }
}
BENCHMARK(BM_ahp_weights);

static void BM_consistency_ratio(benchmark::State& state) {
  const ImportanceMatrix m{
      {{1.0, 2.0, 4.0}, {0.5, 1.0, 2.0}, {0.25, 0.5, 1.0}}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(consistency_ratio(m));
  }
}
BENCHMARK(BM_consistency_ratio);

static void BM_entropy_weights(benchmark::State& state) {
  IndicatorTable table;
  table.directions = {Direction::cost, Direction::cost, Direction::cost,
                      Direction::cost};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1.0, 100.0);
  for (int r = 0; r < 24; ++r) {
    table.rows.push_back({u(rng), u(rng), u(rng), u(rng)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(entropy_weights(table));
  }
}
BENCHMARK(BM_entropy_weights);

static void BM_evaluate_plan_analytic(benchmark::State& state) {
  const EvalContext& ctx = analytic_ctx();
  const ControlPlan plan = scenario_baseline(corridor(), "morning");
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_plan(plan, ctx));
  }
}
BENCHMARK(BM_evaluate_plan_analytic);

static void BM_mesosim_run(benchmark::State& state) {
  const EvalContext& ctx = mesosim_ctx();
  const ControlPlan plan = scenario_baseline(corridor(), "morning");
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulated_indicators(
        *ctx.net, plan, ctx.schedule, ctx.sim, ctx.emissions));
  }
}
BENCHMARK(BM_mesosim_run)->Unit(benchmark::kMillisecond);

static void BM_ga_generation(benchmark::State& state) {
  const EvalContext& ctx = analytic_ctx();
  GAConfig cfg = corridor().ga;
  cfg.population_size = static_cast<int>(state.range(0));
  std::mt19937_64 rng(cfg.seed);
  const GenomeLayout layout = GenomeLayout::of(*ctx.net);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Population pop;
  for (int i = 0; i < cfg.population_size; ++i) {
    Chromosome ch;
    for (std::size_t g = 0; g < layout.real_count; ++g) {
      ch.reals.push_back(40.0 + 140.0 * u(rng));
    }
    for (std::size_t p = 0; p < layout.pools.size(); ++p) {
      ch.ints.push_back(1);
    }
    pop.members.push_back(repair(ch, *ctx.net, cfg));
  }
  evaluate_population(pop, ctx, cfg);
  for (auto _ : state) {
    Population next = step_generation(pop, ctx, cfg, rng);
    benchmark::DoNotOptimize(next);
  }
}
BENCHMARK(BM_ga_generation)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
