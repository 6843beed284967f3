// Command-line front end: validate scenarios, run simulations, optimize
// plans, compare them, and drive the consensus loop.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tidalflow/scenario.hpp"
#include "tidalflow/serialize.hpp"

namespace tf = tidalflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

tf::EvaluatorKind evaluator_from(const std::string& name) {
  if (name == "webster_analytic") return tf::EvaluatorKind::webster_analytic;
  if (name == "mesosim") return tf::EvaluatorKind::mesosim;
  throw tf::Error(tf::ErrorCode::ParseError, "unknown evaluator: " + name);
}

tf::ControlPlan resolve_plan(const std::string& spec, const tf::Scenario& sc,
                             const std::string& period) {
  if (spec == "baseline") return tf::scenario_baseline(sc, period);
  return tf::load_plan(spec);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw tf::Error(tf::ErrorCode::ParseError, "cannot write " + path);
  out << text;
}

int cmd_validate(const std::string& scenario_path) {
  const tf::Scenario sc = tf::load_scenario(scenario_path);
  const std::vector<std::string> issues = tf::validate_scenario(sc);
  for (const std::string& issue : issues) std::cout << issue << "\n";
  if (issues.empty()) std::cout << "ok\n";
  return issues.empty() ? kExitOk : kExitDomain;
}

int cmd_simulate(const std::string& scenario_path, const std::string& plan_spec,
                 const std::string& period, const std::string& evaluator,
                 const std::string& out) {
  const tf::Scenario sc = tf::load_scenario(scenario_path);
  const tf::EvalContext ctx =
      tf::build_context(sc, period, evaluator_from(evaluator));
  const tf::ControlPlan plan = resolve_plan(plan_spec, sc, period);
  const tf::PlanScore score = tf::evaluate_plan(plan, ctx);

  std::string text = tf::metrics_csv_header() + "\n";
  const std::string name = plan_spec == "baseline" ? "baseline" : plan_spec;
  text += tf::metrics_csv_row(name, period, score.indicators,
                              score.breakdown) +
          "\n";
  write_text(out, text);
  return kExitOk;
}

int cmd_optimize(const std::string& scenario_path, const std::string& period,
                 const std::string& evaluator, const std::string& out_plan,
                 const std::string& out_history, int generations, long seed) {
  tf::Scenario sc = tf::load_scenario(scenario_path);
  if (generations >= 0) sc.ga.generations = generations;
  if (seed >= 0) sc.ga.seed = static_cast<std::uint64_t>(seed);
  const tf::EvaluatorKind kind =
      evaluator.empty() ? sc.ga_evaluator : evaluator_from(evaluator);
  const tf::EvalContext ctx = tf::build_context(sc, period, kind);

  const tf::GAResult result = tf::optimize(ctx, sc.ga);
  tf::save_plan(result.best_plan, out_plan);

  if (!out_history.empty()) {
    std::string text = "generation,best_fitness,mean_fitness\n";
    char buf[128];
    for (std::size_t g = 0; g < result.history.size(); ++g) {
      std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f\n", g,
                    result.history[g].first, result.history[g].second);
      text += buf;
    }
    write_text(out_history, text);
  }
  std::printf("best fitness %.6f -> %s\n", result.best_fitness,
              out_plan.c_str());
  return kExitOk;
}

int cmd_compare(const std::string& scenario_path,
                const std::vector<std::string>& plan_specs,
                const std::string& evaluator, const std::string& out) {
  const tf::Scenario sc = tf::load_scenario(scenario_path);
  std::string text = tf::metrics_csv_header() +
                     ",efficiency_improvement_pct,emission_improvement_pct,"
                     "pi_improvement_pct\n";
  for (const tf::Period& period : sc.demand.periods) {
    const tf::EvalContext ctx =
        tf::build_context(sc, period.name, evaluator_from(evaluator));
    tf::PiBreakdown reference;
    for (std::size_t i = 0; i < plan_specs.size(); ++i) {
      const tf::ControlPlan plan =
          resolve_plan(plan_specs[i], sc, period.name);
      const tf::PlanScore score = tf::evaluate_plan(plan, ctx);
      if (i == 0) reference = score.breakdown;
      auto pct = [](double base, double now) {
        return base != 0.0 ? (base - now) / base * 100.0 : 0.0;
      };
      char buf[128];
      std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.6f\n",
                    pct(reference.z_f, score.breakdown.z_f),
                    pct(reference.z_n, score.breakdown.z_n),
                    pct(reference.pi, score.breakdown.pi));
      const std::string name =
          plan_specs[i] == "baseline" ? "baseline" : plan_specs[i];
      text += tf::metrics_csv_row(name, period.name, score.indicators,
                                  score.breakdown) +
              buf;
    }
  }
  write_text(out, text);
  return kExitOk;
}

int cmd_dao_run(const std::string& scenario_path, int rounds,
                const std::string& out, const std::string& contract_spec) {
  const tf::Scenario sc = tf::load_scenario(scenario_path);
  const std::string period = sc.demand.periods.front().name;
  const tf::EvalContext ctx =
      tf::build_context(sc, period, sc.dao_evaluator);

  const tf::ControlPlan incumbent = tf::scenario_baseline(sc, period);
  const tf::ControlPlan contract =
      contract_spec.empty() ? tf::optimize(ctx, sc.ga).best_plan
                            : tf::load_plan(contract_spec);

  tf::DaoState state = tf::make_dao_state(ctx, incumbent, contract);
  const int n = rounds >= 0 ? rounds : sc.dao_rounds;
  for (int r = 0; r < n; ++r) {
    const tf::LedgerEntry entry = tf::consensus_round(state, ctx, sc.dao);
    std::printf("round %d: chose %s (PI %.6f)\n", entry.round,
                entry.candidates[entry.chosen].kind.c_str(),
                entry.pi[entry.chosen]);
  }
  tf::write_ledger(state.ledger, out);
  std::printf("final weights:");
  for (const tf::Agent& agent : state.agents) {
    std::printf(" %s=%.6f", agent.id.c_str(), agent.voting_weight);
  }
  std::printf("\nledger -> %s\n", out.c_str());
  return kExitOk;
}

int cmd_dao_verify(const std::string& ledger_path) {
  const std::vector<tf::LedgerEntry> ledger = tf::read_ledger(ledger_path);
  if (!tf::verify_ledger(ledger)) {
    std::cout << "ledger verification FAILED\n";
    return kExitDomain;
  }
  std::printf("ledger ok: %zu entries\n", ledger.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tidal-lane management toolkit"};
  app.require_subcommand(1);

  std::string scenario, plan = "baseline", period = "morning";
  std::string evaluator = "mesosim", out, out_history, ledger, contract;
  std::vector<std::string> plans;
  int generations = -1, rounds = -1;
  long seed = -1;

  CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("scenario", scenario)->required();

  CLI::App* simulate =
      app.add_subcommand("simulate", "score one plan for one period");
  simulate->add_option("scenario", scenario)->required();
  simulate->add_option("--plan", plan, "'baseline' or a plan JSON path");
  simulate->add_option("--period", period);
  simulate->add_option("--evaluator", evaluator,
                       "mesosim or webster_analytic");
  simulate->add_option("--out", out, "metrics CSV path ('-' for stdout)");

  CLI::App* optimize = app.add_subcommand("optimize", "search for a plan");
  optimize->add_option("scenario", scenario)->required();
  optimize->add_option("--period", period);
  std::string opt_eval;
  optimize->add_option("--evaluator", opt_eval,
                       "mesosim or webster_analytic (default from scenario)");
  optimize->add_option("--out", out, "plan JSON output path")->required();
  optimize->add_option("--history", out_history, "per-generation CSV path");
  optimize->add_option("--generations", generations);
  optimize->add_option("--seed", seed);

  CLI::App* compare =
      app.add_subcommand("compare", "plans x periods with deltas vs first");
  compare->add_option("scenario", scenario)->required();
  compare->add_option("--plans", plans, "comma-separated plan specs")
      ->required()
      ->delimiter(',');
  compare->add_option("--evaluator", evaluator);
  compare->add_option("--out", out, "comparison CSV path ('-' for stdout)");

  CLI::App* dao = app.add_subcommand("dao-run", "run consensus rounds");
  dao->add_option("scenario", scenario)->required();
  dao->add_option("--rounds", rounds);
  dao->add_option("--out", ledger, "line-delimited JSON ledger path")
      ->required();
  dao->add_option("--contract", contract,
                  "plan JSON for the contract candidate (default: optimize)");

  CLI::App* dao_verify =
      app.add_subcommand("dao-verify", "check a ledger's hash chain");
  std::string verify_path;
  dao_verify->add_option("ledger", verify_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(scenario);
    if (simulate->parsed())
      return cmd_simulate(scenario, plan, period, evaluator, out);
    if (optimize->parsed())
      return cmd_optimize(scenario, period, opt_eval, out, out_history,
                          generations, seed);
    if (compare->parsed())
      return cmd_compare(scenario, plans, evaluator, out);
    if (dao->parsed()) return cmd_dao_run(scenario, rounds, ledger, contract);
    if (dao_verify->parsed()) return cmd_dao_verify(verify_path);
  } catch (const tf::Error& e) {
    std::cerr << "error [" << tf::error_code_name(e.code()) << "]: "
              << e.what() << "\n";
    return e.code() == tf::ErrorCode::ParseError ? kExitUsage : kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
