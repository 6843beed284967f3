#include "tidalflow/scenario.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "tidalflow/serialize.hpp"

namespace tidalflow {

using nlohmann::json;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  return j;
}

Network parse_network(const json& j) {
  std::vector<Link> links;
  for (const json& lj : j.at("links")) {
    Link link;
    link.id = lj.at("id");
    link.from_node = lj.at("from");
    link.to_node = lj.at("to");
    link.length_m = lj.at("length_m");
    link.lanes_total = lj.at("lanes");
    link.reversible_lanes = lj.value("reversible", 0);
    link.per_lane_saturation_flow = lj.value("sat_flow", 1800.0);
    link.free_flow_speed_kmh = lj.value("speed_kmh", 40.0);
    if (lj.contains("paired") && !lj.at("paired").is_null())
      link.paired_link = lj.at("paired").get<std::string>();
    link.closable = lj.value("closable", false);
    links.push_back(link);
  }
  std::vector<Intersection> intersections;
  for (const json& ij : j.at("intersections")) {
    Intersection node;
    node.id = ij.at("id");
    node.lost_time_s = ij.at("lost_time");
    for (const json& pj : ij.at("phases")) {
      Phase phase;
      phase.id = pj.at("id");
      phase.min_green_s = pj.value("min_green", 0.0);
      for (const json& mj : pj.at("movements")) {
        phase.movements.push_back({mj.at(0), mj.at(1)});
      }
      node.phases.push_back(phase);
    }
    intersections.push_back(node);
  }
  return Network(std::move(intersections), std::move(links));
}

DemandProfile parse_demand(const json& j) {
  DemandProfile profile;
  for (const json& pj : j.at("periods")) {
    profile.periods.push_back({pj.at("name"), pj.at("start"), pj.at("end")});
  }
  for (const json& aj : j.at("accesses")) {
    AccessFlow access;
    access.id = aj.at("id");
    access.entry_node = aj.at("entry");
    for (const json& link : aj.at("route")) {
      access.route.push_back(link.get<std::string>());
    }
    for (const auto& [period, flow] : aj.at("flows").items()) {
      const double value = flow.get<double>();
      if (value < 0)
        throw Error(ErrorCode::NegativeFlow,
                    "access " + std::to_string(access.id) + " period " +
                        period);
      access.flow_by_period[period] = value;
    }
    profile.accesses.push_back(access);
  }
  return profile;
}

EmissionFactors::Pollutant parse_pollutant(const json& j) {
  EmissionFactors::Pollutant p;
  p.per_km = j.value("per_km", 0.0);
  p.per_idle_s = j.value("per_idle_s", 0.0);
  p.per_stop = j.value("per_stop", 0.0);
  return p;
}

EvaluatorKind parse_evaluator(const std::string& name) {
  if (name == "webster_analytic") return EvaluatorKind::webster_analytic;
  if (name == "mesosim") return EvaluatorKind::mesosim;
  throw Error(ErrorCode::ParseError, "unknown evaluator: " + name);
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  const json j = read_json_file(path);
  Scenario sc;
  try {
    sc.format = j.at("format");
    if (sc.format != 1)
      throw Error(ErrorCode::ParseError,
                  "unsupported scenario format " + std::to_string(sc.format));
    sc.name = j.value("name", "scenario");
    sc.network = parse_network(j.at("network"));
    sc.demand = parse_demand(j.at("demand"));

    const json& obj = j.at("objectives");
    if (obj.contains("primary_matrix_file")) {
      const std::filesystem::path base =
          std::filesystem::path(path).parent_path();
      const json m = read_json_file(
          (base / obj.at("primary_matrix_file").get<std::string>()).string());
      for (const json& row : m) {
        sc.primary_matrix.a.push_back(row.get<std::vector<double>>());
      }
    } else {
      for (const json& row : obj.at("primary_matrix")) {
        sc.primary_matrix.a.push_back(row.get<std::vector<double>>());
      }
    }
    sc.cr_threshold = obj.value("cr_threshold", 0.1);
    if (obj.contains("sub_weights_f") && !obj.at("sub_weights_f").is_null())
      sc.sub_weights_f = obj.at("sub_weights_f").get<std::vector<double>>();
    if (obj.contains("sub_weights_n") && !obj.at("sub_weights_n").is_null())
      sc.sub_weights_n = obj.at("sub_weights_n").get<std::vector<double>>();

    if (j.contains("sim")) {
      const json& sj = j.at("sim");
      sc.sim.dt_s = sj.value("dt", 1.0);
      sc.sim.horizon_s = sj.value("horizon", 0.0);
      sc.sim.warmup_s = sj.value("warmup", 300.0);
      sc.sim.stop_speed_threshold_kmh = sj.value("stop_speed_threshold", 5.0);
      sc.sim.interval_s = sj.value("interval", 300.0);
      sc.sim.seed = sj.value("seed", 42);
      sc.injection_mode = sj.value("injection_mode", std::string("uniform")) ==
                                  "poisson"
                              ? InjectionMode::poisson
                              : InjectionMode::uniform;
    }
    if (j.contains("emissions")) {
      const json& ej = j.at("emissions");
      sc.emissions.co2 = parse_pollutant(ej.at("co2"));
      sc.emissions.nox = parse_pollutant(ej.at("nox"));
      sc.emissions.voc = parse_pollutant(ej.at("voc"));
      sc.emissions.fuel = parse_pollutant(ej.at("fuel"));
    }
    if (j.contains("ga")) {
      const json& gj = j.at("ga");
      sc.ga.population_size = gj.value("population", 50);
      sc.ga.generations = gj.value("generations", 100);
      sc.ga.tournament_size = gj.value("tournament", 3);
      sc.ga.crossover_rate = gj.value("crossover_rate", 0.9);
      sc.ga.mutation_rate = gj.value("mutation_rate", 0.1);
      sc.ga.elitism = gj.value("elitism", 2);
      sc.ga.seed = gj.value("seed", 1);
      sc.ga.c_min = gj.value("c_min", 40.0);
      sc.ga.c_max = gj.value("c_max", 180.0);
      sc.webster.x_max = gj.value("x_max", 0.9);
      if (gj.contains("webster_variant"))
        sc.webster.variant =
            gj.at("webster_variant") == "classical"
                ? WebsterVariant::classical
                : WebsterVariant::as_printed;
      sc.ga_evaluator =
          parse_evaluator(gj.value("evaluator", std::string("mesosim")));
      sc.oversaturation_penalty = gj.value("oversaturation_penalty", 1000.0);
    }
    if (j.contains("dao")) {
      const json& dj = j.at("dao");
      sc.dao.eta = dj.value("eta", 1.0);
      sc.dao.weight_floor = dj.value("weight_floor", 1e-6);
      sc.dao.c_min = sc.ga.c_min;
      sc.dao.c_max = sc.ga.c_max;
      sc.dao_rounds = dj.value("rounds", 20);
      sc.dao_evaluator = parse_evaluator(
          dj.value("evaluator", std::string("webster_analytic")));
    } else {
      sc.dao.c_min = sc.ga.c_min;
      sc.dao.c_max = sc.ga.c_max;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string(path) + ": " + e.what());
  }
  return sc;
}

std::vector<std::string> validate_scenario(const Scenario& sc) {
  std::vector<std::string> issues = validate_network(sc.network).issues;
  const auto demand_issues = validate_demand(sc.demand, sc.network);
  issues.insert(issues.end(), demand_issues.begin(), demand_issues.end());
  try {
    ahp_weights(sc.primary_matrix);
    const double cr = consistency_ratio(sc.primary_matrix);
    if (cr > sc.cr_threshold)
      issues.push_back("importance matrix fails the consistency test: CR = " +
                       std::to_string(cr));
  } catch (const Error& e) {
    issues.push_back(std::string("importance matrix invalid: ") + e.what());
  }
  for (const auto& [tag, sub] :
       {std::pair{"sub_weights_f", sc.sub_weights_f},
        std::pair{"sub_weights_n", sc.sub_weights_n}}) {
    if (sub && sub->size() != 4)
      issues.push_back(std::string(tag) + " must have 4 entries");
  }
  if (sc.sim.dt_s <= 0) issues.push_back("sim dt must be positive");
  return issues;
}

ControlPlan scenario_baseline(const Scenario& sc, const std::string& period) {
  return baseline_plan(sc.network, sc.demand, period, sc.webster, sc.ga.c_min,
                       sc.ga.c_max);
}

int configured_threads() {
  const char* env = std::getenv("TIDALFLOW_THREADS");
  if (!env) return 0;
  return std::max(0, std::atoi(env));
}

EvalContext build_context(const Scenario& sc, const std::string& period,
                          EvaluatorKind evaluator) {
  const Period* p = sc.demand.find_period(period);
  if (!p) throw Error(ErrorCode::ParseError, "unknown period: " + period);

  EvalContext ctx;
  ctx.net = &sc.network;
  ctx.demand = &sc.demand;
  ctx.period = period;
  ctx.evaluator = evaluator;
  ctx.sim = sc.sim;
  if (ctx.sim.horizon_s <= 0) ctx.sim.horizon_s = p->end_s - p->start_s;
  ctx.emissions = sc.emissions;
  ctx.webster = sc.webster;
  ctx.oversaturation_penalty = sc.oversaturation_penalty;
  ctx.threads = configured_threads();
  ctx.schedule =
      to_injection_schedule(sc.demand, period, ctx.sim.dt_s,
                            sc.injection_mode, ctx.sim.seed,
                            sc.network.version());

  ctx.primary = ahp_weights(sc.primary_matrix);
  ctx.primary.labels = {"z_f", "z_n"};

  const ControlPlan baseline = scenario_baseline(sc, period);
  std::vector<IntervalSample> samples;
  Indicators refs;
  if (evaluator == EvaluatorKind::mesosim) {
    refs = simulated_indicators(sc.network, baseline, ctx.schedule, ctx.sim,
                                sc.emissions, &samples);
  } else {
    refs = analytic_indicators(sc.network, baseline, sc.demand, period,
                               sc.webster, sc.emissions, nullptr);
  }
  ctx.scaler.refs = refs;
  ctx.scaler.valid = true;

  auto sub_weights = [&](const std::optional<std::vector<double>>& override_w,
                         int offset) {
    WeightVector wv;
    if (override_w) {
      wv.w = *override_w;
      double total = 0.0;
      for (double w : wv.w) total += w;
      for (double& w : wv.w) w /= total;
      return wv;
    }
    if (!samples.empty() && samples.size() >= 2) {
      const IndicatorTable full =
          interval_indicator_table(samples, sc.emissions);
      IndicatorTable half;
      half.directions.assign(4, Direction::cost);
      for (const auto& row : full.rows) {
        half.rows.push_back(std::vector<double>(row.begin() + offset,
                                                row.begin() + offset + 4));
      }
      return entropy_weights(half);
    }
    wv.w.assign(4, 0.25);
    wv.degenerate = true;
    return wv;
  };
  ctx.sub_f = sub_weights(sc.sub_weights_f, 0);
  ctx.sub_f.labels = {"D_s", "C_s", "D_a", "D"};
  ctx.sub_n = sub_weights(sc.sub_weights_n, 4);
  ctx.sub_n.labels = {"E_CO2", "E_NOx", "E_VOC", "E_f"};
  return ctx;
}

std::string metrics_csv_header() {
  return "plan,period,D_s,C_s,D_a,D,E_CO2,E_NOx,E_VOC,E_f,z_f,z_n,PI";
}

std::string metrics_csv_row(const std::string& plan_name,
                            const std::string& period, const Indicators& ind,
                            const PiBreakdown& pb) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%s,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f",
                plan_name.c_str(), period.c_str(), ind.stopped_delay,
                ind.stop_frequency, ind.avg_delay, ind.total_delay, ind.co2,
                ind.nox, ind.voc, ind.fuel, pb.z_f, pb.z_n, pb.pi);
  return buf;
}

// --- serialization -------------------------------------------------------

json plan_to_json(const ControlPlan& plan) {
  json signal = json::object();
  for (const auto& [node, timing] : plan.signal.timings) {
    json greens = json::object();
    for (const auto& [phase, g] : timing.greens) greens[phase] = g;
    signal[node] = {{"cycle", timing.cycle_s},
                    {"offset", timing.offset_s},
                    {"greens", greens}};
  }
  json lanes = json::object();
  for (const auto& [pool, grant] : plan.lanes.grants) lanes[pool] = grant;
  return {{"format", 1}, {"signal", signal}, {"lanes", lanes}};
}

ControlPlan plan_from_json(const json& j) {
  ControlPlan plan;
  try {
    for (const auto& [node, tj] : j.at("signal").items()) {
      SignalTiming timing;
      timing.cycle_s = tj.at("cycle");
      timing.offset_s = tj.value("offset", 0.0);
      for (const auto& [phase, g] : tj.at("greens").items()) {
        timing.greens[phase] = g.get<double>();
      }
      plan.signal.timings[node] = timing;
    }
    if (j.contains("lanes")) {
      for (const auto& [pool, grant] : j.at("lanes").items()) {
        plan.lanes.grants[pool] = grant.get<int>();
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("plan: ") + e.what());
  }
  return plan;
}

void save_plan(const ControlPlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << plan_to_json(plan).dump(2) << "\n";
}

ControlPlan load_plan(const std::string& path) {
  return plan_from_json(read_json_file(path));
}

json ledger_entry_to_json(const LedgerEntry& entry) {
  json candidates = json::array();
  for (const Candidate& c : entry.candidates) {
    candidates.push_back({{"kind", c.kind},
                          {"agent", c.agent_id},
                          {"plan", plan_to_json(c.plan)}});
  }
  return {{"round", entry.round},
          {"candidates", candidates},
          {"pi", entry.pi},
          {"ballots", entry.ballots},
          {"chosen", entry.chosen},
          {"post_weights", entry.post_weights},
          {"prev_hash", entry.prev_hash},
          {"hash", entry.hash}};
}

LedgerEntry ledger_entry_from_json(const json& j) {
  LedgerEntry entry;
  try {
    entry.round = j.at("round");
    for (const json& cj : j.at("candidates")) {
      Candidate c;
      c.kind = cj.at("kind");
      c.agent_id = cj.at("agent");
      c.plan = plan_from_json(cj.at("plan"));
      entry.candidates.push_back(c);
    }
    entry.pi = j.at("pi").get<std::vector<double>>();
    entry.ballots = j.at("ballots").get<std::vector<int>>();
    entry.chosen = j.at("chosen");
    entry.post_weights = j.at("post_weights").get<std::vector<double>>();
    entry.prev_hash = j.at("prev_hash");
    entry.hash = j.at("hash");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("ledger: ") + e.what());
  }
  return entry;
}

void write_ledger(const std::vector<LedgerEntry>& ledger,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  for (const LedgerEntry& entry : ledger) {
    out << ledger_entry_to_json(entry).dump() << "\n";
  }
}

std::vector<LedgerEntry> read_ledger(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::vector<LedgerEntry> ledger;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      ledger.push_back(ledger_entry_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("ledger: ") + e.what());
    }
  }
  return ledger;
}

}  // namespace tidalflow
