#include <array>
#include <cmath>

#include "doctest.h"

#include "common.hpp"
#include "tidalflow/eval.hpp"
#include "tidalflow/mesosim.hpp"
#include "tidalflow/webster.hpp"

using namespace tidalflow;

namespace {

// One uncontrolled link from a source to a sink; no intersections.
Network free_link() {
  Link l{"L", "src", "dst", 1000.0, 2, 0, 1800.0, 36.0, std::nullopt, false};
  return Network({}, {l});
}

ControlPlan single_plan(const Network& net, double cycle, double g1,
                        double g2, double offset = 0.0) {
  ControlPlan plan;
  plan.lanes = balanced_allocation(net);
  SignalTiming t;
  t.cycle_s = cycle;
  t.greens = {{"P1", g1}, {"P2", g2}};
  t.offset_s = offset;
  plan.signal.timings["X"] = t;
  return plan;
}

Schedule uniform_schedule(const DemandProfile& d, const std::string& period,
                          const Network& net, double dt = 1.0) {
  return to_injection_schedule(d, period, dt, InjectionMode::uniform, 0,
                               net.version());
}

}  // namespace

TEST_CASE("zero demand gives all-zero metrics") {
  const Network net = free_link();
  DemandProfile d;
  d.periods = {{"p", 0.0, 600.0}};
  d.accesses = {{1, "src", {"L"}, {{"p", 0.0}}}};
  SimConfig cfg;
  cfg.horizon_s = 600.0;
  cfg.warmup_s = 0.0;
  const SimMetrics m =
      run_simulation(net, ControlPlan{}, uniform_schedule(d, "p", net), cfg);
  CHECK(m.total_delay_s == 0.0);
  CHECK(m.stopped_delay_s == 0.0);
  CHECK(m.stops_per_vehicle == 0.0);
  CHECK(m.vkt == 0.0);
  CHECK(m.departures == 0);
}

TEST_CASE("uncontrolled link: free flow, zero delay, exact departures") {
  const Network net = free_link();
  DemandProfile d;
  d.periods = {{"p", 0.0, 600.0}};
  d.accesses = {{1, "src", {"L"}, {{"p", 600.0}}}};  // 100 vehicles
  SimConfig cfg;
  cfg.horizon_s = 800.0;  // free-flow time is 100 s; all clear the link
  cfg.warmup_s = 0.0;
  const SimMetrics m =
      run_simulation(net, ControlPlan{}, uniform_schedule(d, "p", net), cfg);
  CHECK(m.departures == 100);
  CHECK(m.total_delay_s == doctest::Approx(0.0));
  CHECK(m.vkt == doctest::Approx(100.0));  // 100 vehicles x 1 km
}

TEST_CASE("red blocks discharge; green obeys the capacity accumulator") {
  const Network net = testutil::single_intersection();
  // Effective A capacity: 2 lanes x 1600 = 3200 veh/h = 8/9 veh/s. Use a
  // plan and a burst that leave vehicles queued through a full red.
  const ControlPlan plan = single_plan(net, 60.0, 26.0, 26.0);
  DemandProfile d;
  d.periods = {{"p", 0.0, 10.0}};
  d.accesses = {{1, "nA", {"A", "AO"}, {{"p", 1800.0}}},  // 5 vehicles
                {2, "nC", {"Cs", "CO"}, {{"p", 0.0}}}};
  SimConfig cfg;
  cfg.horizon_s = 300.0;
  cfg.warmup_s = 0.0;
  Simulator sim(net, plan, uniform_schedule(d, "p", net), cfg);
  long prev_departed = 0;
  while (!sim.done()) {
    sim.step();
    // Conservation, exactly, at every step.
    CHECK(sim.injected() == sim.departed() + sim.in_network());
    CHECK(sim.in_network() == sim.queued_vehicles());
    CHECK(sim.departed() >= prev_departed);
    prev_departed = sim.departed();
  }
  CHECK(sim.departed() == 5);
}

TEST_CASE("saturation 0.5 veh per step discharges one vehicle every 2 steps") {
  // Single approach, 1 lane at 1800 veh/h with dt = 1 would be 0.5 veh/s.
  Link a{"A", "nA", "X", 100.0, 1, 0, 1800.0, 360.0, std::nullopt, false};
  Link ao{"AO", "X", "oA", 100.0, 1, 0, 1800.0, 360.0, std::nullopt, false};
  Intersection x;
  x.id = "X";
  x.lost_time_s = 0.0;
  x.phases = {{"P1", {{"A", "AO"}}, 0.0}};
  const Network net({x}, {a, ao});

  ControlPlan plan;
  plan.lanes = balanced_allocation(net);
  SignalTiming t;
  t.cycle_s = 1000.0;  // effectively always green
  t.greens = {{"P1", 1000.0}};
  plan.signal.timings["X"] = t;

  DemandProfile d;
  d.periods = {{"p", 0.0, 2.0}};
  d.accesses = {{1, "nA", {"A", "AO"}, {{"p", 18000.0}}}};  // 10 at once
  SimConfig cfg;
  cfg.dt_s = 1.0;
  cfg.horizon_s = 60.0;
  cfg.warmup_s = 0.0;
  Simulator sim(net, plan, uniform_schedule(d, "p", net), cfg);
  // Free-flow time is 1 s; after arrival the queue drains at 1800 veh/h
  // x 1 s = 0.5 veh per step: exactly one departure every other step.
  std::vector<long> departed;
  while (!sim.done()) {
    sim.step();
    departed.push_back(sim.departed());
  }
  CHECK(departed.back() == 10);
  for (std::size_t i = 1; i < departed.size(); ++i) {
    CHECK(departed[i] - departed[i - 1] <= 1);  // never bursts
  }
  // 10 vehicles at 0.5 veh/s take 20 green seconds to clear.
  long cleared_at = -1;
  for (std::size_t i = 0; i < departed.size(); ++i) {
    if (departed[i] == 10) {
      cleared_at = static_cast<long>(i);
      break;
    }
  }
  CHECK(cleared_at >= 20);
  CHECK(cleared_at <= 23);
}

TEST_CASE("infeasible plans and stale schedules are rejected") {
  const Network net = testutil::single_intersection();
  DemandProfile d;
  d.periods = {{"p", 0.0, 100.0}};
  d.accesses = {{1, "nA", {"A", "AO"}, {{"p", 100.0}}}};
  const Schedule sched = uniform_schedule(d, "p", net);
  SimConfig cfg;
  cfg.horizon_s = 100.0;
  cfg.warmup_s = 0.0;

  ControlPlan bad = single_plan(net, 60.0, 30.0, 30.0);  // sum != C - L
  try {
    Simulator sim(net, bad, sched, cfg);
    FAIL("expected InfeasiblePlan");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasiblePlan);
  }

  Schedule stale = sched;
  stale.network_version = net.version() + 7;
  try {
    Simulator sim(net, single_plan(net, 60.0, 26.0, 26.0), stale, cfg);
    FAIL("expected InfeasiblePlan");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasiblePlan);
  }
}

TEST_CASE("determinism: identical inputs give bit-identical metrics") {
  const Network net = testutil::single_intersection();
  const ControlPlan plan = single_plan(net, 60.0, 30.0, 22.0);
  const DemandProfile d = testutil::single_intersection_demand(700.0, 150.0);
  const Schedule sched = uniform_schedule(d, "peak", net);
  SimConfig cfg;
  cfg.horizon_s = 3600.0;
  const SimMetrics a = run_simulation(net, plan, sched, cfg);
  const SimMetrics b = run_simulation(net, plan, sched, cfg);
  CHECK(a.total_delay_s == b.total_delay_s);
  CHECK(a.stopped_delay_s == b.stopped_delay_s);
  CHECK(a.vkt == b.vkt);
  CHECK(a.total_stops == b.total_stops);
  CHECK(a.departures == b.departures);
}

TEST_CASE("metric identities: D >= D_s, D_a * departures = D") {
  const Network net = testutil::single_intersection();
  const ControlPlan plan = single_plan(net, 60.0, 30.0, 22.0);
  const DemandProfile d = testutil::single_intersection_demand(900.0, 250.0);
  SimConfig cfg;
  cfg.horizon_s = 3600.0;
  const SimMetrics m =
      run_simulation(net, plan, uniform_schedule(d, "peak", net), cfg);
  CHECK(m.total_delay_s >= m.stopped_delay_s);
  CHECK(m.stopped_delay_s >= 0.0);
  REQUIRE(m.departures > 0);
  CHECK(m.avg_delay_s * m.departures ==
        doctest::Approx(m.total_delay_s).epsilon(1e-9));
  CHECK(m.arrivals >= m.departures);
}

TEST_CASE("more green for the loaded phase never hurts it") {
  const Network net = testutil::single_intersection();
  const DemandProfile d = testutil::single_intersection_demand(800.0, 0.0);
  const Schedule sched = uniform_schedule(d, "peak", net);
  SimConfig cfg;
  cfg.horizon_s = 3600.0;
  double prev = 1e18;
  for (double g1 : {20.0, 28.0, 36.0, 44.0}) {
    const ControlPlan plan = single_plan(net, 60.0, g1, 52.0 - g1);
    const SimMetrics m = run_simulation(net, plan, sched, cfg);
    CHECK(m.total_delay_s <= prev + 1e-9);
    prev = m.total_delay_s;
  }
}

TEST_CASE("undersaturated delay lands near the classical analytic value") {
  const Network net = testutil::single_intersection();
  const DemandProfile d = testutil::single_intersection_demand(540.0, 180.0);
  const Schedule sched = uniform_schedule(d, "peak", net);
  SimConfig cfg;
  cfg.horizon_s = 3900.0;
  cfg.warmup_s = 300.0;
  const ControlPlan plan = single_plan(net, 60.0, 30.0, 22.0);
  const SimMetrics m = run_simulation(net, plan, sched, cfg);

  WebsterConfig classical;
  classical.variant = WebsterVariant::classical;
  const double sA = 2.0 * 1600.0 / 3600.0;
  const double sC = 1.0 * 1600.0 / 3600.0;
  const double lamA = 30.0 / 60.0, lamC = 22.0 / 60.0;
  const double qA = 540.0 / 3600.0, qC = 180.0 / 3600.0;
  const std::array<MovementInput, 2> mv{
      MovementInput{qA, lamA * sA, lamA, qA / (lamA * sA)},
      MovementInput{qC, lamC * sC, lamC, qC / (lamC * sC)}};
  const double analytic = webster_delay({mv.data(), 2}, 60.0, classical);
  CHECK(m.avg_delay_s ==
        doctest::Approx(analytic).epsilon(0.20));  // different models
}

TEST_CASE("emission surrogate: zeros, linearity, annihilation") {
  EmissionFactors f;
  f.co2 = {180.0, 0.9, 2.0};
  f.nox = {0.4, 0.002, 0.005};
  f.voc = {0.25, 0.0015, 0.004};
  f.fuel = {0.07, 0.0003, 0.0008};

  const EmissionReport zero = estimate_emissions(SimMetrics{}, f);
  CHECK(zero.co2 == 0.0);
  CHECK(zero.fuel == 0.0);

  SimMetrics m;
  m.vkt = 100.0;
  m.idle_time_s = 50.0;
  m.total_stops = 10;
  const EmissionReport base = estimate_emissions(m, f);
  SimMetrics doubled = m;
  doubled.vkt = 200.0;
  const EmissionReport more = estimate_emissions(doubled, f);
  CHECK(more.co2 - base.co2 == doctest::Approx(180.0 * 100.0));
  CHECK(more.nox - base.nox == doctest::Approx(0.4 * 100.0));

  const EmissionReport none = estimate_emissions(m, EmissionFactors{});
  CHECK(none.co2 == 0.0);
  CHECK(none.voc == 0.0);
}

TEST_CASE("interval samples cover the run and feed the weight table") {
  const Network net = testutil::single_intersection();
  const ControlPlan plan = single_plan(net, 60.0, 30.0, 22.0);
  const DemandProfile d = testutil::single_intersection_demand(700.0, 150.0);
  SimConfig cfg;
  cfg.horizon_s = 3600.0;
  cfg.warmup_s = 300.0;
  cfg.interval_s = 300.0;
  Simulator sim(net, plan, uniform_schedule(d, "peak", net), cfg);
  sim.run();
  CHECK(sim.interval_samples().size() == 11);  // (3600 - 300) / 300
  const IndicatorTable table =
      interval_indicator_table(sim.interval_samples(), EmissionFactors{});
  CHECK(table.rows.size() == sim.interval_samples().size());
  CHECK(table.directions.size() == 8);
}
