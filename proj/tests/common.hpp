#pragma once

// Shared fixtures: a tiny one-signal network with a reversible pair, and
// the bundled corridor scenario loaded once per process.

#include <string>

#include "tidalflow/eval.hpp"
#include "tidalflow/scenario.hpp"

namespace testutil {

// One signalized node X. Approach A (2 lanes, 1 reversible, paired with
// the outbound twin B) conflicts with side approach Cs. Two phases.
inline tidalflow::Network single_intersection(bool closable = false) {
  using namespace tidalflow;
  std::vector<Link> links;
  Link a{"A", "nA", "X", 500.0, 2, 1, 1600.0, 50.0, std::string("B"), closable};
  Link b{"B", "X", "nA", 500.0, 2, 1, 1600.0, 50.0, std::string("A"), closable};
  Link c{"Cs", "nC", "X", 400.0, 1, 0, 1600.0, 40.0, std::nullopt, false};
  Link ao{"AO", "X", "oA", 500.0, 2, 0, 1600.0, 50.0, std::nullopt, false};
  Link co{"CO", "X", "oC", 400.0, 1, 0, 1600.0, 40.0, std::nullopt, false};
  links = {a, b, c, ao, co};

  Intersection x;
  x.id = "X";
  x.lost_time_s = 8.0;
  x.phases = {{"P1", {{"A", "AO"}}, 5.0}, {"P2", {{"Cs", "CO"}}, 5.0}};
  return Network({x}, links);
}

inline tidalflow::DemandProfile single_intersection_demand(double main_veh_h,
                                                           double side_veh_h) {
  tidalflow::DemandProfile d;
  d.periods = {{"peak", 0.0, 3600.0}};
  d.accesses = {{1, "nA", {"A", "AO"}, {{"peak", main_veh_h}}},
                {2, "nC", {"Cs", "CO"}, {{"peak", side_veh_h}}}};
  return d;
}

inline const tidalflow::Scenario& bundled_scenario() {
  static const tidalflow::Scenario sc =
      tidalflow::load_scenario(TIDALFLOW_SCENARIO);
  return sc;
}

}  // namespace testutil
