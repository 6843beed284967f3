#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "common.hpp"
#include "tidalflow/scenario.hpp"
#include "tidalflow/serialize.hpp"

using namespace tidalflow;

TEST_CASE("bundled scenario loads and validates clean") {
  const Scenario& sc = testutil::bundled_scenario();
  CHECK(sc.format == 1);
  CHECK(sc.name == "linkong");
  CHECK(validate_scenario(sc).empty());
  CHECK(sc.primary_matrix.a ==
        std::vector<std::vector<double>>{{1.0, 4.0}, {0.25, 1.0}});
}

TEST_CASE("malformed scenario files raise ParseError") {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string truncated = (dir / "tf_truncated.scenario").string();
  {
    std::ofstream out(truncated);
    out << "{\"format\": 1, \"name\": \"broken\"";
  }
  try {
    load_scenario(truncated);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
  std::remove(truncated.c_str());

  try {
    load_scenario((dir / "tf_does_not_exist.scenario").string());
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
}

TEST_CASE("negative flows are rejected with the access named") {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string path = (dir / "tf_negative.scenario").string();
  {
    std::ifstream in(TIDALFLOW_SCENARIO);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    const auto pos = text.find("1900");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 4, "-5");
    std::ofstream out(path);
    out << text;
  }
  try {
    load_scenario(path);
    FAIL("expected NegativeFlow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeFlow);
    CHECK(std::string(e.what()).find('1') != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("inconsistent importance matrices fail validation") {
  Scenario sc = testutil::bundled_scenario();
  sc.primary_matrix.a = {{1.0, 2.0, 0.5}, {0.5, 1.0, 2.0}, {2.0, 0.5, 1.0}};
  const auto issues = validate_scenario(sc);
  REQUIRE_FALSE(issues.empty());
  bool mentions_consistency = false;
  for (const auto& issue : issues) {
    if (issue.find("consistency") != std::string::npos)
      mentions_consistency = true;
  }
  CHECK(mentions_consistency);
}

TEST_CASE("build_context pins the baseline at PI = 1") {
  const Scenario& sc = testutil::bundled_scenario();
  for (EvaluatorKind kind :
       {EvaluatorKind::webster_analytic, EvaluatorKind::mesosim}) {
    const EvalContext ctx = build_context(sc, "morning", kind);
    CHECK(ctx.primary.w[0] == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(ctx.primary.w[1] == doctest::Approx(0.2).epsilon(1e-9));
    const PlanScore score =
        evaluate_plan(scenario_baseline(sc, "morning"), ctx);
    CHECK(score.breakdown.pi == doctest::Approx(1.0).epsilon(1e-9));
    double wf = 0.0, wn = 0.0;
    for (double w : ctx.sub_f.w) wf += w;
    for (double w : ctx.sub_n.w) wn += w;
    CHECK(wf == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(wn == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("explicit sub-weight overrides are normalized and honored") {
  Scenario sc = testutil::bundled_scenario();
  sc.sub_weights_f = std::vector<double>{2.0, 1.0, 1.0, 0.0};
  const EvalContext ctx =
      build_context(sc, "evening", EvaluatorKind::webster_analytic);
  CHECK(ctx.sub_f.w[0] == doctest::Approx(0.5));
  CHECK(ctx.sub_f.w[3] == doctest::Approx(0.0));
}

TEST_CASE("plan files round-trip exactly") {
  const Scenario& sc = testutil::bundled_scenario();
  ControlPlan plan = scenario_baseline(sc, "morning");
  plan.lanes.grants["E1"] = 2;
  plan.signal.timings.at("I2").offset_s = 17.25;

  const std::string path =
      (std::filesystem::temp_directory_path() / "tf_plan.json").string();
  save_plan(plan, path);
  const ControlPlan back = load_plan(path);
  CHECK(back.lanes.grants == plan.lanes.grants);
  for (const auto& [node, timing] : plan.signal.timings) {
    const SignalTiming& t = back.signal.timings.at(node);
    CHECK(t.cycle_s == timing.cycle_s);
    CHECK(t.offset_s == timing.offset_s);
    CHECK(t.greens == timing.greens);
  }
  std::remove(path.c_str());
}

TEST_CASE("metrics CSV schema is stable") {
  CHECK(metrics_csv_header() ==
        "plan,period,D_s,C_s,D_a,D,E_CO2,E_NOx,E_VOC,E_f,z_f,z_n,PI");
  Indicators ind{1, 2, 3, 4, 5, 6, 7, 8};
  PiBreakdown pb{0.5, 0.25, 0.45};
  CHECK(metrics_csv_row("p", "morning", ind, pb) ==
        "p,morning,1.000000,2.000000,3.000000,4.000000,5.000000,6.000000,"
        "7.000000,8.000000,0.500000,0.250000,0.450000");
}

TEST_CASE("thread cap honors the environment variable") {
  ::setenv("TIDALFLOW_THREADS", "3", 1);
  CHECK(configured_threads() == 3);
  ::setenv("TIDALFLOW_THREADS", "0", 1);
  CHECK(configured_threads() == 0);
  ::unsetenv("TIDALFLOW_THREADS");
  CHECK(configured_threads() == 0);
}
