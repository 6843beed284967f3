#include <algorithm>
#include <random>

#include "doctest.h"

#include "tidalflow/mcdm.hpp"
#include "tidalflow/mesosim.hpp"

using namespace tidalflow;

TEST_CASE("AHP weights: pinned, uniform, consistent") {
  const WeightVector w = ahp_weights({{{1.0, 4.0}, {0.25, 1.0}}});
  REQUIRE(w.w.size() == 2);
  CHECK(w.w[0] == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(w.w[1] == doctest::Approx(0.2).epsilon(1e-9));

  const WeightVector uniform =
      ahp_weights({{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}});
  for (double v : uniform.w) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-12));

  const WeightVector consistent =
      ahp_weights({{{1.0, 2.0, 4.0}, {0.5, 1.0, 2.0}, {0.25, 0.5, 1.0}}});
  CHECK(consistent.w[0] == doctest::Approx(4.0 / 7).epsilon(1e-12));
  CHECK(consistent.w[1] == doctest::Approx(2.0 / 7).epsilon(1e-12));
  CHECK(consistent.w[2] == doctest::Approx(1.0 / 7).epsilon(1e-12));
}

TEST_CASE("AHP input guards") {
  try {
    ahp_weights({{{1.0, 3.0}, {0.5, 1.0}}});
    FAIL("expected NonReciprocal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonReciprocal);
  }
  try {
    ahp_weights({{{1.0, -2.0}, {-0.5, 1.0}}});
    FAIL("expected NonPositiveEntry");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveEntry);
  }
}

TEST_CASE("AHP invariances") {
  // Weights sum to 1.
  const WeightVector w =
      ahp_weights({{{1.0, 3.0, 5.0}, {1.0 / 3, 1.0, 2.0}, {0.2, 0.5, 1.0}}});
  double total = 0.0;
  for (double v : w.w) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  // Permuting indices permutes weights identically.
  const ImportanceMatrix m{{{1.0, 2.0, 4.0}, {0.5, 1.0, 2.0},
                            {0.25, 0.5, 1.0}}};
  ImportanceMatrix swapped{{{1.0, 0.5, 2.0}, {2.0, 1.0, 4.0},
                            {0.5, 0.25, 1.0}}};  // rows/cols 0 and 1 swapped
  const WeightVector a = ahp_weights(m);
  const WeightVector b = ahp_weights(swapped);
  CHECK(a.w[0] == doctest::Approx(b.w[1]).epsilon(1e-12));
  CHECK(a.w[1] == doctest::Approx(b.w[0]).epsilon(1e-12));
  CHECK(a.w[2] == doctest::Approx(b.w[2]).epsilon(1e-12));
}

TEST_CASE("consistency ratio") {
  CHECK(consistency_ratio({{{1.0, 7.0}, {1.0 / 7, 1.0}}}) == 0.0);
  CHECK(consistency_ratio({{{1.0, 2.0, 4.0}, {0.5, 1.0, 2.0},
                            {0.25, 0.5, 1.0}}}) ==
        doctest::Approx(0.0).epsilon(1e-8));
  // Cyclic judgments: equal row products give lambda_max = 3.5 exactly,
  // so CR = ((3.5 - 3)/2) / 0.58.
  const double cr = consistency_ratio(
      {{{1.0, 2.0, 0.5}, {0.5, 1.0, 2.0}, {2.0, 0.5, 1.0}}});
  CHECK(cr == doctest::Approx(0.25 / 0.58).epsilon(1e-6));
  CHECK(cr > 0.1);

  ImportanceMatrix big;
  big.a.assign(11, std::vector<double>(11, 1.0));
  try {
    consistency_ratio(big);
    FAIL("expected DimensionTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionTooLarge);
  }
}

TEST_CASE("entropy weights: constant column gets zero weight") {
  IndicatorTable t;
  t.directions = {Direction::cost, Direction::cost};
  t.rows = {{5.0, 1.0}, {5.0, 2.0}, {5.0, 9.0}};
  const WeightVector w = entropy_weights(t);
  CHECK(w.w[0] == doctest::Approx(0.0));
  CHECK(w.w[1] == doctest::Approx(1.0));
  CHECK_FALSE(w.degenerate);
}

TEST_CASE("entropy weights: pinned hand-computed table") {
  IndicatorTable t;
  t.directions = {Direction::cost, Direction::cost};
  t.rows = {{1.0, 10.0}, {2.0, 2.0}, {3.0, 1.0}};
  const WeightVector w = entropy_weights(t);
  CHECK(w.w[0] == doctest::Approx(0.531578435139).epsilon(1e-9));
  CHECK(w.w[1] == doctest::Approx(0.468421564861).epsilon(1e-9));
}

TEST_CASE("entropy weights: symmetric columns tie") {
  IndicatorTable t;
  t.directions = {Direction::cost, Direction::cost};
  t.rows = {{1.0, 3.0}, {2.0, 2.0}, {3.0, 1.0}};  // same column, rows flipped
  const WeightVector w = entropy_weights(t);
  CHECK(w.w[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w.w[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("entropy weights: row permutation invariance") {
  IndicatorTable t;
  t.directions = {Direction::cost, Direction::benefit, Direction::cost};
  t.rows = {{1, 7, 2}, {4, 2, 2}, {2, 5, 9}, {8, 1, 4}};
  IndicatorTable shuffled = t;
  std::mt19937 rng(3);
  std::shuffle(shuffled.rows.begin(), shuffled.rows.end(), rng);
  const WeightVector a = entropy_weights(t);
  const WeightVector b = entropy_weights(shuffled);
  for (std::size_t j = 0; j < a.w.size(); ++j) {
    CHECK(a.w[j] == doctest::Approx(b.w[j]).epsilon(1e-12));
  }
}

TEST_CASE("entropy weights: duplicate rows do not change the ranking") {
  IndicatorTable t;
  t.directions = {Direction::cost, Direction::cost};
  t.rows = {{1.0, 10.0}, {2.0, 2.0}, {3.0, 1.0}};
  IndicatorTable doubled = t;
  doubled.rows.insert(doubled.rows.end(), t.rows.begin(), t.rows.end());
  const WeightVector a = entropy_weights(t);
  const WeightVector b = entropy_weights(doubled);
  CHECK((a.w[0] > a.w[1]) == (b.w[0] > b.w[1]));
}

TEST_CASE("entropy weights: degenerate all-constant table") {
  IndicatorTable t;
  t.directions = {Direction::cost, Direction::cost};
  t.rows = {{5.0, 3.0}, {5.0, 3.0}, {5.0, 3.0}};
  const WeightVector w = entropy_weights(t);
  CHECK(w.degenerate);
  CHECK(w.w[0] == doctest::Approx(0.5));
  CHECK(w.w[1] == doctest::Approx(0.5));
}

namespace {

WeightVector wv(std::vector<double> w) {
  WeightVector v;
  v.w = std::move(w);
  return v;
}

Scaler unit_scaler() {
  Scaler s;
  s.refs = {1, 1, 1, 1, 1, 1, 1, 1};
  s.valid = true;
  return s;
}

}  // namespace

TEST_CASE("performance index endpoints and arithmetic") {
  const WeightVector primary = wv({0.8, 0.2});
  const WeightVector quarter = wv({0.25, 0.25, 0.25, 0.25});
  const Scaler scaler = unit_scaler();

  Indicators at_ref{1, 1, 1, 1, 1, 1, 1, 1};
  const PiBreakdown top =
      performance_breakdown(at_ref, primary, quarter, quarter, scaler);
  CHECK(top.z_f == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(top.z_n == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(top.pi == doctest::Approx(1.0).epsilon(1e-12));

  Indicators zero{};
  CHECK(performance_index(zero, primary, quarter, quarter, scaler) ==
        doctest::Approx(0.0));

  Indicators half{0.5, 0.5, 0.5, 0.5, 1, 1, 1, 1};  // z_f 0.5, z_n 1.0
  CHECK(performance_index(half, primary, quarter, quarter, scaler) ==
        doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("PI is monotone in every raw indicator") {
  const WeightVector primary = wv({0.8, 0.2});
  const WeightVector quarter = wv({0.25, 0.25, 0.25, 0.25});
  const Scaler scaler = unit_scaler();
  const Indicators base{2, 1, 3, 4, 5, 1, 2, 3};
  const double pi0 = performance_index(base, primary, quarter, quarter, scaler);
  for (int k = 0; k < 8; ++k) {
    Indicators bumped = base;
    double* fields[8] = {&bumped.stopped_delay, &bumped.stop_frequency,
                         &bumped.avg_delay,     &bumped.total_delay,
                         &bumped.co2,           &bumped.nox,
                         &bumped.voc,           &bumped.fuel};
    *fields[k] += 1.0;
    CHECK(performance_index(bumped, primary, quarter, quarter, scaler) >= pi0);
  }
}

TEST_CASE("PI lies between z_f and z_n for convex primary weights") {
  const WeightVector quarter = wv({0.25, 0.25, 0.25, 0.25});
  const Scaler scaler = unit_scaler();
  const Indicators ind{2, 1, 3, 4, 5, 1, 2, 3};
  for (double gf : {0.0, 0.3, 0.8, 1.0}) {
    const PiBreakdown b = performance_breakdown(
        ind, wv({gf, 1.0 - gf}), quarter, quarter, scaler);
    CHECK(b.pi >= std::min(b.z_f, b.z_n) - 1e-12);
    CHECK(b.pi <= std::max(b.z_f, b.z_n) + 1e-12);
    CHECK(b.pi == doctest::Approx(gf * b.z_f + (1 - gf) * b.z_n));
  }
}

TEST_CASE("PI guards") {
  const WeightVector primary = wv({0.8, 0.2});
  const WeightVector quarter = wv({0.25, 0.25, 0.25, 0.25});
  const Indicators ind{1, 1, 1, 1, 1, 1, 1, 1};
  try {
    performance_index(ind, primary, quarter, quarter, Scaler{});
    FAIL("expected MissingScaler");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingScaler);
  }
  try {
    performance_index(ind, primary, wv({0.5, 0.5}), quarter, unit_scaler());
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("PI from simulator metric types") {
  SimMetrics m;
  m.stopped_delay_s = 1.0;
  m.stops_per_vehicle = 1.0;
  m.avg_delay_s = 1.0;
  m.total_delay_s = 1.0;
  EmissionReport e{1.0, 1.0, 1.0, 1.0};
  CHECK(performance_index(m, e, wv({0.8, 0.2}),
                          wv({0.25, 0.25, 0.25, 0.25}),
                          wv({0.25, 0.25, 0.25, 0.25}), unit_scaler()) ==
        doctest::Approx(1.0));
}
