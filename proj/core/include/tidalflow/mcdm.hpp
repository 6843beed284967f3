#pragma once

#include <string>
#include <vector>

#include "tidalflow/error.hpp"

namespace tidalflow {

struct SimMetrics;
struct EmissionReport;

/// Pairwise comparison matrix: positive, reciprocal, unit diagonal.
struct ImportanceMatrix {
  std::vector<std::vector<double>> a;
  int n() const { return static_cast<int>(a.size()); }
};

struct WeightVector {
  std::vector<double> w;
  std::vector<std::string> labels;
  bool degenerate = false;  // set when a fallback (uniform) was used
};

enum class Direction { cost, benefit };

/// Rows are observations, columns are indicators.
struct IndicatorTable {
  std::vector<std::vector<double>> rows;
  std::vector<Direction> directions;
};

/// Row-geometric-mean priority weights, normalized to sum 1.
WeightVector ahp_weights(const ImportanceMatrix& m);

/// Saaty consistency ratio via power-iteration principal eigenvalue.
/// Defined 0 for n <= 2; throws DimensionTooLarge for n > 10.
double consistency_ratio(const ImportanceMatrix& m);

/// Entropy weights: min-max normalize per column by direction, column
/// entropy e_j, divergence d_j = 1 - e_j, weights d_j / sum(d).
/// All-constant tables return uniform weights with `degenerate` set.
WeightVector entropy_weights(const IndicatorTable& table);

/// The eight sub-indicators feeding the performance index, all costs.
struct Indicators {
  double stopped_delay = 0.0;    // D_s, veh-s
  double stop_frequency = 0.0;   // C_s, stops/veh
  double avg_delay = 0.0;        // D_a, s/veh
  double total_delay = 0.0;      // D, veh-s
  double co2 = 0.0;
  double nox = 0.0;
  double voc = 0.0;
  double fuel = 0.0;

  std::vector<double> efficiency() const {
    return {stopped_delay, stop_frequency, avg_delay, total_delay};
  }
  std::vector<double> emissions() const { return {co2, nox, voc, fuel}; }
};

/// Per-indicator reference values; indicators are scored as value / ref.
struct Scaler {
  Indicators refs;
  bool valid = false;
};

struct PiBreakdown {
  double z_f = 0.0;
  double z_n = 0.0;
  double pi = 0.0;
};

/// PI = gamma_f * z_f + gamma_n * z_n on scaled indicators; lower is better.
PiBreakdown performance_breakdown(const Indicators& ind,
                                  const WeightVector& primary,
                                  const WeightVector& sub_f,
                                  const WeightVector& sub_n,
                                  const Scaler& scaler);

double performance_index(const Indicators& ind, const WeightVector& primary,
                         const WeightVector& sub_f, const WeightVector& sub_n,
                         const Scaler& scaler);

double performance_index(const SimMetrics& m, const EmissionReport& e,
                         const WeightVector& primary,
                         const WeightVector& sub_f, const WeightVector& sub_n,
                         const Scaler& scaler);

}  // namespace tidalflow
