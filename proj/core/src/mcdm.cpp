#include "tidalflow/mcdm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tidalflow/mesosim.hpp"

namespace tidalflow {

namespace {

void check_matrix(const ImportanceMatrix& m) {
  const int n = m.n();
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(m.a[i].size()) != n)
      throw Error(ErrorCode::NonReciprocal, "matrix is not square");
    for (int j = 0; j < n; ++j) {
      if (m.a[i][j] <= 0.0)
        throw Error(ErrorCode::NonPositiveEntry,
                    "a[" + std::to_string(i) + "][" + std::to_string(j) + "]");
      if (std::abs(m.a[i][j] * m.a[j][i] - 1.0) > 1e-9)
        throw Error(ErrorCode::NonReciprocal,
                    "a[" + std::to_string(i) + "][" + std::to_string(j) +
                        "] is not the reciprocal of its mirror");
    }
  }
}

// Saaty random consistency index.
double random_index(int n) {
  static const double table[] = {0.0,  0.0,  0.0,  0.58, 0.90, 1.12,
                                 1.24, 1.32, 1.41, 1.45, 1.49};
  return table[n];
}

}  // namespace

WeightVector ahp_weights(const ImportanceMatrix& m) {
  check_matrix(m);
  const int n = m.n();
  std::vector<double> gm(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double log_sum = 0.0;
    for (int j = 0; j < n; ++j) log_sum += std::log(m.a[i][j]);
    gm[i] = std::exp(log_sum / n);
    total += gm[i];
  }
  WeightVector out;
  out.w.resize(n);
  for (int i = 0; i < n; ++i) out.w[i] = gm[i] / total;
  return out;
}

double consistency_ratio(const ImportanceMatrix& m) {
  check_matrix(m);
  const int n = m.n();
  if (n > 10) throw Error(ErrorCode::DimensionTooLarge, std::to_string(n));
  if (n <= 2) return 0.0;

  // Power iteration for the principal eigenvalue of a positive matrix.
  std::vector<double> v(n, 1.0 / n), next(n);
  double lambda = 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    for (int i = 0; i < n; ++i) {
      next[i] = 0.0;
      for (int j = 0; j < n; ++j) next[i] += m.a[i][j] * v[j];
    }
    const double norm = std::accumulate(next.begin(), next.end(), 0.0);
    for (int i = 0; i < n; ++i) next[i] /= norm;
    // Rayleigh-style estimate: (Av)_i / v_i averaged over components.
    double estimate = 0.0;
    for (int i = 0; i < n; ++i) {
      double avi = 0.0;
      for (int j = 0; j < n; ++j) avi += m.a[i][j] * next[j];
      estimate += avi / next[i];
    }
    estimate /= n;
    if (std::abs(estimate - lambda) < 1e-10) {
      lambda = estimate;
      break;
    }
    lambda = estimate;
    v = next;
  }
  const double ci = (lambda - n) / (n - 1);
  return ci / random_index(n);
}

WeightVector entropy_weights(const IndicatorTable& table) {
  const int n = static_cast<int>(table.rows.size());
  const int m = static_cast<int>(table.directions.size());
  if (n < 2) throw Error(ErrorCode::DegenerateTable, "need at least 2 rows");
  for (const auto& row : table.rows) {
    if (static_cast<int>(row.size()) != m)
      throw Error(ErrorCode::ShapeMismatch, "ragged indicator table");
  }

  std::vector<double> divergence(m, 0.0);
  for (int j = 0; j < m; ++j) {
    double lo = table.rows[0][j], hi = table.rows[0][j];
    for (int i = 1; i < n; ++i) {
      lo = std::min(lo, table.rows[i][j]);
      hi = std::max(hi, table.rows[i][j]);
    }
    if (hi - lo <= 0.0) continue;  // constant column: entropy 1, d_j = 0
    std::vector<double> scaled(n);
    double col_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = table.rows[i][j];
      scaled[i] = table.directions[j] == Direction::benefit
                      ? (x - lo) / (hi - lo)
                      : (hi - x) / (hi - lo);
      col_sum += scaled[i];
    }
    double entropy = 0.0;
    for (int i = 0; i < n; ++i) {
      const double p = scaled[i] / col_sum;
      if (p > 0.0) entropy -= p * std::log(p);
    }
    entropy /= std::log(static_cast<double>(n));
    divergence[j] = 1.0 - entropy;
  }

  WeightVector out;
  const double total = std::accumulate(divergence.begin(), divergence.end(), 0.0);
  if (total <= 0.0) {
    out.w.assign(m, 1.0 / m);
    out.degenerate = true;
    return out;
  }
  out.w.resize(m);
  for (int j = 0; j < m; ++j) out.w[j] = divergence[j] / total;
  return out;
}

PiBreakdown performance_breakdown(const Indicators& ind,
                                  const WeightVector& primary,
                                  const WeightVector& sub_f,
                                  const WeightVector& sub_n,
                                  const Scaler& scaler) {
  if (!scaler.valid)
    throw Error(ErrorCode::MissingScaler, "no reference values configured");
  if (primary.w.size() != 2 || sub_f.w.size() != 4 || sub_n.w.size() != 4)
    throw Error(ErrorCode::ShapeMismatch, "weight vector lengths");

  auto scaled = [](double value, double ref) {
    if (ref <= 0.0) return value <= 0.0 ? 0.0 : value;
    return value / ref;
  };
  const std::vector<double> f = ind.efficiency();
  const std::vector<double> f_ref = scaler.refs.efficiency();
  const std::vector<double> n = ind.emissions();
  const std::vector<double> n_ref = scaler.refs.emissions();

  PiBreakdown out;
  for (int j = 0; j < 4; ++j) {
    out.z_f += sub_f.w[j] * scaled(f[j], f_ref[j]);
    out.z_n += sub_n.w[j] * scaled(n[j], n_ref[j]);
  }
  out.pi = primary.w[0] * out.z_f + primary.w[1] * out.z_n;
  return out;
}

double performance_index(const Indicators& ind, const WeightVector& primary,
                         const WeightVector& sub_f, const WeightVector& sub_n,
                         const Scaler& scaler) {
  return performance_breakdown(ind, primary, sub_f, sub_n, scaler).pi;
}

double performance_index(const SimMetrics& m, const EmissionReport& e,
                         const WeightVector& primary,
                         const WeightVector& sub_f, const WeightVector& sub_n,
                         const Scaler& scaler) {
  Indicators ind;
  ind.stopped_delay = m.stopped_delay_s;
  ind.stop_frequency = m.stops_per_vehicle;
  ind.avg_delay = m.avg_delay_s;
  ind.total_delay = m.total_delay_s;
  ind.co2 = e.co2;
  ind.nox = e.nox;
  ind.voc = e.voc;
  ind.fuel = e.fuel;
  return performance_index(ind, primary, sub_f, sub_n, scaler);
}

}  // namespace tidalflow
