#include "sypi/lag_finder.hpp"

#include "sypi/error.hpp"
#include "sypi/stats_core.hpp"

#include <cmath>
#include <string>

namespace sypi {

namespace {

void check_options(const LagOptions& options) {
  if (options.max_lag < 1) throw_usage("lag search: max_lag must be >= 1");
  if (!(options.lambda >= 0.0)) throw_usage("lag search: lambda must be >= 0");
  if (!(options.coef_threshold >= 0.0)) throw_usage("lag search: coef_threshold must be >= 0");
  if (options.target_lags < 0 || options.target_lags > options.max_lag) {
    throw_usage("lag search: target_lags must be in [0, max_lag]");
  }
}

double standardized_or_zero(Vector& v) {
  const double n = static_cast<double>(v.size());
  const double mean_sq = v.squaredNorm() / n;
  v.array() -= v.mean();
  const double var = v.squaredNorm() / n;
  if (!(var > 1e-12 * mean_sq)) return 0.0;
  v /= std::sqrt(var);
  return var;
}

}  // namespace

LagSearch lag_search(const Vector& x, const Vector& y, const LagOptions& options) {
  check_options(options);
  if (x.size() != y.size()) throw_usage("lag search: candidate and target lengths differ");
  const long T = y.size();
  const long max_lag = options.max_lag;
  if (T < 10 * (max_lag + 2)) {
    throw_data("lag search: series of length " + std::to_string(T) + " too short for max_lag " +
               std::to_string(max_lag) + " (need " + std::to_string(10 * (max_lag + 2)) + ")");
  }

  LagSearch out;
  out.coefficients = Vector::Zero(max_lag + 1);

  Vector xs = x;
  Vector ys = y;
  if (standardized_or_zero(xs) == 0.0) {
    out.constant_candidate = true;
    return out;
  }
  standardized_or_zero(ys);

  const long n = T - max_lag;
  const long p = options.target_lags;
  Matrix design(n, max_lag + 1 + p);
  for (long s = 0; s <= max_lag; ++s) design.col(s) = xs.segment(max_lag - s, n);
  for (long s = 1; s <= p; ++s) design.col(max_lag + s) = ys.segment(max_lag - s, n);
  Vector response = ys.segment(max_lag, n);
  if (p > 0) {
    // Measure coefficients in units of the target's innovation rather than
    // its marginal spread.
    const Vector innovation = ols_residuals(response, design.rightCols(p));
    const double sd = std::sqrt(innovation.squaredNorm() / static_cast<double>(n));
    if (sd > 1e-12) response /= sd;
  }

  const LassoFit fit = lasso_cd(design, response, options.lambda);
  out.coefficients = fit.coefficients.head(max_lag + 1);
  for (long s = 0; s <= max_lag; ++s) {
    const double magnitude = std::abs(fit.coefficients(s));
    if (magnitude > 0.0 && magnitude >= options.coef_threshold) {
      out.lag = static_cast<int>(s);
      break;
    }
  }
  return out;
}

std::optional<int> find_min_lag(const Vector& x, const Vector& y, const LagOptions& options) {
  return lag_search(x, y, options).lag;
}

std::optional<int> LagTable::relative(int i, int j) const {
  if (!present(i) || !present(j)) return std::nullopt;
  return lag(i) - lag(j);
}

LagTable find_all_lags(const TimeSeriesPanel& panel, const LagOptions& options) {
  panel.validate();
  LagTable table;
  table.lags.reserve(static_cast<size_t>(panel.n_candidates()));
  for (int j = 0; j < panel.n_candidates(); ++j) {
    table.lags.push_back(find_min_lag(panel.candidates.col(j), panel.target, options));
  }
  return table;
}

}  // namespace sypi
