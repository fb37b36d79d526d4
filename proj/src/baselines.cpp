#include "sypi/baselines.hpp"

#include "sypi/error.hpp"
#include "sypi/stats_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sypi {

GrangerReport lasso_granger(const TimeSeriesPanel& panel, double lambda, int max_lag) {
  panel.validate();
  if (max_lag < 1) throw_usage("lasso_granger: max_lag must be >= 1");
  const long T = panel.length();
  const int d = panel.n_candidates();
  const long n = T - max_lag;
  const long columns = static_cast<long>(d + 1) * max_lag;
  if (n < std::max(10L, columns + 2)) {
    throw_data("lasso_granger: " + std::to_string(n) + " aligned rows are too few for " +
               std::to_string(columns) + " lagged predictors");
  }

  // Column (series, lag) at series * max_lag + (lag - 1); the target is series d.
  Matrix design(n, columns);
  for (int s = 0; s <= d; ++s) {
    const Vector& source = s < d ? static_cast<Vector>(panel.candidates.col(s)) : panel.target;
    for (int lag = 1; lag <= max_lag; ++lag) {
      design.col(s * max_lag + lag - 1) = source.segment(max_lag - lag, n);
    }
  }
  const LassoFit fit = lasso_cd(design, panel.target.segment(max_lag, n), lambda);

  GrangerReport report;
  report.max_lag = max_lag;
  report.lambda = lambda;
  report.selected.assign(static_cast<size_t>(d), false);
  report.max_abs_coef.assign(static_cast<size_t>(d), 0.0);
  for (int s = 0; s < d; ++s) {
    for (int lag = 1; lag <= max_lag; ++lag) {
      const double c = std::abs(fit.coefficients(s * max_lag + lag - 1));
      report.max_abs_coef[static_cast<size_t>(s)] = std::max(report.max_abs_coef[static_cast<size_t>(s)], c);
    }
    report.selected[static_cast<size_t>(s)] = report.max_abs_coef[static_cast<size_t>(s)] > 0.0;
  }
  return report;
}

double lasso_granger_fnr(std::span<const LabeledPanel> suite, double lambda, int max_lag) {
  long tp = 0;
  long fn = 0;
  for (const LabeledPanel& item : suite) {
    const GrangerReport r = lasso_granger(item.panel, lambda, max_lag);
    for (size_t i = 0; i < r.selected.size(); ++i) {
      if (!item.truth.labels.at(i).is_cause) continue;
      (r.selected[i] ? tp : fn) += 1;
    }
  }
  return tp + fn == 0 ? 0.0 : static_cast<double>(fn) / static_cast<double>(tp + fn);
}

TuneResult tune_lambda_for_fnr(std::span<const LabeledPanel> suite, double target_fnr, const TuneOptions& options) {
  if (!(target_fnr >= 0.0 && target_fnr <= 1.0)) throw_usage("tune_lambda_for_fnr: target must lie in [0, 1]");
  if (!(options.lambda_min > 0.0) || !(options.lambda_max > options.lambda_min)) {
    throw_usage("tune_lambda_for_fnr: invalid lambda range");
  }
  auto fnr = [&](double lambda) { return lasso_granger_fnr(suite, lambda, options.max_lag); };

  const double at_max = fnr(options.lambda_max);
  if (at_max <= target_fnr) return {options.lambda_max, at_max, false};
  const double at_min = fnr(options.lambda_min);
  if (at_min > target_fnr) return {0.0, at_min, true};

  double lo = std::log(options.lambda_min);  // feasible
  double hi = std::log(options.lambda_max);  // infeasible
  double lo_fnr = at_min;
  for (int it = 0; it < options.iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double value = fnr(std::exp(mid));
    if (value <= target_fnr) {
      lo = mid;
      lo_fnr = value;
    } else {
      hi = mid;
    }
  }
  return {std::exp(lo), lo_fnr, false};
}

}  // namespace sypi
