#pragma once

#include "sypi/panel.hpp"
#include "sypi/scm_sim.hpp"

#include <span>
#include <vector>

namespace sypi {

struct GrangerReport {
  std::vector<bool> selected;          // per candidate
  std::vector<double> max_abs_coef;    // per candidate, standardized scale
  int max_lag = 0;
  double lambda = 0.0;
};

/// Joint lasso of Y_t on lags 1..max_lag of every candidate and of Y itself.
/// A candidate is selected iff any of its lag coefficients is nonzero.
GrangerReport lasso_granger(const TimeSeriesPanel& panel, double lambda, int max_lag = 3);

/// A simulated panel with its ground-truth labels.
struct LabeledPanel {
  TimeSeriesPanel panel;
  GroundTruth truth;
};

/// Pooled FN / (FN + TP) over all causes of the suite at this lambda.
double lasso_granger_fnr(std::span<const LabeledPanel> suite, double lambda, int max_lag);

struct TuneOptions {
  double lambda_min = 1e-4;
  double lambda_max = 1.0;
  int iterations = 30;  // bisection steps on log(lambda)
  int max_lag = 3;
};

struct TuneResult {
  double lambda = 0.0;
  double fnr = 0.0;
  bool unattainable = false;
};

/// Largest lambda on [lambda_min, lambda_max] whose Lasso-Granger FNR on the
/// suite is <= target_fnr. Unattainable targets return lambda = 0, flagged.
TuneResult tune_lambda_for_fnr(std::span<const LabeledPanel> suite, double target_fnr,
                               const TuneOptions& options = {});

}  // namespace sypi
