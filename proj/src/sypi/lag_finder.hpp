#pragma once

#include "sypi/panel.hpp"

#include <optional>
#include <vector>

namespace sypi {

struct LagOptions {
  int max_lag = 10;
  double lambda = 0.001;
  // Midpoint of the stable 0.1 to 0.15 window. Zero means "any nonzero
  // coefficient".
  double coef_threshold = 0.12;
  // Lags y_{t-1}..y_{t-target_lags} of the target added as extra predictors.
  int target_lags = 1;
};

/// Lasso fit of y_t on x_t, x_{t-1}, ..., x_{t-max_lag}.
struct LagSearch {
  std::optional<int> lag;
  Vector coefficients;  // index = shift, standardized scale
  bool constant_candidate = false;
};

LagSearch lag_search(const Vector& x, const Vector& y, const LagOptions& options = {});

/// Smallest shift s with |coef_s| >= coef_threshold, or nullopt.
std::optional<int> find_min_lag(const Vector& x, const Vector& y, const LagOptions& options = {});

/// Per-candidate minimum lag. Absent entries mark candidates with no detected
/// dependence on the target.
struct LagTable {
  std::vector<std::optional<int>> lags;

  int size() const { return static_cast<int>(lags.size()); }
  bool present(int j) const { return lags.at(static_cast<size_t>(j)).has_value(); }
  int lag(int j) const { return lags.at(static_cast<size_t>(j)).value(); }
  /// w_i - w_j when both are present.
  std::optional<int> relative(int i, int j) const;

  bool operator==(const LagTable&) const = default;
};

LagTable find_all_lags(const TimeSeriesPanel& panel, const LagOptions& options = {});

}  // namespace sypi
