#pragma once

#include "sypi/discovery.hpp"
#include "sypi/panel.hpp"

#include <string>
#include <vector>

namespace sypi {

enum class MissingPolicy {
  ForwardFill,  // missing or non-numeric cells are forward-filled, then leading gaps dropped
  Strict,       // any missing or non-numeric cell is an error
};

struct CsvOptions {
  MissingPolicy missing = MissingPolicy::ForwardFill;
  // Name of the time-index column. Empty: the first column is treated as the
  // time index when its header looks like one (date, time, t, ...) or when it
  // holds non-numeric values.
  std::string time_column;
  bool standardize = true;
};

struct LoadedPanel {
  TimeSeriesPanel panel;
  std::vector<std::string> warnings;
  long dropped_rows = 0;
  long filled_cells = 0;
};

/// Wide CSV: header row, optional time-index column, numeric data columns.
LoadedPanel load_csv(const std::string& path, const std::string& target_column, const CsvOptions& options = {});
LoadedPanel parse_csv(const std::string& text, const std::string& target_column, const CsvOptions& options = {});

/// Header `t,<candidates...>,<target>`; values with 12 significant digits.
std::string panel_to_csv(const TimeSeriesPanel& panel);
void save_panel_csv(const TimeSeriesPanel& panel, const std::string& path);

/// Report file schema (JSON): format "sypi-report", version 1, target,
/// threshold1, threshold2, causes [names], candidates [{name, lag|null, p1,
/// p2, decision, n_eff, degenerate, zero_lag_in_conditioning}].
std::string report_to_json(const DiscoveryReport& report);
std::string report_to_table(const DiscoveryReport& report);

}  // namespace sypi
