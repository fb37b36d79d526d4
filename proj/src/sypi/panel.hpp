#pragma once

#include "sypi/stats_core.hpp"

#include <string>
#include <vector>

namespace sypi {

/// Observed candidate series plus the target series, aligned in time.
struct TimeSeriesPanel {
  Matrix candidates;                     // T x d
  Vector target;                         // T
  std::vector<std::string> names;        // d candidate names
  std::string target_name = "Y";
  std::vector<std::string> time_labels;  // optional, T entries when present
  std::vector<bool> near_constant;       // per candidate, set by standardize()

  long length() const { return static_cast<long>(target.size()); }
  int n_candidates() const { return static_cast<int>(candidates.cols()); }

  /// Throws when shapes disagree or values are non-finite.
  void validate() const;

  /// Zero mean, unit variance per series. Near-constant series are centered
  /// only and flagged.
  void standardize();
};

}  // namespace sypi
