#pragma once

#include "sypi/lag_finder.hpp"
#include "sypi/panel.hpp"
#include "sypi/stats_core.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sypi {

/// Marks the target series in a NodeRef.
inline constexpr int kTarget = -1;

/// A series at a time offset relative to the anchor t.
struct NodeRef {
  int series = kTarget;  // candidate index or kTarget
  int offset = 0;

  bool operator==(const NodeRef&) const = default;
};

/// One node per other lag-bearing candidate.
using ConditioningSet = std::vector<NodeRef>;

/// S^i = { X^j at offset w_i - w_j - 1 : j != i, w_j present }.
ConditioningSet build_conditioning_set(int i, const LagTable& lags);

struct AlignedSamples {
  Matrix data;  // one column per ref, in ref order
  long n_eff = 0;
};

/// Rows for every anchor t such that every ref's t + offset is inside the
/// panel. `min_rows` guards degenerate windows (throws ErrorKind::Data).
AlignedSamples align_samples(const TimeSeriesPanel& panel, std::span<const NodeRef> refs,
                             long min_rows = 1);

enum class Decision { Cause, NotCause, NoLag };

const char* to_string(Decision d);

struct CandidateResult {
  std::optional<int> lag;
  double p1 = 1.0;
  double p2 = 1.0;
  bool tested2 = false;
  long n_eff = 0;
  Decision decision = Decision::NoLag;
  bool degenerate = false;
  // Another candidate with lag 0 sits in S^i, at the same time as Y_{t+w_i-1}.
  bool zero_lag_in_conditioning = false;
};

struct DiscoveryOptions {
  double threshold1 = 0.01;
  double threshold2 = 0.2;
  LagOptions lag;
  CiTest ci_test;  // defaults to partial_correlation_test when empty

  /// Small-sample settings: threshold1 = 0.05, lag coefficient threshold 0.
  static DiscoveryOptions real_data();
};

struct DiscoveryReport {
  std::vector<std::string> names;
  std::string target_name;
  LagTable lags;
  std::vector<CandidateResult> candidates;
  double threshold1 = 0.0;
  double threshold2 = 0.0;

  std::vector<int> causes() const;
};

/// Decision rule applied to already-computed p-values.
Decision decide(const CandidateResult& c, double threshold1, double threshold2);

DiscoveryReport discover(const TimeSeriesPanel& panel, const DiscoveryOptions& options = {});

/// Same as discover() with a precomputed lag table.
DiscoveryReport discover_with_lags(const TimeSeriesPanel& panel, const LagTable& lags,
                                   const DiscoveryOptions& options = {});

}  // namespace sypi
