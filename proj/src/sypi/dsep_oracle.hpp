#pragma once

#include "sypi/lag_finder.hpp"
#include "sypi/scm_sim.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sypi {

/// Plain adjacency-list DAG over nodes 0..size()-1.
class Dag {
 public:
  explicit Dag(int n = 0);

  void add_edge(int from, int to);
  int size() const { return static_cast<int>(parents_.size()); }
  size_t edge_count() const { return edges_; }
  const std::vector<int>& parents(int v) const { return parents_.at(static_cast<size_t>(v)); }
  const std::vector<int>& children(int v) const { return children_.at(static_cast<size_t>(v)); }

 private:
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  size_t edges_ = 0;
};

/// True iff every path between a and b is blocked by `given`.
///
/// Reachability over (node, direction) pairs: a trail may pass a non-collider
/// outside `given`, and a collider that is in `given` or has a descendant in
/// it. Ancestors of `given` are computed once per query.
bool d_separated(const Dag& dag, int a, int b, std::span<const int> given);

/// Finite truncation of the full time graph: node (series, time) for time in
/// [0, window). Windows below minimum_window() are rejected unless
/// `check_window` is false (short illustrative unrolls).
class UnrolledDag {
 public:
  UnrolledDag(const FullTimeGraphSpec& spec, int window, bool check_window = true);

  const Dag& dag() const { return dag_; }
  int window() const { return window_; }
  int n_series() const { return n_series_; }
  bool contains(int series, int time) const;
  int node(int series, int time) const;
  std::pair<int, int> series_time(int node) const;
  bool observable(int node) const;

 private:
  Dag dag_;
  int window_ = 0;
  int n_series_ = 0;
  std::vector<bool> hidden_;
};

/// Smallest window accepted by UnrolledDag for this spec.
int minimum_window(const FullTimeGraphSpec& spec);

struct OracleOptions {
  int window = 40;  // enlarged automatically when the spec needs more room
};

/// Smallest w >= 0 (up to max_w) with candidate_t d-connected to Y_{t+w}
/// given the candidate's in-window past.
std::optional<int> graphical_min_lag(const UnrolledDag& dag, const FullTimeGraphSpec& spec, int candidate,
                                     int anchor, int max_w);

/// Graphical lags of every observed candidate. Throws ErrorKind::Internal when
/// two anchors disagree.
LagTable graphical_lags(const FullTimeGraphSpec& spec, const OracleOptions& options = {});

/// Minimum lags from the collider-free path definition (no memory links of a
/// third series), for comparison with the d-connection lags.
LagTable path_lags(const FullTimeGraphSpec& spec);

struct PopulationConditions {
  bool cond1_dependent = false;
  bool cond2_independent = false;

  bool both() const { return cond1_dependent && cond2_independent; }
  bool operator==(const PopulationConditions&) const = default;
};

/// Both discovery conditions evaluated as d-separation queries, with the
/// conditioning set built exactly as the estimator builds it.
PopulationConditions population_conditions(const FullTimeGraphSpec& spec, int candidate, const LagTable& lags,
                                           const OracleOptions& options = {});

struct OracleSuiteOptions {
  int n_specs = 200;
  std::uint64_t seed = 7;
  bool multi_lag_mode = false;
  int min_obs = 2;
  int max_obs = 6;
  int min_hidden = 0;
  int max_hidden = 2;
  double min_density = 0.1;
  double max_density = 0.3;
  int window = 40;
};

struct OracleViolation {
  std::string kind;  // "necessity", "soundness" or "multi-lag-soundness"
  int candidate = 0;
  std::string detail;
  FullTimeGraphSpec spec;
};

struct OracleSuiteSummary {
  int specs_checked = 0;
  int specs_sampled = 0;
  int candidates_with_lag = 0;
  int necessity_checked = 0;  // direct sg-unconfounded causes
  int necessity_violations = 0;
  int path_lag_necessity_violations = 0;  // same check with path_lags()
  int soundness_checked = 0;  // candidates passing both conditions
  int soundness_violations = 0;
  std::vector<OracleViolation> violations;
};

/// Samples specs and checks, on every one:
///  - single-lag mode (only specs with single-lag dependencies are kept):
///    every direct sg-unconfounded cause passes both conditions, and every
///    candidate passing both is an sg-unconfounded cause;
///  - multi-lag mode: every candidate passing both conditions is a cause.
OracleSuiteSummary run_oracle_suite(const OracleSuiteOptions& options);

}  // namespace sypi
