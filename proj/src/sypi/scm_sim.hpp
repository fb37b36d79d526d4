#pragma once

#include "sypi/panel.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace sypi {

/// Lagged influence of one series on another.
struct CrossEdge {
  int source = 0;
  int dest = 0;
  int lag = 1;
  double weight = 0.0;  // before stabilization

  bool operator==(const CrossEdge&) const = default;
};

/// Linear stationary structural model over the full time graph.
///
/// Series layout: [0, n_obs) observed candidates, [n_obs, n_obs + n_hidden)
/// hidden series, and the target last. Every edge weight, self-loops included,
/// is multiplied by `weight_scale` when simulating.
struct FullTimeGraphSpec {
  int n_obs = 0;
  int n_hidden = 0;
  std::vector<double> self_weight;  // per series; 0 means memoryless
  std::vector<double> noise_std;    // per series
  std::vector<CrossEdge> edges;
  bool multi_lag_mode = false;
  double weight_scale = 1.0;
  bool stabilized = false;

  int n_series() const { return n_obs + n_hidden + 1; }
  int target() const { return n_obs + n_hidden; }
  bool is_hidden(int s) const { return s >= n_obs && s < n_obs + n_hidden; }
  bool memoryless(int s) const { return self_weight.at(static_cast<size_t>(s)) == 0.0; }
  int max_lag() const;
  std::string series_name(int s) const;

  bool operator==(const FullTimeGraphSpec&) const = default;
};

struct GraphConfig {
  int n_obs = 3;
  int n_hidden = 1;
  double p_cross = 0.15;  // edge probability among candidates and hidden series
  double p_target = 0.2;  // edge probability into the target
  double noise_pct = 0.2; // innovation variance
  bool multi_lag_mode = false;
  bool force_target_edge = true;
  double p_hidden_memory = 0.5;  // for hidden series not required memoryless
  int max_attempts = 100000;
};

/// Draws a random spec that passes validate_spec(). Deterministic in seed.
FullTimeGraphSpec sample_graph_spec(const GraphConfig& config, std::uint64_t seed);

/// Structural checks needed to simulate (indices, lags, stationarity).
std::vector<std::string> check_structure(const FullTimeGraphSpec& spec);

/// Structural checks plus the connectivity assumptions (target is a sink,
/// self-loops on observed series and target, acyclic summary graph, weight
/// floor, memoryless single-lag hidden drivers of the target or of observed
/// colliders). Empty result means valid.
std::vector<std::string> validate_spec(const FullTimeGraphSpec& spec);

/// Spectral radius of the (companion) transition matrix with scaled weights.
double spectral_radius(const FullTimeGraphSpec& spec);

struct SimOptions {
  int burn_in = 500;
  bool standardize = true;
};

/// All series (hidden included), T x n_series, unstandardized.
Matrix simulate_series(const FullTimeGraphSpec& spec, long T, std::uint64_t seed, int burn_in = 500);

/// Observed candidates and target only.
TimeSeriesPanel simulate_panel(const FullTimeGraphSpec& spec, long T, std::uint64_t seed,
                               const SimOptions& options = {});

/// adjacency[a][b]: some cross edge a -> b exists.
using SummaryGraph = std::vector<std::vector<bool>>;

SummaryGraph summary_graph(const FullTimeGraphSpec& spec);

/// reach[a][b]: directed path of length >= 1 from a to b.
SummaryGraph transitive_closure(const SummaryGraph& g);

struct CauseLabel {
  bool is_direct = false;
  bool is_indirect = false;
  bool is_sg_unconfounded = false;
  bool is_cause = false;

  bool operator==(const CauseLabel&) const = default;
};

struct GroundTruth {
  std::vector<CauseLabel> labels;  // one per observed candidate
};

GroundTruth ground_truth(const FullTimeGraphSpec& spec);

/// Lags between series `source` and the target: time offsets v of
/// collider-free paths source_t ... Y_{t+v} that use cross edges only and have
/// no intermediate node in `source` or the target.
std::set<int> collider_free_lags(const FullTimeGraphSpec& spec, int source);

/// True when every observed candidate has at most one lag with the target.
bool has_single_lag_dependencies(const FullTimeGraphSpec& spec);

}  // namespace sypi
