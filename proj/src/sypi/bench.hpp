#pragma once

#include "sypi/baselines.hpp"
#include "sypi/discovery.hpp"
#include "sypi/scm_sim.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sypi {

/// Confusion counts against ground-truth `is_cause`, plus the subset over
/// direct causes.
struct Confusion {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;
  long direct_tp = 0;
  long direct_fn = 0;

  Confusion& operator+=(const Confusion& o);
  bool operator==(const Confusion&) const = default;

  double fpr() const;         // FP / (FP + TN), 0 when undefined
  double fnr_total() const;   // FN / (FN + TP)
  double fnr_direct() const;  // direct FN / (direct FN + direct TP)
  double tpr() const { return 1.0 - fnr_total(); }
};

/// NO_LAG counts as a negative decision.
Confusion compute_metrics(std::span<const Decision> decisions, const GroundTruth& truth);
Confusion compute_metrics(const std::vector<bool>& selected, const GroundTruth& truth);

struct MethodParams {
  double threshold1 = 0.01;
  double threshold2 = 0.2;
  LagOptions lag;
  bool run_granger = false;
  double granger_lambda = 0.05;
  int granger_max_lag = 3;
};

struct CellConfig {
  long T = 2000;
  int n_obs = 3;
  int n_hidden = 1;
  double p_cross = 0.15;
  double p_target = 0.2;
  double noise_pct = 0.2;
  int n_graphs = 100;
  bool multi_lag_mode = false;
  MethodParams method;

  GraphConfig graph_config() const;
};

struct RocOptions {
  std::vector<double> threshold1_grid;  // default: 25 log-spaced points on [1e-4, 0.5]
  double threshold2 = 0.2;
  std::vector<double> lambda_grid;      // default: 25 log-spaced points on [1e-4, 1]
};

/// Cartesian product of value lists; scalars in JSON are accepted as
/// one-element lists. Unknown keys are rejected.
struct GridConfig {
  std::vector<long> T{2000};
  std::vector<int> n_obs{3};
  std::vector<int> n_hidden{1};
  std::vector<double> p_cross{0.15};
  std::vector<double> p_target{0.2};
  std::vector<double> noise_pct{0.2};
  int n_graphs = 100;
  bool multi_lag_mode = false;
  MethodParams method;
  RocOptions roc;

  std::vector<CellConfig> cells() const;  // empty when n_graphs == 0
};

GridConfig grid_from_json(const std::string& text);
std::string grid_to_json(const GridConfig& grid);

std::vector<double> log_grid(double lo, double hi, int points);

enum class Aggregation { Pooled, Macro };

struct Rates {
  double fpr = 0.0;
  double fnr_total = 0.0;
  double fnr_direct = 0.0;
};

struct GraphRecord {
  int graph = 0;
  std::uint64_t seed = 0;
  int n_causes = 0;
  int n_direct = 0;
  bool stabilized = false;
  Confusion sypi;
  Confusion granger;
  std::string error;  // non-empty when the graph failed
};

struct BenchCell {
  CellConfig config;
  Confusion sypi;     // pooled over graphs
  Confusion granger;  // pooled; zero when Lasso-Granger was not run
  int failed_graphs = 0;
  std::vector<GraphRecord> graphs;

  Rates sypi_rates(Aggregation how = Aggregation::Pooled) const;
  Rates granger_rates(Aggregation how = Aggregation::Pooled) const;
};

/// Seeds for graph `graph` of cell `cell` under `root`.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t cell, std::uint64_t graph, std::uint64_t stream);

/// A sampled spec with its simulated panel.
struct GeneratedGraph {
  FullTimeGraphSpec spec;
  LabeledPanel data;
};

GeneratedGraph generate_graph(const CellConfig& cell, std::uint64_t root, std::uint64_t cell_index,
                              std::uint64_t graph_index);

/// Runs fn(0..n-1) on `parallelism` worker threads; rethrows the first error.
void parallel_for(int n, int parallelism, const std::function<void(int)>& fn);

/// Deterministic given root_seed, independent of parallelism.
std::vector<BenchCell> run_grid(std::span<const CellConfig> cells, std::uint64_t root_seed, int parallelism = 1);

struct RocPoint {
  double threshold = 0.0;  // threshold1 for SyPI, lambda for Lasso-Granger
  double tpr = 0.0;
  double fpr = 0.0;
};

struct RocCurves {
  std::vector<RocPoint> sypi;
  std::vector<RocPoint> granger;
};

/// TPR/FPR against is_cause over the cell's graphs, sorted by FPR.
RocCurves roc_sweep(const CellConfig& cell, std::uint64_t root_seed, const RocOptions& options,
                    int parallelism = 1, std::uint64_t cell_index = 0);

/// TPR at `fpr` on the curve's upper envelope (best TPR per FPR, running
/// maximum, anchored at (0, 0)), linearly interpolated. `curve` must be sorted
/// by FPR.
double interpolate_tpr(std::span<const RocPoint> curve, double fpr);

std::string cells_to_csv(std::span<const BenchCell> cells);
std::string graphs_to_csv(std::span<const BenchCell> cells);
std::string roc_to_csv(std::span<const RocCurves> curves, std::span<const CellConfig> cells);

/// Replay manifest: tool version, command, seed, parallelism and grid.
std::string manifest_json(const std::string& command, std::uint64_t seed, int parallelism, const GridConfig& grid);

}  // namespace sypi
