#include "sypi/scm_sim.hpp"

#include "sypi/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <utility>

namespace sypi {

namespace {

constexpr double kWeightLow = 0.7;
constexpr double kWeightHigh = 0.95;
constexpr double kStabilityTrigger = 0.98;
constexpr double kStabilityTarget = 0.95;

int lag_limit(const FullTimeGraphSpec& spec) { return spec.multi_lag_mode ? 2 : 1; }

bool summary_acyclic(const SummaryGraph& g) {
  const size_t n = g.size();
  std::vector<int> indegree(n, 0);
  for (size_t a = 0; a < n; ++a)
    for (size_t b = 0; b < n; ++b)
      if (g[a][b]) ++indegree[b];
  std::vector<size_t> ready;
  for (size_t v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  size_t seen = 0;
  while (!ready.empty()) {
    const size_t v = ready.back();
    ready.pop_back();
    ++seen;
    for (size_t b = 0; b < n; ++b)
      if (g[v][b] && --indegree[b] == 0) ready.push_back(b);
  }
  return seen == n;
}

// Hidden series that must be memoryless: those reaching the target through
// hidden series only (no observed intermediate), and parents of any observed
// series, which is a collider with its own self-loop.
std::vector<bool> hidden_needing_no_memory(const FullTimeGraphSpec& spec, const SummaryGraph& g) {
  const int n = spec.n_series();
  std::vector<bool> out(static_cast<size_t>(n), false);
  for (int u = 0; u < n; ++u) {
    if (!spec.is_hidden(u)) continue;
    bool needed = false;
    std::vector<int> stack{u};
    std::vector<bool> seen(static_cast<size_t>(n), false);
    while (!stack.empty() && !needed) {
      const int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w) {
        if (!g[v][w] || seen[static_cast<size_t>(w)]) continue;
        if (w == spec.target()) needed = true;
        if (spec.is_hidden(w)) stack.push_back(w);
        seen[static_cast<size_t>(w)] = true;
      }
    }
    for (int c = 0; c < n && !needed; ++c) {
      const bool observed = c < spec.n_obs || c == spec.target();
      if (observed && g[u][c]) needed = true;
    }
    out[static_cast<size_t>(u)] = needed;
  }
  return out;
}

}  // namespace

int FullTimeGraphSpec::max_lag() const {
  int m = 1;
  for (const CrossEdge& e : edges) m = std::max(m, e.lag);
  return m;
}

std::string FullTimeGraphSpec::series_name(int s) const {
  if (s == target()) return "Y";
  if (is_hidden(s)) return "U" + std::to_string(s - n_obs + 1);
  return "X" + std::to_string(s + 1);
}

SummaryGraph summary_graph(const FullTimeGraphSpec& spec) {
  const auto n = static_cast<size_t>(spec.n_series());
  SummaryGraph g(n, std::vector<bool>(n, false));
  for (const CrossEdge& e : spec.edges) {
    if (e.source >= 0 && e.dest >= 0 && static_cast<size_t>(e.source) < n &&
        static_cast<size_t>(e.dest) < n && e.source != e.dest) {
      g[static_cast<size_t>(e.source)][static_cast<size_t>(e.dest)] = true;
    }
  }
  return g;
}

SummaryGraph transitive_closure(const SummaryGraph& g) {
  SummaryGraph reach = g;
  const size_t n = g.size();
  for (size_t k = 0; k < n; ++k)
    for (size_t a = 0; a < n; ++a)
      if (reach[a][k])
        for (size_t b = 0; b < n; ++b)
          if (reach[k][b]) reach[a][b] = true;
  return reach;
}

std::vector<std::string> check_structure(const FullTimeGraphSpec& spec) {
  std::vector<std::string> issues;
  const int n = spec.n_series();
  if (spec.n_obs < 0 || spec.n_hidden < 0) issues.push_back("negative series count");
  if (static_cast<int>(spec.self_weight.size()) != n) issues.push_back("self_weight size mismatch");
  if (static_cast<int>(spec.noise_std.size()) != n) issues.push_back("noise_std size mismatch");
  if (!issues.empty()) return issues;
  for (int s = 0; s < n; ++s) {
    if (!std::isfinite(spec.self_weight[static_cast<size_t>(s)])) issues.push_back("non-finite self weight");
    const double sd = spec.noise_std[static_cast<size_t>(s)];
    if (!std::isfinite(sd) || sd < 0.0) issues.push_back("invalid noise std for " + spec.series_name(s));
  }
  for (const CrossEdge& e : spec.edges) {
    if (e.source < 0 || e.source >= n || e.dest < 0 || e.dest >= n) {
      issues.push_back("edge endpoint out of range");
      continue;
    }
    if (e.source == e.dest) issues.push_back("self edge listed as cross edge on " + spec.series_name(e.source));
    // No instantaneous or backward arrows.
    if (e.lag < 1) issues.push_back("edge " + spec.series_name(e.source) + "->" + spec.series_name(e.dest) + " has lag < 1");
    if (!std::isfinite(e.weight)) issues.push_back("non-finite edge weight");
  }
  if (!(spec.weight_scale > 0.0) || !std::isfinite(spec.weight_scale)) issues.push_back("invalid weight_scale");
  if (issues.empty() && spectral_radius(spec) >= 1.0) issues.push_back("transition matrix is not stable");
  return issues;
}

std::vector<std::string> validate_spec(const FullTimeGraphSpec& spec) {
  std::vector<std::string> issues = check_structure(spec);
  if (!issues.empty()) return issues;
  const int n = spec.n_series();
  const int y = spec.target();
  const SummaryGraph g = summary_graph(spec);

  std::set<std::pair<int, int>> seen_pair_lag;
  for (const CrossEdge& e : spec.edges) {
    const std::string name = spec.series_name(e.source) + "->" + spec.series_name(e.dest);
    if (e.source == y) issues.push_back("target is not a sink: " + name);
    if (e.lag > lag_limit(spec)) issues.push_back("edge " + name + " lag exceeds mode limit");
    if (e.weight < kWeightLow || e.weight > kWeightHigh) issues.push_back("edge " + name + " weight outside [0.7, 0.95]");
    if (!seen_pair_lag.insert({e.source * n + e.dest, e.lag}).second) issues.push_back("duplicate edge " + name);
  }
  for (int s = 0; s < n; ++s) {
    if (!spec.is_hidden(s) && spec.memoryless(s)) issues.push_back("missing self-loop on " + spec.series_name(s));
  }
  if (!summary_acyclic(g)) issues.push_back("summary graph has a cycle");

  const std::vector<bool> need = hidden_needing_no_memory(spec, g);
  for (int u = 0; u < n; ++u) {
    if (!need[static_cast<size_t>(u)]) continue;
    if (!spec.memoryless(u)) issues.push_back("hidden " + spec.series_name(u) + " must be memoryless");
    if (!spec.multi_lag_mode && collider_free_lags(spec, u).size() > 1) {
      issues.push_back("hidden " + spec.series_name(u) + " has multiple lags with the target");
    }
  }
  return issues;
}

double spectral_radius(const FullTimeGraphSpec& spec) {
  const int n = spec.n_series();
  const int L = spec.max_lag();
  Matrix companion = Matrix::Zero(n * L, n * L);
  for (int s = 0; s < n; ++s) companion(s, s) = spec.self_weight[static_cast<size_t>(s)] * spec.weight_scale;
  for (const CrossEdge& e : spec.edges) {
    companion(e.dest, (e.lag - 1) * n + e.source) += e.weight * spec.weight_scale;
  }
  for (int block = 1; block < L; ++block) {
    companion.block(block * n, (block - 1) * n, n, n) = Matrix::Identity(n, n);
  }
  if (companion.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> solver(companion, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

FullTimeGraphSpec sample_graph_spec(const GraphConfig& config, std::uint64_t seed) {
  auto probability_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!probability_ok(config.p_cross) || !probability_ok(config.p_target) ||
      !probability_ok(config.p_hidden_memory)) {
    throw_usage("sample_graph_spec: probabilities must lie in [0, 1]");
  }
  if (config.n_obs < 1) throw_usage("sample_graph_spec: n_obs must be >= 1");
  if (config.n_hidden < 0) throw_usage("sample_graph_spec: n_hidden must be >= 0");
  if (!(config.noise_pct >= 0.0)) throw_usage("sample_graph_spec: noise_pct must be >= 0");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(kWeightLow, kWeightHigh);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto bernoulli = [&](double p) { return unit(rng) < p; };

  const int drivers = config.n_obs + config.n_hidden;
  const int max_lag = config.multi_lag_mode ? 2 : 1;

  for (int attempt = 0; attempt < std::max(1, config.max_attempts); ++attempt) {
    FullTimeGraphSpec spec;
    spec.n_obs = config.n_obs;
    spec.n_hidden = config.n_hidden;
    spec.multi_lag_mode = config.multi_lag_mode;
    const int n = spec.n_series();
    spec.noise_std.assign(static_cast<size_t>(n), std::sqrt(config.noise_pct));
    spec.self_weight.assign(static_cast<size_t>(n), 0.0);

    // Random causal order keeps the summary graph acyclic; the target is last.
    std::vector<int> order(static_cast<size_t>(drivers));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int a = 0; a < drivers; ++a) {
      for (int b = a + 1; b < drivers; ++b) {
        for (int lag = 1; lag <= max_lag; ++lag) {
          if (bernoulli(config.p_cross)) {
            spec.edges.push_back({order[static_cast<size_t>(a)], order[static_cast<size_t>(b)], lag, 0.0});
          }
        }
      }
    }
    bool has_target_edge = false;
    for (int s = 0; s < drivers; ++s) {
      for (int lag = 1; lag <= max_lag; ++lag) {
        if (bernoulli(config.p_target)) {
          spec.edges.push_back({s, spec.target(), lag, 0.0});
          has_target_edge = true;
        }
      }
    }
    for (CrossEdge& e : spec.edges) e.weight = weight(rng);
    std::sort(spec.edges.begin(), spec.edges.end(), [](const CrossEdge& a, const CrossEdge& b) {
      return std::tie(a.source, a.dest, a.lag) < std::tie(b.source, b.dest, b.lag);
    });

    const std::vector<bool> need = hidden_needing_no_memory(spec, summary_graph(spec));
    for (int s = 0; s < n; ++s) {
      const bool memory = !spec.is_hidden(s) ||
                          (!need[static_cast<size_t>(s)] && bernoulli(config.p_hidden_memory));
      spec.self_weight[static_cast<size_t>(s)] = memory ? weight(rng) : 0.0;
    }

    if (config.force_target_edge && !has_target_edge) continue;
    if (!validate_spec(spec).empty()) continue;

    const double rho = spectral_radius(spec);
    if (rho >= kStabilityTrigger) {
      spec.weight_scale = kStabilityTarget / rho;
      spec.stabilized = true;
    }
    return spec;
  }
  throw_data("sample_graph_spec: no valid spec after " + std::to_string(config.max_attempts) + " attempts");
}

Matrix simulate_series(const FullTimeGraphSpec& spec, long T, std::uint64_t seed, int burn_in) {
  if (T < 1) throw_usage("simulate: T must be positive");
  if (burn_in < 0) throw_usage("simulate: burn_in must be >= 0");
  const std::vector<std::string> issues = check_structure(spec);
  if (!issues.empty()) throw_usage("simulate: invalid spec: " + issues.front());

  const int n = spec.n_series();
  const int L = spec.max_lag();
  const long total = T + burn_in;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Row r of `history` holds time r - L; the first L rows are the zero state.
  Matrix history = Matrix::Zero(total + L, n);
  for (long t = 0; t < total; ++t) {
    const long row = t + L;
    for (int s = 0; s < n; ++s) {
      history(row, s) = spec.self_weight[static_cast<size_t>(s)] * spec.weight_scale * history(row - 1, s);
    }
    for (const CrossEdge& e : spec.edges) {
      history(row, e.dest) += e.weight * spec.weight_scale * history(row - e.lag, e.source);
    }
    for (int s = 0; s < n; ++s) history(row, s) += spec.noise_std[static_cast<size_t>(s)] * normal(rng);
  }
  if (!history.allFinite()) throw_internal("simulate: series diverged");
  return history.bottomRows(T);
}

TimeSeriesPanel simulate_panel(const FullTimeGraphSpec& spec, long T, std::uint64_t seed,
                               const SimOptions& options) {
  if (T < 50) throw_usage("simulate: T must be >= 50");
  const Matrix all = simulate_series(spec, T, seed, options.burn_in);
  TimeSeriesPanel panel;
  panel.candidates = all.leftCols(spec.n_obs);
  panel.target = all.col(spec.target());
  for (int s = 0; s < spec.n_obs; ++s) panel.names.push_back(spec.series_name(s));
  panel.target_name = "Y";
  if (options.standardize) {
    panel.standardize();
  } else {
    panel.near_constant.assign(static_cast<size_t>(spec.n_obs), false);
  }
  return panel;
}

GroundTruth ground_truth(const FullTimeGraphSpec& spec) {
  const int n = spec.n_series();
  const int y = spec.target();
  const SummaryGraph g = summary_graph(spec);
  const SummaryGraph reach = transitive_closure(g);

  GroundTruth truth;
  truth.labels.resize(static_cast<size_t>(spec.n_obs));
  for (int i = 0; i < spec.n_obs; ++i) {
    CauseLabel& label = truth.labels[static_cast<size_t>(i)];
    label.is_direct = g[i][y];
    for (int k = 0; k < n && !label.is_indirect; ++k) {
      if (k != i && k != y && reach[i][k] && g[k][y]) label.is_indirect = true;
    }
    label.is_cause = label.is_direct || label.is_indirect;

    // Reachability of the target with candidate i removed.
    SummaryGraph without = g;
    for (int v = 0; v < n; ++v) without[i][v] = without[v][i] = false;
    const SummaryGraph reach_without = transitive_closure(without);
    bool confounded = false;
    for (int z = 0; z < n && !confounded; ++z) {
      if (z == i || z == y) continue;
      if (reach[z][i] && reach_without[z][y]) confounded = true;
    }
    label.is_sg_unconfounded = !confounded;
  }
  return truth;
}

namespace {

struct TimedNode {
  int series;
  int time;  // relative to the path's starting node
  bool operator<(const TimedNode& o) const { return std::tie(series, time) < std::tie(o.series, o.time); }
  bool operator==(const TimedNode&) const = default;
};

using Path = std::vector<TimedNode>;  // excludes the start node

// Directed cross-edge paths from `from` to `to`, never passing through a
// series in `forbidden` as an intermediate node.
void enumerate_paths(const std::vector<std::vector<std::pair<int, int>>>& out_edges, int from, int to,
                     int time, const std::vector<bool>& forbidden, std::vector<bool>& on_path, Path& current,
                     std::vector<Path>& found) {
  for (const auto& [dest, lag] : out_edges[static_cast<size_t>(from)]) {
    if (on_path[static_cast<size_t>(dest)]) continue;
    current.push_back({dest, time + lag});
    if (dest == to) {
      found.push_back(current);
    } else if (!forbidden[static_cast<size_t>(dest)]) {
      on_path[static_cast<size_t>(dest)] = true;
      enumerate_paths(out_edges, dest, to, time + lag, forbidden, on_path, current, found);
      on_path[static_cast<size_t>(dest)] = false;
    }
    current.pop_back();
  }
}

std::vector<Path> directed_paths(const FullTimeGraphSpec& spec, int from, int to, const std::vector<bool>& forbidden) {
  std::vector<std::vector<std::pair<int, int>>> out_edges(static_cast<size_t>(spec.n_series()));
  for (const CrossEdge& e : spec.edges) out_edges[static_cast<size_t>(e.source)].push_back({e.dest, e.lag});
  std::vector<bool> on_path(static_cast<size_t>(spec.n_series()), false);
  on_path[static_cast<size_t>(from)] = true;
  Path current;
  std::vector<Path> found;
  enumerate_paths(out_edges, from, to, 0, forbidden, on_path, current, found);
  return found;
}

}  // namespace

std::set<int> collider_free_lags(const FullTimeGraphSpec& spec, int source) {
  const int y = spec.target();
  if (source < 0 || source >= y) throw_usage("collider_free_lags: source must be a non-target series");

  std::vector<bool> forbidden(static_cast<size_t>(spec.n_series()), false);
  forbidden[static_cast<size_t>(source)] = true;
  forbidden[static_cast<size_t>(y)] = true;

  std::set<int> lags;
  for (const Path& p : directed_paths(spec, source, y, forbidden)) lags.insert(p.back().time);

  // Forks source_t <- ... <- Q -> ... -> Y with Q outside {source, Y}.
  for (int q = 0; q < y; ++q) {
    if (q == source) continue;
    const std::vector<Path> left = directed_paths(spec, q, source, forbidden);
    if (left.empty()) continue;
    const std::vector<Path> right = directed_paths(spec, q, y, forbidden);
    for (const Path& l : left) {
      for (const Path& r : right) {
        bool disjoint = true;
        for (const TimedNode& a : l)
          for (const TimedNode& b : r)
            if (a == b) disjoint = false;
        if (disjoint) lags.insert(r.back().time - l.back().time);
      }
    }
  }
  return lags;
}

bool has_single_lag_dependencies(const FullTimeGraphSpec& spec) {
  for (int i = 0; i < spec.n_obs; ++i) {
    if (collider_free_lags(spec, i).size() > 1) return false;
  }
  return true;
}

}  // namespace sypi
