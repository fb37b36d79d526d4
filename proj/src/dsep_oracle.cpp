#include "sypi/dsep_oracle.hpp"

#include "sypi/discovery.hpp"
#include "sypi/error.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

namespace sypi {

Dag::Dag(int n) : parents_(static_cast<size_t>(std::max(n, 0))), children_(static_cast<size_t>(std::max(n, 0))) {}

void Dag::add_edge(int from, int to) {
  if (from < 0 || to < 0 || from >= size() || to >= size() || from == to) {
    throw_usage("dag: invalid edge");
  }
  children_[static_cast<size_t>(from)].push_back(to);
  parents_[static_cast<size_t>(to)].push_back(from);
  ++edges_;
}

bool d_separated(const Dag& dag, int a, int b, std::span<const int> given) {
  const int n = dag.size();
  auto check = [n](int v) {
    if (v < 0 || v >= n) throw_usage("d_separated: unknown node id " + std::to_string(v));
  };
  check(a);
  check(b);
  std::vector<char> in_given(static_cast<size_t>(n), 0);
  for (int z : given) {
    check(z);
    in_given[static_cast<size_t>(z)] = 1;
  }
  if (in_given[static_cast<size_t>(a)] || in_given[static_cast<size_t>(b)]) {
    throw_usage("d_separated: endpoints must not be conditioned on");
  }
  if (a == b) return false;

  // Nodes with a descendant (or themselves) in `given`.
  std::vector<char> opens_collider(static_cast<size_t>(n), 0);
  std::vector<int> stack(given.begin(), given.end());
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (opens_collider[static_cast<size_t>(v)]) continue;
    opens_collider[static_cast<size_t>(v)] = 1;
    for (int p : dag.parents(v)) stack.push_back(p);
  }

  // visited[2v] arrived from a child (moving up), visited[2v+1] from a parent.
  std::vector<char> visited(2 * static_cast<size_t>(n), 0);
  std::vector<std::pair<int, bool>> frontier{{a, true}};
  while (!frontier.empty()) {
    const auto [v, up] = frontier.back();
    frontier.pop_back();
    char& mark = visited[2 * static_cast<size_t>(v) + (up ? 0 : 1)];
    if (mark) continue;
    mark = 1;
    const bool conditioned = in_given[static_cast<size_t>(v)];
    if (!conditioned && v == b) return false;
    if (up) {
      if (conditioned) continue;
      for (int p : dag.parents(v)) frontier.push_back({p, true});
      for (int c : dag.children(v)) frontier.push_back({c, false});
    } else {
      if (!conditioned) {
        for (int c : dag.children(v)) frontier.push_back({c, false});
      }
      if (opens_collider[static_cast<size_t>(v)]) {
        for (int p : dag.parents(v)) frontier.push_back({p, true});
      }
    }
  }
  return true;
}

int minimum_window(const FullTimeGraphSpec& spec) {
  return 4 * (1 + spec.max_lag()) + spec.n_obs + spec.n_hidden;
}

UnrolledDag::UnrolledDag(const FullTimeGraphSpec& spec, int window, bool check_window)
    : dag_(0), window_(window), n_series_(spec.n_series()) {
  if (window < 1 || (check_window && window < minimum_window(spec))) {
    throw_usage("unroll: window " + std::to_string(window) + " smaller than required " +
                std::to_string(minimum_window(spec)));
  }
  const std::vector<std::string> issues = check_structure(spec);
  if (!issues.empty()) throw_usage("unroll: invalid spec: " + issues.front());

  dag_ = Dag(window * n_series_);
  hidden_.resize(static_cast<size_t>(n_series_));
  for (int s = 0; s < n_series_; ++s) hidden_[static_cast<size_t>(s)] = spec.is_hidden(s);

  for (int t = 0; t < window; ++t) {
    for (int s = 0; s < n_series_; ++s) {
      if (t >= 1 && !spec.memoryless(s)) dag_.add_edge(node(s, t - 1), node(s, t));
    }
    for (const CrossEdge& e : spec.edges) {
      if (t >= e.lag) dag_.add_edge(node(e.source, t - e.lag), node(e.dest, t));
    }
  }
}

bool UnrolledDag::contains(int series, int time) const {
  return series >= 0 && series < n_series_ && time >= 0 && time < window_;
}

int UnrolledDag::node(int series, int time) const {
  if (!contains(series, time)) {
    throw_internal("unroll: node (" + std::to_string(series) + ", " + std::to_string(time) + ") outside window");
  }
  return time * n_series_ + series;
}

std::pair<int, int> UnrolledDag::series_time(int node) const { return {node % n_series_, node / n_series_}; }

bool UnrolledDag::observable(int node) const { return !hidden_.at(static_cast<size_t>(node % n_series_)); }

std::optional<int> graphical_min_lag(const UnrolledDag& dag, const FullTimeGraphSpec& spec, int candidate,
                                     int anchor, int max_w) {
  std::vector<int> past;
  for (int s = 0; s < anchor; ++s) past.push_back(dag.node(candidate, s));
  const int a = dag.node(candidate, anchor);
  for (int w = 0; w <= max_w; ++w) {
    if (!dag.contains(spec.target(), anchor + w)) break;
    if (!d_separated(dag.dag(), a, dag.node(spec.target(), anchor + w), past)) return w;
  }
  return std::nullopt;
}

namespace {

struct Layout {
  int window;
  int anchor_a;
  int anchor_b;
  int max_w;
};

// Two anchors 2 * (max lag + 1) apart with room for lags reaching a path
// through every series.
Layout layout_for(const FullTimeGraphSpec& spec, int requested) {
  const int gap = 2 * (spec.max_lag() + 1);
  const int reach = spec.n_series() * spec.max_lag() + 1;
  const int needed = 2 * (reach + 2) + gap + 4;
  Layout l;
  l.window = std::max({requested, needed, minimum_window(spec)});
  l.anchor_a = l.window / 2 - gap / 2;
  l.anchor_b = l.anchor_a + gap;
  l.max_w = std::min(l.window - l.anchor_b - 2, l.anchor_a - 2);
  return l;
}

LagTable lags_at(const UnrolledDag& dag, const FullTimeGraphSpec& spec, int anchor, int max_w) {
  LagTable table;
  for (int i = 0; i < spec.n_obs; ++i) table.lags.push_back(graphical_min_lag(dag, spec, i, anchor, max_w));
  return table;
}

int series_of(const FullTimeGraphSpec& spec, const NodeRef& ref) {
  return ref.series == kTarget ? spec.target() : ref.series;
}

PopulationConditions conditions_at(const UnrolledDag& dag, const FullTimeGraphSpec& spec, int i,
                                   const LagTable& lags, int anchor) {
  const int w = lags.lag(i);
  std::vector<int> given;
  for (const NodeRef& ref : build_conditioning_set(i, lags)) {
    given.push_back(dag.node(series_of(spec, ref), anchor + ref.offset));
  }
  given.push_back(dag.node(spec.target(), anchor + w - 1));
  const int y = dag.node(spec.target(), anchor + w);

  PopulationConditions out;
  out.cond1_dependent = !d_separated(dag.dag(), dag.node(i, anchor), y, given);
  given.push_back(dag.node(i, anchor));
  out.cond2_independent = d_separated(dag.dag(), dag.node(i, anchor - 1), y, given);
  return out;
}

}  // namespace

LagTable graphical_lags(const FullTimeGraphSpec& spec, const OracleOptions& options) {
  const Layout l = layout_for(spec, options.window);
  const UnrolledDag dag(spec, l.window);
  LagTable a = lags_at(dag, spec, l.anchor_a, l.max_w);
  if (a != lags_at(dag, spec, l.anchor_b, l.max_w)) {
    throw_internal("graphical lags differ between anchors; enlarge the window");
  }
  return a;
}

LagTable path_lags(const FullTimeGraphSpec& spec) {
  LagTable table;
  for (int i = 0; i < spec.n_obs; ++i) {
    const std::set<int> lags = collider_free_lags(spec, i);
    table.lags.push_back(lags.empty() ? std::nullopt : std::optional<int>(*lags.begin()));
  }
  return table;
}

PopulationConditions population_conditions(const FullTimeGraphSpec& spec, int candidate, const LagTable& lags,
                                           const OracleOptions& options) {
  if (candidate < 0 || candidate >= spec.n_obs) throw_usage("population_conditions: candidate out of range");
  if (lags.size() != spec.n_obs) throw_usage("population_conditions: lag table size mismatch");
  if (!lags.present(candidate)) throw_usage("population_conditions: candidate has no graphical lag");
  int spread = 1;
  for (const auto& w : lags.lags)
    if (w) spread = std::max(spread, *w + 1);
  Layout l = layout_for(spec, options.window);
  if (l.anchor_a - spread - 1 < 0 || l.anchor_b + spread + 1 >= l.window) {
    l = layout_for(spec, 2 * (2 * spread + 4) + l.anchor_b - l.anchor_a);
  }
  const UnrolledDag dag(spec, l.window);
  const PopulationConditions a = conditions_at(dag, spec, candidate, lags, l.anchor_a);
  if (a != conditions_at(dag, spec, candidate, lags, l.anchor_b)) {
    throw_internal("population conditions differ between anchors; enlarge the window");
  }
  return a;
}

namespace {

std::string describe(const FullTimeGraphSpec& spec, int i, const LagTable& lags, const PopulationConditions& pc,
                     const CauseLabel& label) {
  std::ostringstream ss;
  ss << spec.series_name(i) << ": lag=" << (lags.present(i) ? std::to_string(lags.lag(i)) : "none")
     << " cond1_dependent=" << pc.cond1_dependent << " cond2_independent=" << pc.cond2_independent
     << " direct=" << label.is_direct << " indirect=" << label.is_indirect
     << " sg_unconfounded=" << label.is_sg_unconfounded;
  return ss.str();
}

}  // namespace

OracleSuiteSummary run_oracle_suite(const OracleSuiteOptions& options) {
  if (options.n_specs < 0 || options.min_obs < 1 || options.max_obs < options.min_obs ||
      options.min_hidden < 0 || options.max_hidden < options.min_hidden ||
      !(options.min_density >= 0.0) || !(options.max_density <= 1.0) ||
      options.max_density < options.min_density) {
    throw_usage("oracle suite: invalid options");
  }
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<int> obs(options.min_obs, options.max_obs);
  std::uniform_int_distribution<int> hidden(options.min_hidden, options.max_hidden);
  std::uniform_real_distribution<double> density(options.min_density, options.max_density);

  OracleSuiteSummary summary;
  const long max_samples = 1000L * std::max(options.n_specs, 1);
  while (summary.specs_checked < options.n_specs) {
    if (summary.specs_sampled >= max_samples) throw_data("oracle suite: too few specs satisfy the sampling filter");
    GraphConfig cfg;
    cfg.n_obs = obs(rng);
    cfg.n_hidden = hidden(rng);
    cfg.p_cross = density(rng);
    cfg.p_target = density(rng);
    cfg.multi_lag_mode = options.multi_lag_mode;
    const std::uint64_t spec_seed = rng();
    ++summary.specs_sampled;
    const FullTimeGraphSpec spec = sample_graph_spec(cfg, spec_seed);
    if (!options.multi_lag_mode && !has_single_lag_dependencies(spec)) continue;
    ++summary.specs_checked;

    const OracleOptions oracle{options.window};
    const LagTable lags = graphical_lags(spec, oracle);
    const GroundTruth truth = ground_truth(spec);
    const LagTable by_path = options.multi_lag_mode ? LagTable{} : path_lags(spec);
    for (int i = 0; i < spec.n_obs; ++i) {
      const CauseLabel& label = truth.labels[static_cast<size_t>(i)];
      PopulationConditions pc;
      if (lags.present(i)) {
        ++summary.candidates_with_lag;
        pc = population_conditions(spec, i, lags, oracle);
      }
      auto record = [&](const char* kind) {
        summary.violations.push_back({kind, i, describe(spec, i, lags, pc, label), spec});
      };
      if (!options.multi_lag_mode && label.is_direct && label.is_sg_unconfounded) {
        ++summary.necessity_checked;
        if (!pc.both()) {
          ++summary.necessity_violations;
          record("necessity");
        }
        if (!by_path.present(i) || !population_conditions(spec, i, by_path, oracle).both()) {
          ++summary.path_lag_necessity_violations;
        }
      }
      if (pc.both()) {
        ++summary.soundness_checked;
        const bool ok = options.multi_lag_mode ? label.is_cause : (label.is_cause && label.is_sg_unconfounded);
        if (!ok) {
          ++summary.soundness_violations;
          record(options.multi_lag_mode ? "multi-lag-soundness" : "soundness");
        }
      }
    }
  }
  return summary;
}

}  // namespace sypi
