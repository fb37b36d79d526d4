#include "sypi/bench.hpp"

#include "sypi/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace sypi {

using nlohmann::json;

Confusion& Confusion::operator+=(const Confusion& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  direct_tp += o.direct_tp;
  direct_fn += o.direct_fn;
  return *this;
}

namespace {

double ratio(long num, long den) { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }

}  // namespace

double Confusion::fpr() const { return ratio(fp, fp + tn); }
double Confusion::fnr_total() const { return ratio(fn, fn + tp); }
double Confusion::fnr_direct() const { return ratio(direct_fn, direct_fn + direct_tp); }

Confusion compute_metrics(const std::vector<bool>& selected, const GroundTruth& truth) {
  if (selected.size() != truth.labels.size()) throw_usage("compute_metrics: decision count differs from labels");
  Confusion c;
  for (size_t i = 0; i < selected.size(); ++i) {
    const CauseLabel& label = truth.labels[i];
    if (label.is_cause) {
      (selected[i] ? c.tp : c.fn) += 1;
      if (label.is_direct) (selected[i] ? c.direct_tp : c.direct_fn) += 1;
    } else {
      (selected[i] ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

Confusion compute_metrics(std::span<const Decision> decisions, const GroundTruth& truth) {
  std::vector<bool> selected;
  selected.reserve(decisions.size());
  for (Decision d : decisions) selected.push_back(d == Decision::Cause);
  return compute_metrics(selected, truth);
}

GraphConfig CellConfig::graph_config() const {
  GraphConfig g;
  g.n_obs = n_obs;
  g.n_hidden = n_hidden;
  g.p_cross = p_cross;
  g.p_target = p_target;
  g.noise_pct = noise_pct;
  g.multi_lag_mode = multi_lag_mode;
  return g;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) throw_usage("log_grid: invalid range");
  std::vector<double> out;
  if (points == 1) return {lo};
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int k = 0; k < points; ++k) out.push_back(std::exp(a + (b - a) * k / (points - 1)));
  return out;
}

std::vector<CellConfig> GridConfig::cells() const {
  std::vector<CellConfig> out;
  if (n_graphs <= 0) return out;
  for (long t : T)
    for (int h : n_hidden)
      for (double pc : p_cross)
        for (double pt : p_target)
          for (double noise : noise_pct)
            for (int o : n_obs) {
              CellConfig c;
              c.T = t;
              c.n_obs = o;
              c.n_hidden = h;
              c.p_cross = pc;
              c.p_target = pt;
              c.noise_pct = noise;
              c.n_graphs = n_graphs;
              c.multi_lag_mode = multi_lag_mode;
              c.method = method;
              out.push_back(c);
            }
  return out;
}

namespace {

template <typename T>
std::vector<T> as_list(const json& value, const char* key) {
  if (value.is_array()) {
    if (value.empty()) throw_usage(std::string("grid: '") + key + "' must not be empty");
    return value.get<std::vector<T>>();
  }
  return {value.get<T>()};
}

void reject_unknown(const json& object, const std::set<std::string>& allowed, const std::string& where) {
  if (!object.is_object()) throw_usage("grid: '" + where + "' must be an object");
  for (const auto& item : object.items()) {
    if (!allowed.count(item.key())) throw_usage("grid: unknown key '" + item.key() + "' in " + where);
  }
}

}  // namespace

GridConfig grid_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw_usage(std::string("grid: malformed JSON: ") + e.what());
  }
  reject_unknown(j,
                 {"T", "n_obs", "n_hidden", "p_cross", "p_target", "noise_pct", "n_graphs", "multi_lag_mode",
                  "threshold1", "threshold2", "lag", "granger", "roc"},
                 "grid");
  GridConfig g;
  try {
    if (j.contains("T")) g.T = as_list<long>(j["T"], "T");
    if (j.contains("n_obs")) g.n_obs = as_list<int>(j["n_obs"], "n_obs");
    if (j.contains("n_hidden")) g.n_hidden = as_list<int>(j["n_hidden"], "n_hidden");
    if (j.contains("p_cross")) g.p_cross = as_list<double>(j["p_cross"], "p_cross");
    if (j.contains("p_target")) g.p_target = as_list<double>(j["p_target"], "p_target");
    if (j.contains("noise_pct")) g.noise_pct = as_list<double>(j["noise_pct"], "noise_pct");
    if (j.contains("n_graphs")) g.n_graphs = j["n_graphs"].get<int>();
    if (j.contains("multi_lag_mode")) g.multi_lag_mode = j["multi_lag_mode"].get<bool>();
    if (j.contains("threshold1")) g.method.threshold1 = j["threshold1"].get<double>();
    if (j.contains("threshold2")) g.method.threshold2 = j["threshold2"].get<double>();
    if (j.contains("lag")) {
      const json& lag = j["lag"];
      reject_unknown(lag, {"max_lag", "lambda", "coef_threshold", "target_lags"}, "lag");
      if (lag.contains("max_lag")) g.method.lag.max_lag = lag["max_lag"].get<int>();
      if (lag.contains("lambda")) g.method.lag.lambda = lag["lambda"].get<double>();
      if (lag.contains("coef_threshold")) g.method.lag.coef_threshold = lag["coef_threshold"].get<double>();
      if (lag.contains("target_lags")) g.method.lag.target_lags = lag["target_lags"].get<int>();
    }
    if (j.contains("granger")) {
      const json& gr = j["granger"];
      reject_unknown(gr, {"enabled", "lambda", "max_lag"}, "granger");
      if (gr.contains("enabled")) g.method.run_granger = gr["enabled"].get<bool>();
      if (gr.contains("lambda")) g.method.granger_lambda = gr["lambda"].get<double>();
      if (gr.contains("max_lag")) g.method.granger_max_lag = gr["max_lag"].get<int>();
    }
    if (j.contains("roc")) {
      const json& roc = j["roc"];
      reject_unknown(roc, {"threshold1_grid", "threshold2", "lambda_grid"}, "roc");
      if (roc.contains("threshold1_grid")) g.roc.threshold1_grid = as_list<double>(roc["threshold1_grid"], "threshold1_grid");
      if (roc.contains("threshold2")) g.roc.threshold2 = roc["threshold2"].get<double>();
      if (roc.contains("lambda_grid")) g.roc.lambda_grid = as_list<double>(roc["lambda_grid"], "lambda_grid");
    }
  } catch (const json::exception& e) {
    throw_usage(std::string("grid: ") + e.what());
  }
  if (g.n_graphs < 0) throw_usage("grid: n_graphs must be >= 0");
  return g;
}

std::string grid_to_json(const GridConfig& g) {
  json j;
  j["T"] = g.T;
  j["n_obs"] = g.n_obs;
  j["n_hidden"] = g.n_hidden;
  j["p_cross"] = g.p_cross;
  j["p_target"] = g.p_target;
  j["noise_pct"] = g.noise_pct;
  j["n_graphs"] = g.n_graphs;
  j["multi_lag_mode"] = g.multi_lag_mode;
  j["threshold1"] = g.method.threshold1;
  j["threshold2"] = g.method.threshold2;
  j["lag"] = {{"max_lag", g.method.lag.max_lag},
              {"lambda", g.method.lag.lambda},
              {"coef_threshold", g.method.lag.coef_threshold},
              {"target_lags", g.method.lag.target_lags}};
  j["granger"] = {{"enabled", g.method.run_granger},
                  {"lambda", g.method.granger_lambda},
                  {"max_lag", g.method.granger_max_lag}};
  j["roc"] = {{"threshold1_grid", g.roc.threshold1_grid.empty() ? log_grid(1e-4, 0.5, 25) : g.roc.threshold1_grid},
              {"threshold2", g.roc.threshold2},
              {"lambda_grid", g.roc.lambda_grid.empty() ? log_grid(1e-4, 1.0, 25) : g.roc.lambda_grid}};
  return j.dump(2);
}

namespace {

Rates rates_of(const BenchCell& cell, bool granger, Aggregation how) {
  if (how == Aggregation::Pooled) {
    const Confusion& c = granger ? cell.granger : cell.sypi;
    return {c.fpr(), c.fnr_total(), c.fnr_direct()};
  }
  double sums[3] = {0, 0, 0};
  long counts[3] = {0, 0, 0};
  for (const GraphRecord& g : cell.graphs) {
    if (!g.error.empty()) continue;
    const Confusion& c = granger ? g.granger : g.sypi;
    if (c.fp + c.tn > 0) sums[0] += c.fpr(), ++counts[0];
    if (c.fn + c.tp > 0) sums[1] += c.fnr_total(), ++counts[1];
    if (c.direct_fn + c.direct_tp > 0) sums[2] += c.fnr_direct(), ++counts[2];
  }
  return {counts[0] ? sums[0] / counts[0] : 0.0, counts[1] ? sums[1] / counts[1] : 0.0,
          counts[2] ? sums[2] / counts[2] : 0.0};
}

}  // namespace

Rates BenchCell::sypi_rates(Aggregation how) const { return rates_of(*this, false, how); }
Rates BenchCell::granger_rates(Aggregation how) const { return rates_of(*this, true, how); }

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t cell, std::uint64_t graph, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(root), static_cast<std::uint32_t>(root >> 32),
                    static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(graph),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

GeneratedGraph generate_graph(const CellConfig& cell, std::uint64_t root, std::uint64_t cell_index,
                              std::uint64_t graph_index) {
  GeneratedGraph g;
  g.spec = sample_graph_spec(cell.graph_config(), derive_seed(root, cell_index, graph_index, 0));
  g.data.panel = simulate_panel(g.spec, cell.T, derive_seed(root, cell_index, graph_index, 1));
  g.data.truth = ground_truth(g.spec);
  return g;
}

void parallel_for(int n, int parallelism, const std::function<void(int)>& fn) {
  const int workers = std::clamp(parallelism, 1, std::max(n, 1));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

DiscoveryOptions discovery_options(const MethodParams& m) {
  DiscoveryOptions o;
  o.threshold1 = m.threshold1;
  o.threshold2 = m.threshold2;
  o.lag = m.lag;
  return o;
}

GraphRecord run_graph(const CellConfig& cell, std::uint64_t root, int cell_index, int graph_index) {
  GraphRecord rec;
  rec.graph = graph_index;
  rec.seed = derive_seed(root, static_cast<std::uint64_t>(cell_index), static_cast<std::uint64_t>(graph_index), 0);
  try {
    const GeneratedGraph g = generate_graph(cell, root, static_cast<std::uint64_t>(cell_index),
                                            static_cast<std::uint64_t>(graph_index));
    rec.stabilized = g.spec.stabilized;
    for (const CauseLabel& l : g.data.truth.labels) {
      rec.n_causes += l.is_cause;
      rec.n_direct += l.is_direct;
    }
    const DiscoveryReport report = discover(g.data.panel, discovery_options(cell.method));
    std::vector<Decision> decisions;
    for (const CandidateResult& c : report.candidates) decisions.push_back(c.decision);
    rec.sypi = compute_metrics(decisions, g.data.truth);
    if (cell.method.run_granger) {
      const GrangerReport gr = lasso_granger(g.data.panel, cell.method.granger_lambda, cell.method.granger_max_lag);
      rec.granger = compute_metrics(gr.selected, g.data.truth);
    }
  } catch (const Error& e) {
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

std::vector<BenchCell> run_grid(std::span<const CellConfig> cells, std::uint64_t root_seed, int parallelism) {
  std::vector<BenchCell> out(cells.size());
  std::vector<std::pair<int, int>> jobs;
  for (size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].n_graphs < 0) throw_usage("run_grid: n_graphs must be >= 0");
    out[c].config = cells[c];
    out[c].graphs.resize(static_cast<size_t>(cells[c].n_graphs));
    for (int g = 0; g < cells[c].n_graphs; ++g) jobs.push_back({static_cast<int>(c), g});
  }
  parallel_for(static_cast<int>(jobs.size()), parallelism, [&](int k) {
    const auto [c, g] = jobs[static_cast<size_t>(k)];
    out[static_cast<size_t>(c)].graphs[static_cast<size_t>(g)] = run_graph(cells[static_cast<size_t>(c)], root_seed, c, g);
  });
  for (BenchCell& cell : out) {
    for (const GraphRecord& rec : cell.graphs) {
      if (!rec.error.empty()) {
        ++cell.failed_graphs;
        continue;
      }
      cell.sypi += rec.sypi;
      cell.granger += rec.granger;
    }
  }
  return out;
}

double interpolate_tpr(std::span<const RocPoint> curve, double fpr) {
  // Upper envelope: best TPR at each FPR, made non-decreasing, from (0, 0).
  std::vector<std::pair<double, double>> env{{0.0, 0.0}};
  for (const RocPoint& p : curve) {
    const double tpr = std::max(p.tpr, env.back().second);
    if (p.fpr == env.back().first) {
      env.back().second = tpr;
    } else {
      env.push_back({p.fpr, tpr});
    }
  }
  for (size_t k = 1; k < env.size(); ++k) {
    if (env[k].first >= fpr) {
      const auto [f0, t0] = env[k - 1];
      const auto [f1, t1] = env[k];
      return t0 + (t1 - t0) * (fpr - f0) / (f1 - f0);
    }
  }
  return env.back().second;
}

RocCurves roc_sweep(const CellConfig& cell, std::uint64_t root_seed, const RocOptions& options, int parallelism,
                    std::uint64_t cell_index) {
  const std::vector<double> t1_grid =
      options.threshold1_grid.empty() ? log_grid(1e-4, 0.5, 25) : options.threshold1_grid;
  const std::vector<double> lambda_grid = options.lambda_grid.empty() ? log_grid(1e-4, 1.0, 25) : options.lambda_grid;

  struct Evaluated {
    bool ok = false;
    GroundTruth truth;
    std::vector<CandidateResult> sypi;
    std::vector<std::vector<bool>> granger;  // per lambda
  };
  std::vector<Evaluated> graphs(static_cast<size_t>(std::max(cell.n_graphs, 0)));
  parallel_for(cell.n_graphs, parallelism, [&](int g) {
    Evaluated& ev = graphs[static_cast<size_t>(g)];
    try {
      const GeneratedGraph gen = generate_graph(cell, root_seed, cell_index, static_cast<std::uint64_t>(g));
      ev.truth = gen.data.truth;
      ev.sypi = discover(gen.data.panel, discovery_options(cell.method)).candidates;
      for (double lambda : lambda_grid) {
        ev.granger.push_back(lasso_granger(gen.data.panel, lambda, cell.method.granger_max_lag).selected);
      }
      ev.ok = true;
    } catch (const Error&) {
      ev.ok = false;
    }
  });

  RocCurves curves;
  for (double t1 : t1_grid) {
    Confusion total;
    for (const Evaluated& ev : graphs) {
      if (!ev.ok) continue;
      std::vector<bool> selected;
      for (const CandidateResult& c : ev.sypi) selected.push_back(decide(c, t1, options.threshold2) == Decision::Cause);
      total += compute_metrics(selected, ev.truth);
    }
    curves.sypi.push_back({t1, total.tpr(), total.fpr()});
  }
  for (size_t k = 0; k < lambda_grid.size(); ++k) {
    Confusion total;
    for (const Evaluated& ev : graphs) {
      if (ev.ok) total += compute_metrics(ev.granger[k], ev.truth);
    }
    curves.granger.push_back({lambda_grid[k], total.tpr(), total.fpr()});
  }
  auto by_fpr = [](const RocPoint& a, const RocPoint& b) {
    return a.fpr != b.fpr ? a.fpr < b.fpr : a.tpr < b.tpr;
  };
  std::sort(curves.sypi.begin(), curves.sypi.end(), by_fpr);
  std::sort(curves.granger.begin(), curves.granger.end(), by_fpr);
  return curves;
}

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(12) << v;
  return ss.str();
}

void cell_columns(std::ostringstream& ss, const CellConfig& c) {
  ss << c.T << ',' << c.n_obs << ',' << c.n_hidden << ',' << fmt(c.p_cross) << ',' << fmt(c.p_target) << ','
     << fmt(c.noise_pct) << ',' << (c.multi_lag_mode ? 1 : 0);
}

constexpr const char* kCellHeader = "T,n_obs,n_hidden,p_cross,p_target,noise_pct,multi_lag_mode";

void confusion_columns(std::ostringstream& ss, const Confusion& c) {
  ss << c.tp << ',' << c.fp << ',' << c.tn << ',' << c.fn << ',' << c.direct_tp << ',' << c.direct_fn << ','
     << fmt(c.fpr()) << ',' << fmt(c.fnr_total()) << ',' << fmt(c.fnr_direct());
}

std::string confusion_header(const std::string& prefix) {
  std::string out;
  for (const char* name : {"tp", "fp", "tn", "fn", "direct_tp", "direct_fn", "fpr", "fnr_total", "fnr_direct"}) {
    out += "," + prefix + name;
  }
  return out;
}

}  // namespace

std::string cells_to_csv(std::span<const BenchCell> cells) {
  std::ostringstream ss;
  ss << "cell," << kCellHeader << ",n_graphs,failed_graphs,threshold1,threshold2" << confusion_header("sypi_")
     << ",granger_lambda" << confusion_header("granger_") << '\n';
  for (size_t k = 0; k < cells.size(); ++k) {
    const BenchCell& cell = cells[k];
    ss << k << ',';
    cell_columns(ss, cell.config);
    ss << ',' << cell.config.n_graphs << ',' << cell.failed_graphs << ',' << fmt(cell.config.method.threshold1) << ','
       << fmt(cell.config.method.threshold2) << ',';
    confusion_columns(ss, cell.sypi);
    if (cell.config.method.run_granger) {
      ss << ',' << fmt(cell.config.method.granger_lambda) << ',';
      confusion_columns(ss, cell.granger);
    } else {
      ss << ",,,,,,,,,,";
    }
    ss << '\n';
  }
  return ss.str();
}

std::string graphs_to_csv(std::span<const BenchCell> cells) {
  std::ostringstream ss;
  ss << "cell,graph,seed,n_causes,n_direct,stabilized" << confusion_header("sypi_") << confusion_header("granger_")
     << ",error\n";
  for (size_t k = 0; k < cells.size(); ++k) {
    for (const GraphRecord& g : cells[k].graphs) {
      ss << k << ',' << g.graph << ',' << g.seed << ',' << g.n_causes << ',' << g.n_direct << ','
         << (g.stabilized ? 1 : 0) << ',';
      confusion_columns(ss, g.sypi);
      ss << ',';
      confusion_columns(ss, g.granger);
      std::string err = g.error;
      std::replace(err.begin(), err.end(), ',', ';');
      std::replace(err.begin(), err.end(), '\n', ' ');
      ss << ',' << err << '\n';
    }
  }
  return ss.str();
}

std::string roc_to_csv(std::span<const RocCurves> curves, std::span<const CellConfig> cells) {
  std::ostringstream ss;
  ss << "cell," << kCellHeader << ",method,threshold,fpr,tpr\n";
  for (size_t k = 0; k < curves.size(); ++k) {
    auto emit = [&](const char* method, const std::vector<RocPoint>& pts) {
      for (const RocPoint& p : pts) {
        ss << k << ',';
        cell_columns(ss, cells[k]);
        ss << ',' << method << ',' << fmt(p.threshold) << ',' << fmt(p.fpr) << ',' << fmt(p.tpr) << '\n';
      }
    };
    emit("sypi", curves[k].sypi);
    emit("lasso_granger", curves[k].granger);
  }
  return ss.str();
}

std::string manifest_json(const std::string& command, std::uint64_t seed, int parallelism, const GridConfig& grid) {
  json j;
  j["tool"] = "sypi";
  j["version"] = SYPI_VERSION_STRING;
  j["command"] = command;
  j["seed"] = seed;
  j["parallelism"] = parallelism;
  j["aggregation"] = "pooled";
  j["grid"] = json::parse(grid_to_json(grid));
  return j.dump(2) + "\n";
}

}  // namespace sypi
