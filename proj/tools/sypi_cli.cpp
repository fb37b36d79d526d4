// sypi command-line tool. Talks to the library only through the C API.

#include <sypi/sypi.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

struct Failure {
  int code;
  std::string message;
};

void check(sypi_status status) {
  if (status != SYPI_OK) throw Failure{static_cast<int>(status), sypi_last_error()};
}

// Files written by the current command; removed if the command fails.
std::vector<std::string> artifacts;

void track(const std::string& path) { artifacts.push_back(path); }

void remove_artifacts() {
  std::error_code ec;
  for (const std::string& p : artifacts) std::filesystem::remove(p, ec);
  artifacts.clear();
}

void write_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Failure{SYPI_ERR_DATA, "cannot write " + path};
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Failure{SYPI_ERR_DATA, "cannot write " + path};
  }
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Panel = Handle<sypi_panel, sypi_panel_free>;
using Report = Handle<sypi_report, sypi_report_free>;
using Spec = Handle<sypi_spec, sypi_spec_free>;
using Grid = Handle<sypi_grid, sypi_grid_free>;
using Bench = Handle<sypi_bench, sypi_bench_free>;
using Roc = Handle<sypi_roc, sypi_roc_free>;

json manifest_base(const std::string& command, const std::vector<std::string>& argv) {
  return json{{"format", "sypi-manifest"},
              {"version", 1},
              {"tool", "sypi"},
              {"tool_version", sypi_version()},
              {"command", command},
              {"argv", argv}};
}

void write_manifest(const std::string& path, const json& manifest) {
  track(path);
  write_atomic(path, manifest.dump(2) + "\n");
}

std::string default_manifest(const std::string& manifest, const std::string& primary) {
  return manifest.empty() ? primary + ".manifest.json" : manifest;
}

json lag_json(const sypi_lag_options& lag) {
  return {{"max_lag", lag.max_lag},
          {"lambda", lag.lambda},
          {"coef_threshold", lag.coef_threshold},
          {"target_lags", lag.target_lags}};
}

struct DiscoverArgs {
  std::string input;
  std::string target;
  std::string preset = "default";
  double threshold1 = 0.0;
  double threshold2 = 0.0;
  int max_lag = 0;
  double lag_lambda = 0.0;
  double lag_threshold = 0.0;
  int target_lags = 0;
  bool strict = false;
  std::string time_column;
  std::string out;
  std::string manifest;
  CLI::Option* t1 = nullptr;
  CLI::Option* t2 = nullptr;
  CLI::Option* ml = nullptr;
  CLI::Option* ll = nullptr;
  CLI::Option* lt = nullptr;
  CLI::Option* tl = nullptr;
};

void run_discover(const DiscoverArgs& a, const std::vector<std::string>& argv) {
  sypi_discover_options opts;
  if (a.preset == "real-data") {
    sypi_discover_options_real_data(&opts);
  } else {
    sypi_discover_options_default(&opts);
  }
  if (a.t1->count()) opts.threshold1 = a.threshold1;
  if (a.t2->count()) opts.threshold2 = a.threshold2;
  if (a.ml->count()) opts.lag.max_lag = a.max_lag;
  if (a.ll->count()) opts.lag.lambda = a.lag_lambda;
  if (a.lt->count()) opts.lag.coef_threshold = a.lag_threshold;
  if (a.tl->count()) opts.lag.target_lags = a.target_lags;

  sypi_csv_options csv;
  sypi_csv_options_default(&csv);
  csv.strict = a.strict;
  csv.time_column = a.time_column.c_str();

  Panel panel;
  check(sypi_panel_load_csv(a.input.c_str(), a.target.c_str(), &csv, panel.out()));
  for (size_t i = 0; i < sypi_panel_warning_count(panel.get()); ++i) {
    std::cerr << "warning: " << sypi_panel_warning(panel.get(), i) << "\n";
  }
  Report report;
  check(sypi_discover(panel.get(), &opts, report.out()));
  std::cout << sypi_report_table(report.get());

  if (!a.out.empty()) {
    track(a.out);
    check(sypi_report_write_json(report.get(), a.out.c_str()));
    json m = manifest_base("discover", argv);
    m["config"] = {{"input", a.input},
                   {"target", a.target},
                   {"preset", a.preset},
                   {"strict", a.strict},
                   {"time_column", a.time_column},
                   {"threshold1", opts.threshold1},
                   {"threshold2", opts.threshold2},
                   {"lag", lag_json(opts.lag)}};
    m["outputs"] = {{"report", a.out}};
    write_manifest(default_manifest(a.manifest, a.out), m);
  }
}

struct SimulateArgs {
  std::string spec_in;
  int n_obs = 3;
  int n_hidden = 1;
  double p_cross = 0.15;
  double p_target = 0.2;
  double noise = 0.2;
  bool multi_lag = false;
  long T = 2000;
  std::uint64_t seed = 1;
  std::string out;
  std::string spec_out;
  std::string manifest;
};

void run_simulate(const SimulateArgs& a, const std::vector<std::string>& argv) {
  sypi_graph_config cfg;
  sypi_graph_config_default(&cfg);
  cfg.n_obs = a.n_obs;
  cfg.n_hidden = a.n_hidden;
  cfg.p_cross = a.p_cross;
  cfg.p_target = a.p_target;
  cfg.noise_pct = a.noise;
  cfg.multi_lag_mode = a.multi_lag;

  Spec spec;
  if (!a.spec_in.empty()) {
    check(sypi_spec_load(a.spec_in.c_str(), spec.out()));
  } else {
    check(sypi_spec_sample(&cfg, a.seed, spec.out()));
  }
  if (a.T <= 0) throw Failure{SYPI_ERR_USAGE, "--T must be positive"};
  Panel panel;
  check(sypi_simulate(spec.get(), static_cast<size_t>(a.T), a.seed, panel.out()));

  const std::string spec_out = a.spec_out.empty() ? a.out + ".spec.json" : a.spec_out;
  track(a.out);
  check(sypi_panel_save_csv(panel.get(), a.out.c_str()));
  track(spec_out);
  check(sypi_spec_save(spec.get(), spec_out.c_str()));

  json m = manifest_base("simulate", argv);
  m["seed"] = a.seed;
  m["config"] = {{"T", a.T}, {"spec_input", a.spec_in}};
  if (a.spec_in.empty()) {
    m["config"]["graph"] = {{"n_obs", cfg.n_obs},         {"n_hidden", cfg.n_hidden},
                            {"p_cross", cfg.p_cross},     {"p_target", cfg.p_target},
                            {"noise_pct", cfg.noise_pct}, {"multi_lag_mode", a.multi_lag}};
  }
  m["outputs"] = {{"panel", a.out}, {"spec", spec_out}};
  write_manifest(default_manifest(a.manifest, a.out), m);
  std::cout << "wrote " << a.out << " (" << sypi_panel_length(panel.get()) << " rows, "
            << sypi_panel_candidates(panel.get()) << " candidates) and " << spec_out << "\n";
}

struct BenchArgs {
  std::string grid;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;
  std::string graphs_out;
  std::string manifest;
};

void run_bench(const BenchArgs& a, const std::vector<std::string>& argv) {
  Grid grid;
  check(sypi_grid_load(a.grid.c_str(), grid.out()));
  Bench bench;
  check(sypi_bench_run(grid.get(), a.seed, a.threads, bench.out()));
  track(a.out);
  if (!a.graphs_out.empty()) track(a.graphs_out);
  check(sypi_bench_write_csv(bench.get(), a.out.c_str(), a.graphs_out.empty() ? nullptr : a.graphs_out.c_str()));

  json m = manifest_base("bench", argv);
  m["seed"] = a.seed;
  m["threads"] = a.threads;
  m["grid"] = json::parse(sypi_grid_json(grid.get()));
  m["outputs"] = {{"cells", a.out}, {"graphs", a.graphs_out}};
  write_manifest(default_manifest(a.manifest, a.out), m);

  for (size_t i = 0; i < sypi_bench_cells(bench.get()); ++i) {
    sypi_cell_metrics s;
    check(sypi_bench_cell(bench.get(), i, &s, nullptr));
    std::printf("cell %zu: T=%ld obs=%d hidden=%d  FPR=%.4f  FNR=%.4f  FNR_direct=%.4f  failed=%d\n", i, s.T,
                s.n_obs, s.n_hidden, s.fpr, s.fnr_total, s.fnr_direct, s.failed_graphs);
  }
}

void run_roc(const BenchArgs& a, const std::vector<std::string>& argv) {
  Grid grid;
  check(sypi_grid_load(a.grid.c_str(), grid.out()));
  Roc roc;
  check(sypi_roc_run(grid.get(), a.seed, a.threads, roc.out()));
  track(a.out);
  check(sypi_roc_write_csv(roc.get(), a.out.c_str()));
  json m = manifest_base("roc", argv);
  m["seed"] = a.seed;
  m["threads"] = a.threads;
  m["grid"] = json::parse(sypi_grid_json(grid.get()));
  m["outputs"] = {{"roc", a.out}};
  write_manifest(default_manifest(a.manifest, a.out), m);
  std::cout << "wrote " << a.out << "\n";
}

struct OracleArgs {
  int specs = 200;
  std::uint64_t seed = 7;
  bool multi_lag = false;
  int window = 40;
  std::string counterexamples = "counterexamples";
  std::string manifest;
};

int run_oracle(const OracleArgs& a, const std::vector<std::string>& argv) {
  sypi_oracle_options opts;
  sypi_oracle_options_default(&opts);
  opts.n_specs = a.specs;
  opts.seed = a.seed;
  opts.multi_lag_mode = a.multi_lag;
  opts.window = a.window;

  sypi_oracle_options dry = opts;
  sypi_oracle_summary s;
  check(sypi_oracle_check(&dry, nullptr, &s));
  const int violations = s.necessity_violations + s.soundness_violations;
  if (violations > 0 && !a.counterexamples.empty()) {
    std::filesystem::create_directories(a.counterexamples);
    check(sypi_oracle_check(&opts, a.counterexamples.c_str(), &s));
  }

  std::printf("checked %d specs (%d sampled), %d candidates with a lag\n", s.specs_checked, s.specs_sampled,
              s.candidates_with_lag);
  if (a.multi_lag) {
    std::printf("%d multi-lag soundness violations (%d checked)\n", s.soundness_violations, s.soundness_checked);
  } else {
    std::printf("%d necessity violations (%d checked) / %d soundness violations (%d checked)\n",
                s.necessity_violations, s.necessity_checked, s.soundness_violations, s.soundness_checked);
    std::printf("%d necessity violations with path-definition lags\n", s.path_lag_necessity_violations);
  }
  std::printf("%s\n", violations == 0 ? "PASS" : "FAIL");
  if (violations > 0 && !a.counterexamples.empty()) {
    std::printf("counterexample specs written to %s\n", a.counterexamples.c_str());
  }

  if (!a.manifest.empty()) {
    json m = manifest_base("oracle-check", argv);
    m["seed"] = a.seed;
    m["config"] = {{"specs", a.specs}, {"multi_lag_mode", a.multi_lag}, {"window", a.window}};
    m["summary"] = {{"specs_checked", s.specs_checked},
                    {"necessity_checked", s.necessity_checked},
                    {"necessity_violations", s.necessity_violations},
                    {"path_lag_necessity_violations", s.path_lag_necessity_violations},
                    {"soundness_checked", s.soundness_checked},
                    {"soundness_violations", s.soundness_violations}};
    write_manifest(a.manifest, m);
  }
  return violations == 0 ? SYPI_OK : SYPI_ERR_INTERNAL;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal feature selection for a target time series with latent confounders"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sypi_version()));
  app.set_config("--config", "", "TOML/INI file with option values; unknown keys are rejected");
  app.allow_config_extras(CLI::config_extras_mode::error);

  DiscoverArgs d;
  auto* discover = app.add_subcommand("discover", "Select the causes of a target column in a CSV panel");
  discover->add_option("--input", d.input, "Wide CSV with a header row")->required()->check(CLI::ExistingFile);
  discover->add_option("--target", d.target, "Target column name")->required();
  discover->add_option("--preset", d.preset, "Threshold preset")
      ->check(CLI::IsMember({"default", "real-data"}))
      ->capture_default_str();
  d.t1 = discover->add_option("--threshold1", d.threshold1, "Dependence test level (default 0.01)")
             ->check(CLI::Range(0.0, 1.0));
  d.t2 = discover->add_option("--threshold2", d.threshold2, "Independence test level (default 0.2)")
             ->check(CLI::Range(0.0, 1.0));
  d.ml = discover->add_option("--max-lag", d.max_lag, "Largest lag searched (default 10)")
             ->check(CLI::NonNegativeNumber);
  d.ll = discover->add_option("--lag-lambda", d.lag_lambda, "Lasso penalty of the lag search (default 0.001)")
             ->check(CLI::NonNegativeNumber);
  d.lt = discover->add_option("--lag-threshold", d.lag_threshold, "Coefficient threshold of the lag search")
             ->check(CLI::NonNegativeNumber);
  d.tl = discover->add_option("--target-lags", d.target_lags, "Own lags of the target in the lag search (default 1)")
             ->check(CLI::NonNegativeNumber);
  discover->add_flag("--strict", d.strict, "Reject missing or non-numeric cells instead of forward-filling");
  discover->add_option("--time-column", d.time_column, "Time-index column (default: auto-detect)");
  discover->add_option("--out", d.out, "Write the report (JSON) here");
  discover->add_option("--manifest", d.manifest, "Manifest path (default: <out>.manifest.json)");

  SimulateArgs s;
  auto* simulate = app.add_subcommand("simulate", "Sample a structural model and simulate a panel");
  simulate->add_option("--spec", s.spec_in, "Simulate this spec instead of sampling one")
      ->check(CLI::ExistingFile);
  simulate->add_option("--n-obs", s.n_obs, "Observed candidates")->capture_default_str();
  simulate->add_option("--n-hidden", s.n_hidden, "Hidden series")->capture_default_str();
  simulate->add_option("--p-cross", s.p_cross, "Edge probability among drivers")->capture_default_str();
  simulate->add_option("--p-target", s.p_target, "Edge probability into the target")->capture_default_str();
  simulate->add_option("--noise", s.noise, "Innovation variance")->capture_default_str();
  simulate->add_flag("--multi-lag", s.multi_lag, "Allow a second lag per edge");
  simulate->add_option("--T", s.T, "Samples")->capture_default_str();
  simulate->add_option("--seed", s.seed, "Random seed")->capture_default_str();
  simulate->add_option("--out", s.out, "Panel CSV path")->required();
  simulate->add_option("--spec-out", s.spec_out, "Spec path (default: <out>.spec.json)");
  simulate->add_option("--manifest", s.manifest, "Manifest path (default: <out>.manifest.json)");

  BenchArgs b;
  auto* bench = app.add_subcommand("bench", "Run a simulation grid and write per-cell metrics");
  bench->add_option("--grid", b.grid, "Grid config (JSON)")->required()->check(CLI::ExistingFile);
  bench->add_option("--seed", b.seed, "Root seed")->capture_default_str();
  bench->add_option("--threads", b.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--out", b.out, "Per-cell CSV")->required();
  bench->add_option("--graphs-out", b.graphs_out, "Per-graph CSV");
  bench->add_option("--manifest", b.manifest, "Manifest path (default: <out>.manifest.json)");

  BenchArgs r;
  auto* roc = app.add_subcommand("roc", "Sweep thresholds over a grid and write ROC points");
  roc->add_option("--grid", r.grid, "Grid config (JSON)")->required()->check(CLI::ExistingFile);
  roc->add_option("--seed", r.seed, "Root seed")->capture_default_str();
  roc->add_option("--threads", r.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  roc->add_option("--out", r.out, "ROC CSV")->required();
  roc->add_option("--manifest", r.manifest, "Manifest path (default: <out>.manifest.json)");

  OracleArgs o;
  auto* oracle = app.add_subcommand("oracle-check", "Check the population guarantees on random graphs");
  oracle->add_option("--specs", o.specs, "Specs to check")->check(CLI::NonNegativeNumber)->capture_default_str();
  oracle->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  oracle->add_flag("--multi-lag", o.multi_lag, "Multi-lag mode");
  oracle->add_option("--window", o.window, "Unrolled window length (enlarged as needed)")->capture_default_str();
  oracle->add_option("--counterexamples", o.counterexamples, "Directory for counterexample specs")
      ->capture_default_str();
  oracle->add_option("--manifest", o.manifest, "Manifest path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : SYPI_ERR_USAGE;
  }

  const std::vector<std::string> args(argv, argv + argc);
  try {
    if (*discover) run_discover(d, args);
    if (*simulate) run_simulate(s, args);
    if (*bench) run_bench(b, args);
    if (*roc) run_roc(r, args);
    if (*oracle) return run_oracle(o, args);
  } catch (const Failure& f) {
    remove_artifacts();
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    remove_artifacts();
    std::cerr << "error: " << e.what() << "\n";
    return SYPI_ERR_INTERNAL;
  }
  return SYPI_OK;
}
