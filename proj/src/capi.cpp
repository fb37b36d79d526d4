#include "sypi/sypi.h"

#include "sypi/bench.hpp"
#include "sypi/dsep_oracle.hpp"
#include "sypi/error.hpp"
#include "sypi/file_util.hpp"
#include "sypi/lag_finder.hpp"
#include "sypi/panel_io.hpp"
#include "sypi/spec_io.hpp"

#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

struct sypi_panel {
  sypi::TimeSeriesPanel panel;
  std::vector<std::string> warnings;
};

struct sypi_report {
  sypi::DiscoveryReport report;
  std::string table;
  std::string json;
};

struct sypi_spec {
  sypi::FullTimeGraphSpec spec;
};

struct sypi_grid {
  sypi::GridConfig grid;
  std::string json;
};

struct sypi_bench {
  std::vector<sypi::BenchCell> cells;
};

struct sypi_roc {
  std::vector<sypi::CellConfig> cells;
  std::vector<sypi::RocCurves> curves;
};

namespace {

thread_local std::string last_error;

template <typename F>
sypi_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return SYPI_OK;
  } catch (const sypi::Error& e) {
    last_error = e.what();
    switch (e.kind()) {
      case sypi::ErrorKind::Usage: return SYPI_ERR_USAGE;
      case sypi::ErrorKind::Data: return SYPI_ERR_DATA;
      case sypi::ErrorKind::Internal: return SYPI_ERR_INTERNAL;
    }
    return SYPI_ERR_INTERNAL;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SYPI_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SYPI_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return SYPI_ERR_INTERNAL;
  }
}

template <typename T>
void require(const T* p, const char* what) {
  if (p == nullptr) sypi::throw_usage(std::string(what) + " must not be NULL");
}

sypi::LagOptions to_cpp(const sypi_lag_options& o) {
  sypi::LagOptions out;
  out.max_lag = o.max_lag;
  out.lambda = o.lambda;
  out.coef_threshold = o.coef_threshold;
  out.target_lags = o.target_lags;
  return out;
}

sypi_lag_options to_c(const sypi::LagOptions& o) { return {o.max_lag, o.lambda, o.coef_threshold, o.target_lags}; }

void fill_metrics(const sypi::BenchCell& cell, const sypi::Confusion& c, sypi_cell_metrics* out) {
  const sypi::CellConfig& cfg = cell.config;
  *out = sypi_cell_metrics{};
  out->T = cfg.T;
  out->n_obs = cfg.n_obs;
  out->n_hidden = cfg.n_hidden;
  out->p_cross = cfg.p_cross;
  out->p_target = cfg.p_target;
  out->noise_pct = cfg.noise_pct;
  out->n_graphs = cfg.n_graphs;
  out->failed_graphs = cell.failed_graphs;
  out->tp = c.tp;
  out->fp = c.fp;
  out->tn = c.tn;
  out->fn = c.fn;
  out->direct_tp = c.direct_tp;
  out->direct_fn = c.direct_fn;
  out->fpr = c.fpr();
  out->fnr_total = c.fnr_total();
  out->fnr_direct = c.fnr_direct();
}

}  // namespace

extern "C" {

const char* sypi_version(void) { return SYPI_VERSION_STRING; }

const char* sypi_last_error(void) { return last_error.c_str(); }

sypi_status sypi_panel_create(const double* candidates, const double* target, size_t T, size_t d, sypi_panel** out) {
  return guarded([&] {
    require(out, "out");
    require(target, "target");
    if (d > 0) require(candidates, "candidates");
    auto p = std::make_unique<sypi_panel>();
    const auto rows = static_cast<Eigen::Index>(T);
    const auto cols = static_cast<Eigen::Index>(d);
    p->panel.candidates.resize(rows, cols);
    for (Eigen::Index t = 0; t < rows; ++t)
      for (Eigen::Index j = 0; j < cols; ++j) p->panel.candidates(t, j) = candidates[t * cols + j];
    p->panel.target = Eigen::Map<const sypi::Vector>(target, rows);
    for (size_t j = 0; j < d; ++j) p->panel.names.push_back("X" + std::to_string(j + 1));
    p->panel.validate();
    p->panel.standardize();
    *out = p.release();
  });
}

void sypi_csv_options_default(sypi_csv_options* options) {
  if (options) *options = sypi_csv_options{0, nullptr, 1};
}

sypi_status sypi_panel_load_csv(const char* path, const char* target_column, const sypi_csv_options* options,
                                sypi_panel** out) {
  return guarded([&] {
    require(path, "path");
    require(target_column, "target_column");
    require(out, "out");
    sypi::CsvOptions o;
    if (options) {
      o.missing = options->strict ? sypi::MissingPolicy::Strict : sypi::MissingPolicy::ForwardFill;
      if (options->time_column) o.time_column = options->time_column;
      o.standardize = options->standardize != 0;
    }
    sypi::LoadedPanel loaded = sypi::load_csv(path, target_column, o);
    auto p = std::make_unique<sypi_panel>();
    p->panel = std::move(loaded.panel);
    p->warnings = std::move(loaded.warnings);
    *out = p.release();
  });
}

size_t sypi_panel_length(const sypi_panel* panel) {
  return panel ? static_cast<size_t>(panel->panel.length()) : 0;
}

size_t sypi_panel_candidates(const sypi_panel* panel) {
  return panel ? static_cast<size_t>(panel->panel.n_candidates()) : 0;
}

const char* sypi_panel_name(const sypi_panel* panel, size_t j) {
  if (!panel || j >= panel->panel.names.size()) return nullptr;
  return panel->panel.names[j].c_str();
}

const char* sypi_panel_target_name(const sypi_panel* panel) {
  return panel ? panel->panel.target_name.c_str() : nullptr;
}

size_t sypi_panel_warning_count(const sypi_panel* panel) { return panel ? panel->warnings.size() : 0; }

const char* sypi_panel_warning(const sypi_panel* panel, size_t i) {
  if (!panel || i >= panel->warnings.size()) return nullptr;
  return panel->warnings[i].c_str();
}

sypi_status sypi_panel_values(const sypi_panel* panel, double* candidates_out, double* target_out) {
  return guarded([&] {
    require(panel, "panel");
    const sypi::TimeSeriesPanel& p = panel->panel;
    if (candidates_out) {
      for (Eigen::Index t = 0; t < p.candidates.rows(); ++t)
        for (Eigen::Index j = 0; j < p.candidates.cols(); ++j)
          candidates_out[t * p.candidates.cols() + j] = p.candidates(t, j);
    }
    if (target_out) {
      for (Eigen::Index t = 0; t < p.target.size(); ++t) target_out[t] = p.target(t);
    }
  });
}

sypi_status sypi_panel_save_csv(const sypi_panel* panel, const char* path) {
  return guarded([&] {
    require(panel, "panel");
    require(path, "path");
    sypi::save_panel_csv(panel->panel, path);
  });
}

void sypi_panel_free(sypi_panel* panel) { delete panel; }

void sypi_discover_options_default(sypi_discover_options* options) {
  if (!options) return;
  const sypi::DiscoveryOptions d;
  *options = {d.threshold1, d.threshold2, to_c(d.lag)};
}

void sypi_discover_options_real_data(sypi_discover_options* options) {
  if (!options) return;
  const sypi::DiscoveryOptions d = sypi::DiscoveryOptions::real_data();
  *options = {d.threshold1, d.threshold2, to_c(d.lag)};
}

sypi_status sypi_find_min_lag(const double* x, const double* y, size_t T, const sypi_lag_options* options,
                              int* lag_out) {
  return guarded([&] {
    require(x, "x");
    require(y, "y");
    require(lag_out, "lag_out");
    const sypi::LagOptions o = options ? to_cpp(*options) : sypi::LagOptions{};
    const auto n = static_cast<Eigen::Index>(T);
    const auto lag = sypi::find_min_lag(Eigen::Map<const sypi::Vector>(x, n), Eigen::Map<const sypi::Vector>(y, n), o);
    *lag_out = lag ? *lag : -1;
  });
}

sypi_status sypi_discover(const sypi_panel* panel, const sypi_discover_options* options, sypi_report** out) {
  return guarded([&] {
    require(panel, "panel");
    require(out, "out");
    sypi::DiscoveryOptions o;
    if (options) {
      o.threshold1 = options->threshold1;
      o.threshold2 = options->threshold2;
      o.lag = to_cpp(options->lag);
    }
    auto r = std::make_unique<sypi_report>();
    r->report = sypi::discover(panel->panel, o);
    r->table = sypi::report_to_table(r->report);
    r->json = sypi::report_to_json(r->report);
    *out = r.release();
  });
}

size_t sypi_report_candidates(const sypi_report* report) { return report ? report->report.candidates.size() : 0; }

const char* sypi_report_name(const sypi_report* report, size_t i) {
  if (!report || i >= report->report.names.size()) return nullptr;
  return report->report.names[i].c_str();
}

sypi_status sypi_report_candidate(const sypi_report* report, size_t i, sypi_candidate_result* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    if (i >= report->report.candidates.size()) sypi::throw_usage("report: candidate index out of range");
    const sypi::CandidateResult& c = report->report.candidates[i];
    sypi_candidate_result r{};
    r.has_lag = c.lag.has_value();
    r.lag = c.lag.value_or(-1);
    r.p1 = c.p1;
    r.p2 = c.p2;
    r.n_eff = c.n_eff;
    r.decision = c.decision == sypi::Decision::Cause      ? SYPI_CAUSE
                 : c.decision == sypi::Decision::NotCause ? SYPI_NOT_CAUSE
                                                          : SYPI_NO_LAG;
    r.degenerate = c.degenerate;
    r.zero_lag_in_conditioning = c.zero_lag_in_conditioning;
    *out = r;
  });
}

const char* sypi_report_table(const sypi_report* report) { return report ? report->table.c_str() : nullptr; }

const char* sypi_report_json(const sypi_report* report) { return report ? report->json.c_str() : nullptr; }

sypi_status sypi_report_write_json(const sypi_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    sypi::write_file_atomic(path, report->json);
  });
}

void sypi_report_free(sypi_report* report) { delete report; }

void sypi_graph_config_default(sypi_graph_config* config) {
  if (!config) return;
  const sypi::GraphConfig g;
  *config = {g.n_obs, g.n_hidden, g.p_cross, g.p_target, g.noise_pct, g.multi_lag_mode, g.force_target_edge};
}

sypi_status sypi_spec_sample(const sypi_graph_config* config, uint64_t seed, sypi_spec** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    sypi::GraphConfig g;
    g.n_obs = config->n_obs;
    g.n_hidden = config->n_hidden;
    g.p_cross = config->p_cross;
    g.p_target = config->p_target;
    g.noise_pct = config->noise_pct;
    g.multi_lag_mode = config->multi_lag_mode != 0;
    g.force_target_edge = config->force_target_edge != 0;
    auto s = std::make_unique<sypi_spec>();
    s->spec = sypi::sample_graph_spec(g, seed);
    *out = s.release();
  });
}

sypi_status sypi_spec_load(const char* path, sypi_spec** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto s = std::make_unique<sypi_spec>();
    s->spec = sypi::load_spec(path);
    *out = s.release();
  });
}

sypi_status sypi_spec_save(const sypi_spec* spec, const char* path) {
  return guarded([&] {
    require(spec, "spec");
    require(path, "path");
    sypi::save_spec(spec->spec, path);
  });
}

int sypi_spec_observed(const sypi_spec* spec) { return spec ? spec->spec.n_obs : 0; }

int sypi_spec_hidden(const sypi_spec* spec) { return spec ? spec->spec.n_hidden : 0; }

sypi_status sypi_spec_validate(const sypi_spec* spec, int* valid_out) {
  return guarded([&] {
    require(spec, "spec");
    require(valid_out, "valid_out");
    const auto issues = sypi::validate_spec(spec->spec);
    *valid_out = issues.empty();
    if (!issues.empty()) last_error = issues.front();
  });
}

sypi_status sypi_spec_ground_truth(const sypi_spec* spec, size_t candidate, sypi_cause_label* out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    const sypi::GroundTruth truth = sypi::ground_truth(spec->spec);
    if (candidate >= truth.labels.size()) sypi::throw_usage("ground truth: candidate index out of range");
    const sypi::CauseLabel& l = truth.labels[candidate];
    *out = {l.is_direct, l.is_indirect, l.is_sg_unconfounded, l.is_cause};
  });
}

sypi_status sypi_simulate(const sypi_spec* spec, size_t T, uint64_t seed, sypi_panel** out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    auto p = std::make_unique<sypi_panel>();
    p->panel = sypi::simulate_panel(spec->spec, static_cast<long>(T), seed);
    *out = p.release();
  });
}

void sypi_spec_free(sypi_spec* spec) { delete spec; }

sypi_status sypi_population_conditions(const sypi_spec* spec, size_t candidate, int* lag_out, int* cond1_dependent,
                                       int* cond2_independent) {
  return guarded([&] {
    require(spec, "spec");
    if (candidate >= static_cast<size_t>(spec->spec.n_obs)) sypi::throw_usage("candidate index out of range");
    const sypi::LagTable lags = sypi::graphical_lags(spec->spec);
    const int i = static_cast<int>(candidate);
    sypi::PopulationConditions pc;
    if (lags.present(i)) pc = sypi::population_conditions(spec->spec, i, lags);
    if (lag_out) *lag_out = lags.present(i) ? lags.lag(i) : -1;
    if (cond1_dependent) *cond1_dependent = pc.cond1_dependent;
    if (cond2_independent) *cond2_independent = pc.cond2_independent;
  });
}

void sypi_oracle_options_default(sypi_oracle_options* options) {
  if (!options) return;
  const sypi::OracleSuiteOptions o;
  *options = {o.n_specs, o.seed, o.multi_lag_mode, o.window};
}

sypi_status sypi_oracle_check(const sypi_oracle_options* options, const char* counterexample_dir,
                              sypi_oracle_summary* out) {
  return guarded([&] {
    require(out, "out");
    sypi::OracleSuiteOptions o;
    if (options) {
      o.n_specs = options->n_specs;
      o.seed = options->seed;
      o.multi_lag_mode = options->multi_lag_mode != 0;
      o.window = options->window;
    }
    const sypi::OracleSuiteSummary s = sypi::run_oracle_suite(o);
    if (counterexample_dir && *counterexample_dir) {
      for (size_t k = 0; k < s.violations.size(); ++k) {
        const auto& v = s.violations[k];
        const std::filesystem::path file =
            std::filesystem::path(counterexample_dir) / (v.kind + "_" + std::to_string(k) + ".json");
        sypi::save_spec(v.spec, file.string());
        sypi::write_file_atomic(file.string() + ".txt", v.detail + "\n");
      }
    }
    *out = {s.specs_checked,        s.specs_sampled,
            s.candidates_with_lag,  s.necessity_checked,
            s.necessity_violations, s.path_lag_necessity_violations,
            s.soundness_checked,    s.soundness_violations};
  });
}

sypi_status sypi_grid_parse(const char* json_text, sypi_grid** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    auto g = std::make_unique<sypi_grid>();
    g->grid = sypi::grid_from_json(json_text);
    g->json = sypi::grid_to_json(g->grid);
    *out = g.release();
  });
}

sypi_status sypi_grid_load(const char* path, sypi_grid** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto g = std::make_unique<sypi_grid>();
    g->grid = sypi::grid_from_json(sypi::read_file(path));
    g->json = sypi::grid_to_json(g->grid);
    *out = g.release();
  });
}

const char* sypi_grid_json(const sypi_grid* grid) { return grid ? grid->json.c_str() : nullptr; }

size_t sypi_grid_cells(const sypi_grid* grid) { return grid ? grid->grid.cells().size() : 0; }

void sypi_grid_free(sypi_grid* grid) { delete grid; }

sypi_status sypi_bench_run(const sypi_grid* grid, uint64_t seed, int parallelism, sypi_bench** out) {
  return guarded([&] {
    require(grid, "grid");
    require(out, "out");
    auto b = std::make_unique<sypi_bench>();
    const std::vector<sypi::CellConfig> cells = grid->grid.cells();
    b->cells = sypi::run_grid(cells, seed, parallelism);
    *out = b.release();
  });
}

size_t sypi_bench_cells(const sypi_bench* bench) { return bench ? bench->cells.size() : 0; }

sypi_status sypi_bench_cell(const sypi_bench* bench, size_t i, sypi_cell_metrics* sypi_out,
                            sypi_cell_metrics* granger_out) {
  return guarded([&] {
    require(bench, "bench");
    if (i >= bench->cells.size()) sypi::throw_usage("bench: cell index out of range");
    const sypi::BenchCell& cell = bench->cells[i];
    if (sypi_out) fill_metrics(cell, cell.sypi, sypi_out);
    if (granger_out) fill_metrics(cell, cell.granger, granger_out);
  });
}

sypi_status sypi_bench_write_csv(const sypi_bench* bench, const char* cells_csv, const char* graphs_csv) {
  return guarded([&] {
    require(bench, "bench");
    require(cells_csv, "cells_csv");
    sypi::write_file_atomic(cells_csv, sypi::cells_to_csv(bench->cells));
    if (graphs_csv) sypi::write_file_atomic(graphs_csv, sypi::graphs_to_csv(bench->cells));
  });
}

void sypi_bench_free(sypi_bench* bench) { delete bench; }

sypi_status sypi_roc_run(const sypi_grid* grid, uint64_t seed, int parallelism, sypi_roc** out) {
  return guarded([&] {
    require(grid, "grid");
    require(out, "out");
    auto r = std::make_unique<sypi_roc>();
    r->cells = grid->grid.cells();
    for (size_t k = 0; k < r->cells.size(); ++k) {
      r->curves.push_back(sypi::roc_sweep(r->cells[k], seed, grid->grid.roc, parallelism, k));
    }
    *out = r.release();
  });
}

sypi_status sypi_roc_write_csv(const sypi_roc* roc, const char* path) {
  return guarded([&] {
    require(roc, "roc");
    require(path, "path");
    sypi::write_file_atomic(path, sypi::roc_to_csv(roc->curves, roc->cells));
  });
}

void sypi_roc_free(sypi_roc* roc) { delete roc; }

}  // extern "C"
