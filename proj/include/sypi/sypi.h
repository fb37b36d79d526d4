/*
 * sypi: causal feature selection for a target time series under latent
 * confounding, with the simulation, population-oracle and benchmark tooling
 * around it.
 *
 * Plain C interface. Every object is an opaque handle created by a
 * sypi_*_create/load/run call and released with the matching sypi_*_free.
 * Functions that can fail return a sypi_status; on failure the message is
 * available from sypi_last_error() on the same thread. Output pointers are
 * left untouched on failure.
 */
#ifndef SYPI_SYPI_H
#define SYPI_SYPI_H

#include <stddef.h>
#include <stdint.h>

#if defined(SYPI_BUILDING_LIBRARY)
#define SYPI_API __attribute__((visibility("default")))
#else
#define SYPI_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum sypi_status {
  SYPI_OK = 0,
  SYPI_ERR_USAGE = 1,    /* invalid argument or configuration */
  SYPI_ERR_DATA = 2,     /* unusable input data or file */
  SYPI_ERR_INTERNAL = 3  /* internal assertion */
} sypi_status;

SYPI_API const char* sypi_version(void);
SYPI_API const char* sypi_last_error(void);

typedef struct sypi_panel sypi_panel;
typedef struct sypi_report sypi_report;
typedef struct sypi_spec sypi_spec;
typedef struct sypi_grid sypi_grid;
typedef struct sypi_bench sypi_bench;
typedef struct sypi_roc sypi_roc;

/* ---- Panels ------------------------------------------------------------ */

/* candidates is row-major T x d. The panel is standardized on creation. */
SYPI_API sypi_status sypi_panel_create(const double* candidates, const double* target, size_t T, size_t d,
                                       sypi_panel** out);

typedef struct sypi_csv_options {
  int strict;              /* nonzero: missing/non-numeric cells are errors */
  const char* time_column; /* NULL or "": auto-detect on the first column */
  int standardize;         /* nonzero (default): zero mean, unit variance */
} sypi_csv_options;

SYPI_API void sypi_csv_options_default(sypi_csv_options* options);
SYPI_API sypi_status sypi_panel_load_csv(const char* path, const char* target_column,
                                         const sypi_csv_options* options, sypi_panel** out);
SYPI_API size_t sypi_panel_length(const sypi_panel* panel);
SYPI_API size_t sypi_panel_candidates(const sypi_panel* panel);
SYPI_API const char* sypi_panel_name(const sypi_panel* panel, size_t j);
SYPI_API const char* sypi_panel_target_name(const sypi_panel* panel);
/* Loader warnings (short series, near-constant columns). */
SYPI_API size_t sypi_panel_warning_count(const sypi_panel* panel);
SYPI_API const char* sypi_panel_warning(const sypi_panel* panel, size_t i);
/* Copies values out; candidates_out is row-major T x d. Either may be NULL. */
SYPI_API sypi_status sypi_panel_values(const sypi_panel* panel, double* candidates_out, double* target_out);
SYPI_API sypi_status sypi_panel_save_csv(const sypi_panel* panel, const char* path);
SYPI_API void sypi_panel_free(sypi_panel* panel);

/* ---- Lag detection and discovery -------------------------------------- */

typedef struct sypi_lag_options {
  int max_lag;           /* default 10 */
  double lambda;         /* default 0.001 */
  double coef_threshold; /* default 0.12; 0 accepts any nonzero coefficient */
  int target_lags;       /* default 1: own lags of the target added as predictors */
} sypi_lag_options;

typedef struct sypi_discover_options {
  double threshold1; /* reject independence in the first test when p1 < threshold1 */
  double threshold2; /* accept independence in the second test when p2 > threshold2 */
  sypi_lag_options lag;
} sypi_discover_options;

SYPI_API void sypi_discover_options_default(sypi_discover_options* options);
/* threshold1 = 0.05 and lag coefficient threshold 0, for short real series. */
SYPI_API void sypi_discover_options_real_data(sypi_discover_options* options);

/* lag_out receives the minimum lag, or -1 when none is detected. */
SYPI_API sypi_status sypi_find_min_lag(const double* x, const double* y, size_t T, const sypi_lag_options* options,
                                       int* lag_out);

typedef enum sypi_decision { SYPI_CAUSE = 0, SYPI_NOT_CAUSE = 1, SYPI_NO_LAG = 2 } sypi_decision;

typedef struct sypi_candidate_result {
  int has_lag;
  int lag;
  double p1;
  double p2;
  long n_eff;
  sypi_decision decision;
  int degenerate;
  int zero_lag_in_conditioning;
} sypi_candidate_result;

SYPI_API sypi_status sypi_discover(const sypi_panel* panel, const sypi_discover_options* options, sypi_report** out);
SYPI_API size_t sypi_report_candidates(const sypi_report* report);
SYPI_API const char* sypi_report_name(const sypi_report* report, size_t i);
SYPI_API sypi_status sypi_report_candidate(const sypi_report* report, size_t i, sypi_candidate_result* out);
/* Human-readable table, owned by the report. */
SYPI_API const char* sypi_report_table(const sypi_report* report);
/* Structured report (JSON), owned by the report. */
SYPI_API const char* sypi_report_json(const sypi_report* report);
SYPI_API sypi_status sypi_report_write_json(const sypi_report* report, const char* path);
SYPI_API void sypi_report_free(sypi_report* report);

/* ---- Structural models -------------------------------------------------- */

typedef struct sypi_graph_config {
  int n_obs;
  int n_hidden;
  double p_cross;   /* edge probability among candidates and hidden series (default 0.15) */
  double p_target;  /* edge probability into the target */
  double noise_pct; /* innovation variance */
  int multi_lag_mode;
  int force_target_edge;
} sypi_graph_config;

typedef struct sypi_cause_label {
  int is_direct;
  int is_indirect;
  int is_sg_unconfounded;
  int is_cause;
} sypi_cause_label;

SYPI_API void sypi_graph_config_default(sypi_graph_config* config);
SYPI_API sypi_status sypi_spec_sample(const sypi_graph_config* config, uint64_t seed, sypi_spec** out);
SYPI_API sypi_status sypi_spec_load(const char* path, sypi_spec** out);
SYPI_API sypi_status sypi_spec_save(const sypi_spec* spec, const char* path);
SYPI_API int sypi_spec_observed(const sypi_spec* spec);
SYPI_API int sypi_spec_hidden(const sypi_spec* spec);
/* valid_out is 1 when the spec passes every structural and connectivity check. */
SYPI_API sypi_status sypi_spec_validate(const sypi_spec* spec, int* valid_out);
SYPI_API sypi_status sypi_spec_ground_truth(const sypi_spec* spec, size_t candidate, sypi_cause_label* out);
/* Observed candidates and target, standardized, after a 500-step burn-in. */
SYPI_API sypi_status sypi_simulate(const sypi_spec* spec, size_t T, uint64_t seed, sypi_panel** out);
SYPI_API void sypi_spec_free(sypi_spec* spec);

/* ---- Population oracle -------------------------------------------------- */

/* Graphical lag and both discovery conditions as d-separation queries. */
SYPI_API sypi_status sypi_population_conditions(const sypi_spec* spec, size_t candidate, int* lag_out,
                                                int* cond1_dependent, int* cond2_independent);

typedef struct sypi_oracle_options {
  int n_specs;
  uint64_t seed;
  int multi_lag_mode;
  int window;
} sypi_oracle_options;

typedef struct sypi_oracle_summary {
  int specs_checked;
  int specs_sampled;
  int candidates_with_lag;
  int necessity_checked;
  int necessity_violations;
  int path_lag_necessity_violations; /* necessity with lags from the path definition */
  int soundness_checked;
  int soundness_violations;
} sypi_oracle_summary;

SYPI_API void sypi_oracle_options_default(sypi_oracle_options* options);
/* Counterexample specs are written to counterexample_dir (may be NULL). */
SYPI_API sypi_status sypi_oracle_check(const sypi_oracle_options* options, const char* counterexample_dir,
                                       sypi_oracle_summary* out);

/* ---- Benchmarks --------------------------------------------------------- */

SYPI_API sypi_status sypi_grid_parse(const char* json_text, sypi_grid** out);
SYPI_API sypi_status sypi_grid_load(const char* path, sypi_grid** out);
/* Normalized grid JSON, owned by the grid. */
SYPI_API const char* sypi_grid_json(const sypi_grid* grid);
SYPI_API size_t sypi_grid_cells(const sypi_grid* grid);
SYPI_API void sypi_grid_free(sypi_grid* grid);

typedef struct sypi_cell_metrics {
  long T;
  int n_obs;
  int n_hidden;
  double p_cross;
  double p_target;
  double noise_pct;
  int n_graphs;
  int failed_graphs;
  long tp, fp, tn, fn, direct_tp, direct_fn;
  double fpr;
  double fnr_total;
  double fnr_direct;
} sypi_cell_metrics;

SYPI_API sypi_status sypi_bench_run(const sypi_grid* grid, uint64_t seed, int parallelism, sypi_bench** out);
SYPI_API size_t sypi_bench_cells(const sypi_bench* bench);
/* granger_out may be NULL; it is zeroed when Lasso-Granger was not run. */
SYPI_API sypi_status sypi_bench_cell(const sypi_bench* bench, size_t i, sypi_cell_metrics* sypi_out,
                                     sypi_cell_metrics* granger_out);
/* One row per cell; graphs_csv (may be NULL) gets one row per graph. */
SYPI_API sypi_status sypi_bench_write_csv(const sypi_bench* bench, const char* cells_csv, const char* graphs_csv);
SYPI_API void sypi_bench_free(sypi_bench* bench);

SYPI_API sypi_status sypi_roc_run(const sypi_grid* grid, uint64_t seed, int parallelism, sypi_roc** out);
SYPI_API sypi_status sypi_roc_write_csv(const sypi_roc* roc, const char* path);
SYPI_API void sypi_roc_free(sypi_roc* roc);

#ifdef __cplusplus
}
#endif

#endif /* SYPI_SYPI_H */
