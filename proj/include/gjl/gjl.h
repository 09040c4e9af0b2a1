/* C interface to the gjl numerical core. Every entry point returns a status;
 * on failure gjl_last_error() describes the problem for the calling thread. */
#ifndef GJL_GJL_H
#define GJL_GJL_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(GJL_BUILDING_LIBRARY)
#define GJL_API __attribute__((visibility("default")))
#else
#define GJL_API
#endif

/* Values double as process exit codes in the CLI. */
typedef enum gjl_status {
  GJL_OK = 0,
  GJL_INTERNAL_ERROR = 1,
  GJL_INPUT_ERROR = 2,        /* bad arguments or spec schema */
  GJL_PRECONDITION_ERROR = 3, /* e.g. 2-jets not space-like or not connectable */
  GJL_NUMERIC_ERROR = 4       /* non-convergence or degeneracy */
} gjl_status;

typedef struct gjl_report gjl_report;

/* nodes <= 0 selects the library default (64). */
GJL_API gjl_status gjl_second_jet(double a0, double b0, double a1, double b1, int nodes, gjl_report** out);
GJL_API gjl_status gjl_propagate(const char* spec_json, int max_order, int nodes, gjl_report** out);
GJL_API gjl_status gjl_counterexample(int n, int nodes, gjl_report** out);

/* grid_json may be NULL for defaults; otherwise an object with any of
 * nt, nx, ny, max_iterations, delta_schedule. with_slices also keeps the CSV
 * dump of every time slice. */
GJL_API gjl_status gjl_pde_check(const char* spec_json, const char* grid_json, int with_slices, gjl_report** out);

/* Recomputes a report from the "config" object of an earlier one. Accepts
 * either the whole report or just its config. */
GJL_API gjl_status gjl_rerun(const char* report_or_config_json, gjl_report** out);

/* Borrowed strings, valid until gjl_report_free. */
GJL_API const char* gjl_report_json(const gjl_report* report);
/* Empty unless produced by gjl_pde_check with with_slices != 0. */
GJL_API const char* gjl_report_slices_csv(const gjl_report* report);
GJL_API void gjl_report_free(gjl_report* report);

GJL_API const char* gjl_last_error(void);
GJL_API int gjl_default_nodes(void);
GJL_API const char* gjl_version(void);

#ifdef __cplusplus
}
#endif

#endif
