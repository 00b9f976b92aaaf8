/*
 * majdyn — majority dynamics on finite graphs.
 *
 * C API for the shared library. All functions that can fail return a
 * majdyn_status; MAJDYN_OK is 0. On failure, majdyn_last_error() returns a
 * thread-local message describing the most recent error on the calling
 * thread. Objects are opaque handles released with their _free function.
 * Strings returned through char** are heap-allocated; release them with
 * majdyn_string_free.
 */

#ifndef MAJDYN_MAJDYN_H
#define MAJDYN_MAJDYN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int32_t majdyn_status;

enum {
    MAJDYN_OK = 0,
    MAJDYN_ERR_INVALID = 1,     /* bad argument or precondition */
    MAJDYN_ERR_PARSE = 2,       /* malformed text input */
    MAJDYN_ERR_TIE = 3,         /* weighted vote summed to zero */
    MAJDYN_ERR_BUDGET = 4,      /* retry budget exhausted */
    MAJDYN_ERR_IO = 5,          /* file could not be read or written */
    MAJDYN_ERR_CONVERGENCE = 6, /* iterative estimate did not converge */
    MAJDYN_ERR_INVARIANT = 7,   /* a checked proof invariant failed */
    MAJDYN_ERR_INTERNAL = 8
};

const char* majdyn_version(void);
const char* majdyn_last_error(void);
void majdyn_string_free(char* s);

/* ---------------- graphs ---------------- */

typedef struct majdyn_graph_s majdyn_graph;

/* endpoints holds m (i, j) pairs flattened to 2m entries; weights is NULL or
 * m entries. */
majdyn_status majdyn_graph_build(int64_t n, const int64_t* endpoints, int64_t m,
                                 const double* weights, majdyn_graph** out);
majdyn_status majdyn_graph_gnp(int64_t n, double p, uint64_t seed, uint64_t stream,
                               majdyn_graph** out);
majdyn_status majdyn_graph_random_regular(int64_t n, int64_t d, uint64_t seed,
                                          uint64_t stream, majdyn_graph** out);
majdyn_status majdyn_graph_tree_ball(int64_t degree, int64_t radius, majdyn_graph** out);
majdyn_status majdyn_graph_level(int64_t depth, majdyn_graph** out);
majdyn_status majdyn_graph_read_file(const char* path, majdyn_graph** out);
majdyn_status majdyn_graph_write_file(const majdyn_graph* g, const char* path);

int64_t majdyn_graph_vertex_count(const majdyn_graph* g);
int64_t majdyn_graph_edge_count(const majdyn_graph* g);
int64_t majdyn_graph_degree(const majdyn_graph* g, int64_t v);
int majdyn_graph_is_weighted(const majdyn_graph* g);
int majdyn_graph_is_connected(const majdyn_graph* g);
void majdyn_graph_free(majdyn_graph* g);

/* ---------------- opinion states ---------------- */

typedef struct majdyn_opinions_s majdyn_opinions;

majdyn_status majdyn_opinions_iid(int64_t n, double q, uint64_t seed, uint64_t stream,
                                  majdyn_opinions** out);
majdyn_status majdyn_opinions_constant(int64_t n, int8_t value, majdyn_opinions** out);
majdyn_status majdyn_opinions_from_values(const int8_t* values, int64_t n,
                                          majdyn_opinions** out);
int64_t majdyn_opinions_count(const majdyn_opinions* x);
majdyn_status majdyn_opinions_copy_values(const majdyn_opinions* x, int8_t* buffer,
                                          int64_t length);
void majdyn_opinions_free(majdyn_opinions* x);

/* ---------------- simulation ---------------- */

typedef struct {
    int64_t max_steps;    /* step budget, >= 2 */
    int64_t min_steps;    /* keep stepping past period-2 entry up to here */
    int32_t weighted;     /* nonzero: use edge weights */
    double self_weight;   /* self-vote weight at even-degree vertices */
    int32_t check_invariants; /* nonzero: assert potential identity + flip bound */
} majdyn_sim_params;

void majdyn_sim_params_init(majdyn_sim_params* params);

typedef struct majdyn_sim_result_s majdyn_sim_result;

enum {
    MAJDYN_OUTCOME_FIXED_POINT = 0,
    MAJDYN_OUTCOME_PERIOD_TWO = 1,
    MAJDYN_OUTCOME_BUDGET_EXHAUSTED = 2
};

majdyn_status majdyn_simulate(const majdyn_graph* g, const majdyn_opinions* x0,
                              const majdyn_sim_params* params, majdyn_sim_result** out);
int32_t majdyn_sim_outcome(const majdyn_sim_result* r);
int64_t majdyn_sim_entry_time(const majdyn_sim_result* r); /* -1 if budget hit */
int64_t majdyn_sim_steps(const majdyn_sim_result* r);
/* trace CSV: header t,mean,flips2,potential,unanimous */
majdyn_status majdyn_sim_trace_csv(const majdyn_sim_result* r, char** out);
/* outcome fields as a JSON object */
majdyn_status majdyn_sim_outcome_json(const majdyn_sim_result* r, char** out);
/* the final state of the run, as a fresh opinions handle */
majdyn_status majdyn_sim_final_opinions(const majdyn_sim_result* r, majdyn_opinions** out);
void majdyn_sim_result_free(majdyn_sim_result* r);

/* ---------------- experiments ---------------- */

/* config is a JSON object: {"experiment": "<id>", ...parameters...};
 * the returned report echoes the resolved config and gate verdicts. */
majdyn_status majdyn_experiment_run(const char* config_json, char** report_json);
/* comma-separated registry of experiment ids (static storage) */
const char* majdyn_experiment_ids(void);

/* ---------------- analysis tables ---------------- */

/* CSV "mask,coefficient" over all subsets of the k-bit majority, odd k */
majdyn_status majdyn_fourier_maj_csv(int32_t k, char** csv);
/* CSV "rho,stability" on the closed grid [rho_begin, rho_end] step rho_step */
majdyn_status majdyn_stability_maj_csv(int32_t k, double rho_begin, double rho_end,
                                       double rho_step, char** csv);
/* JSON: operator-norm estimate of the centered loop-augmented Gnp adjacency
 * plus a sampled-subset mixing check at that lambda */
majdyn_status majdyn_mixing_check_json(int64_t n, double p, int64_t samples, uint64_t seed,
                                       char** json);
/* JSON: the exact overlap correlation of two majorities sharing m inputs */
majdyn_status majdyn_overlap_json(int32_t n1, int32_t n2, int32_t m, char** json);

/* ---------------- percolation ---------------- */

/* JSON per-sign cluster report of an opinion state: component counts, size
 * histogram, and the witness cycle (vertex array) or null for each sign */
majdyn_status majdyn_cluster_report_json(const majdyn_graph* g, const majdyn_opinions* x,
                                         char** json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MAJDYN_MAJDYN_H */
