/* SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the localdeform shared library.
 *
 * The library learns linear shape-deformation models whose factors have
 * local support, by graph-regularized structured matrix factorization, and
 * ships the matching evaluation protocol and a synthetic data generator.
 *
 * Conventions:
 *   - Handles are opaque; every ldm_*_destroy accepts NULL.
 *   - Functions return LDM_OK or an error code; ldm_last_error() describes
 *     the most recent failure on the calling thread.
 *   - Matrices cross the boundary in column-major order.
 *   - Stacked shape vectors hold the x coordinates of all N vertices, then
 *     all y, then all z (length 3N).
 *   - Negative penalty weights are resolved from the built-in
 *     size-dependent defaults of the problem at hand (lambda and lambda_a
 *     also resolve when zero); zero keeps a sparsity term switched off.
 */
#ifndef LOCALDEFORM_H
#define LOCALDEFORM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LDM_API __declspec(dllexport)
#else
#define LDM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ldm_status {
  LDM_OK = 0,
  LDM_ERROR_INVALID_ARGUMENT = 1,
  LDM_ERROR_DIMENSION = 2,
  LDM_ERROR_DEGENERATE_INPUT = 3,
  LDM_ERROR_NUMERIC = 4,
  LDM_ERROR_IO = 5,
  LDM_ERROR_INTERNAL = 6
} ldm_status;

LDM_API const char* ldm_version(void);
LDM_API const char* ldm_status_name(ldm_status status);
/* Message of the last failure on this thread; empty string if none. */
LDM_API const char* ldm_last_error(void);

/* ---------------------------------------------------------------- meshes */

typedef struct ldm_mesh ldm_mesh;

LDM_API ldm_status ldm_mesh_load_obj(const char* path, ldm_mesh** out);
LDM_API ldm_status ldm_mesh_save_obj(const ldm_mesh* mesh, const char* path);
LDM_API int64_t ldm_mesh_vertex_count(const ldm_mesh* mesh);
LDM_API int64_t ldm_mesh_face_count(const ldm_mesh* mesh);
LDM_API void ldm_mesh_destroy(ldm_mesh* mesh);

/* ------------------------------------------------------------ shape sets */

typedef struct ldm_shape_set ldm_shape_set;

/* coords: n_shapes blocks, each a column-major n_vertices x 3 matrix in
 * original units. The set is centred and scale-normalized on creation. */
LDM_API ldm_status ldm_shape_set_create(const double* coords,
                                        int64_t n_vertices, int64_t n_shapes,
                                        ldm_shape_set** out);
/* Headerless CSV with 3N rows and K columns of stacked shapes. */
LDM_API ldm_status ldm_shape_set_load_csv(const char* path,
                                          ldm_shape_set** out);
/* One OBJ file per shape; vertex correspondence is by line order. */
LDM_API ldm_status ldm_shape_set_load_obj_files(const char* const* paths,
                                                int64_t n_paths,
                                                ldm_shape_set** out);
LDM_API ldm_status ldm_shape_set_save_csv(const ldm_shape_set* set,
                                          const char* path);
LDM_API int64_t ldm_shape_set_vertex_count(const ldm_shape_set* set);
LDM_API int64_t ldm_shape_set_shape_count(const ldm_shape_set* set);
/* Normalization factor mapping model space to original units. */
LDM_API double ldm_shape_set_scale(const ldm_shape_set* set);
/* Mean shape in original units, stacked (length 3N). */
LDM_API ldm_status ldm_shape_set_mean(const ldm_shape_set* set, double* out);
LDM_API void ldm_shape_set_destroy(ldm_shape_set* set);

/* ---------------------------------------------------------------- graphs */

typedef struct ldm_graph ldm_graph;

/* Gaussian weights over the mesh topology evaluated on the mean shape of
 * the set; edges below theta are dropped. theta <= 0 selects 0.1. */
LDM_API ldm_status ldm_graph_build(const ldm_mesh* topology,
                                   const ldm_shape_set* shapes, double theta,
                                   ldm_graph** out);
/* Multi-part affinity graph: parts_path lists one part per line
 * (space-separated 1-based vertex indices), part_edges_path holds `a,b`
 * lines of related 1-based part indices. alpha_d <= 0 selects 0.5. */
LDM_API ldm_status ldm_graph_build_parts(const ldm_mesh* topology,
                                         const ldm_shape_set* shapes,
                                         const char* parts_path,
                                         const char* part_edges_path,
                                         double alpha_d, double theta,
                                         ldm_graph** out);
/* Edge list CSV `i,j,weight` with 1-based vertex indices. */
LDM_API ldm_status ldm_graph_load_csv(const char* path, int64_t vertex_count,
                                      ldm_graph** out);
LDM_API ldm_status ldm_graph_save_csv(const ldm_graph* graph,
                                      const char* path);
LDM_API int64_t ldm_graph_vertex_count(const ldm_graph* graph);
LDM_API int64_t ldm_graph_edge_count(const ldm_graph* graph);
LDM_API void ldm_graph_destroy(ldm_graph* graph);

/* -------------------------------------------------------------- training */

/* Penalty weights; negative fields resolve to the size-dependent defaults
 * (recomputed per training subset during cross-validation). */
typedef struct ldm_weights {
  double lambda;
  double lambda_a;
  double lambda_l1;
  double lambda_l2;
  double lambda_linf;
  double lambda_graph;
} ldm_weights;

/* All fields auto. */
LDM_API void ldm_weights_init(ldm_weights* weights);
/* The resolved defaults for a problem of the given sizes. */
LDM_API ldm_status ldm_weights_defaults(int64_t n_vertices, int64_t n_columns,
                                        int64_t factor_count,
                                        int64_t edge_count,
                                        ldm_weights* out);

typedef struct ldm_solver_params {
  int64_t factor_count;
  int64_t max_iterations;
  double tolerance;       /* relative objective change */
  uint64_t seed;
  double step_factors;    /* <= 0: per-sweep inverse Lipschitz */
  double step_coefficients;
  double prox_dual_step;     /* gamma of the inner splitting */
  double prox_epsilon;       /* relaxation is (1 + eps) / 2 */
  int64_t prox_max_iterations;
  double prox_tolerance;
  int kernelized;            /* factorize the kernelized covariance */
  double kernel_bandwidth;
  int threads;
  double split_threshold;    /* activity threshold for factor splitting */
} ldm_solver_params;

LDM_API void ldm_solver_params_init(ldm_solver_params* params);

typedef struct ldm_model ldm_model;

/* Full training pipeline: factorize (plain or kernelized), split factors
 * into connected support regions, normalize and order, truncate to the
 * requested count. topology may be NULL; when given, the model carries the
 * mean mesh for OBJ export. */
LDM_API ldm_status ldm_train(const ldm_shape_set* shapes,
                             const ldm_graph* graph,
                             const ldm_weights* weights,
                             const ldm_solver_params* params,
                             const ldm_mesh* topology, ldm_model** out);

/* ---------------------------------------------------------------- models */

LDM_API int64_t ldm_model_factor_count(const ldm_model* model);
LDM_API int64_t ldm_model_point_dimension(const ldm_model* model); /* 3N */
LDM_API int64_t ldm_model_shape_count(const ldm_model* model);
LDM_API double ldm_model_scale(const ldm_model* model);
/* Column-major 3N x M. */
LDM_API ldm_status ldm_model_factors(const ldm_model* model, double* out);
/* Column-major M x K. */
LDM_API ldm_status ldm_model_coefficients(const ldm_model* model,
                                          double* out);
LDM_API ldm_status ldm_model_mean(const ldm_model* model, double* out);
/* y = mean + scale * factors * alpha (original units); set denormalize to 0
 * for the bare deviation factors * alpha. */
LDM_API ldm_status ldm_model_deform(const ldm_model* model,
                                    const double* alpha, int64_t alpha_len,
                                    int denormalize, double* out);
/* Least-squares weights for a stacked shape given in original units. */
LDM_API ldm_status ldm_model_fit(const ldm_model* model, const double* shape,
                                 int64_t shape_len, double* alpha_out);
/* Writes mean + alpha * scale * factor_m as OBJ (factor is 1-based); faces
 * are included when the model carries topology. */
LDM_API ldm_status ldm_model_export_obj(const ldm_model* model,
                                        int64_t factor, double alpha,
                                        const char* path);
/* Directory with phi.csv, coeffs.csv, mean.csv, meta.json, trace.csv and
 * optionally mean.obj / config.json. */
LDM_API ldm_status ldm_model_save(const ldm_model* model, const char* dir);
LDM_API ldm_status ldm_model_load(const char* dir, ldm_model** out);
/* Attach a configuration echo stored alongside the model. */
LDM_API ldm_status ldm_model_set_config_json(ldm_model* model,
                                             const char* json);
LDM_API void ldm_model_destroy(ldm_model* model);

/* ------------------------------------------------------------ evaluation */

typedef struct ldm_eval_params {
  int64_t specificity_samples;
  int64_t folds;
  double sparse_fraction;
  uint64_t seed;
  int disjoint_folds; /* 0: literal protocol with independent fold draws */
} ldm_eval_params;

LDM_API void ldm_eval_params_init(ldm_eval_params* params);

typedef struct ldm_report ldm_report;

/* The eight scores: reconstruction, specificity, generalisation and sparse
 * reconstruction, average and maximum each. Cross-validation folds are
 * retrained with the supplied weights and solver parameters. */
LDM_API ldm_status ldm_evaluate(const ldm_model* model,
                                const ldm_shape_set* shapes,
                                const ldm_graph* graph,
                                const ldm_weights* weights,
                                const ldm_solver_params* solver_params,
                                const ldm_eval_params* eval_params,
                                ldm_report** out);
/* Mean of each metric family, in the fixed order: reconstruction avg/max,
 * specificity avg/max, generalisation avg/max, sparse avg/max. */
LDM_API ldm_status ldm_report_means(const ldm_report* report,
                                    double out[8]);
/* scores_long.csv and summary.csv in the directory. */
LDM_API ldm_status ldm_report_save(const ldm_report* report, const char* dir);
LDM_API void ldm_report_destroy(ldm_report* report);

/* -------------------------------------------------------- synthetic data */

typedef struct ldm_synthetic_spec {
  int grid;                /* 1: planar grid, 0: icosphere */
  int64_t grid_width;
  int64_t grid_height;
  int64_t icosphere_subdivisions;
  int64_t region_count;
  int64_t region_radius;   /* hops */
  double amplitude_min;
  double amplitude_max;
  int64_t shape_count;
  double noise_sigma;
  uint64_t seed;
} ldm_synthetic_spec;

LDM_API void ldm_synthetic_spec_init(ldm_synthetic_spec* spec);

typedef struct ldm_synthetic_result ldm_synthetic_result;

LDM_API ldm_status ldm_synthetic_generate(const ldm_synthetic_spec* spec,
                                          ldm_synthetic_result** out);
LDM_API const ldm_mesh* ldm_synthetic_mesh(const ldm_synthetic_result* data);
LDM_API const ldm_shape_set* ldm_synthetic_shapes(
    const ldm_synthetic_result* data);
LDM_API int64_t ldm_synthetic_region_count(const ldm_synthetic_result* data);
LDM_API int64_t ldm_synthetic_region_size(const ldm_synthetic_result* data,
                                          int64_t region);
/* 0-based vertex indices of one planted region. */
LDM_API ldm_status ldm_synthetic_region_vertices(
    const ldm_synthetic_result* data, int64_t region, int64_t* out);
/* One line per region, space-separated 1-based vertex indices. */
LDM_API ldm_status ldm_synthetic_save_masks(const ldm_synthetic_result* data,
                                            const char* path);
LDM_API void ldm_synthetic_destroy(ldm_synthetic_result* data);

/* ------------------------------------------------------ parameter search */

typedef struct ldm_search_result ldm_search_result;

/* Random-sampling selection of the kernel bandwidth: n_runs draws of
 * beta ~ 1 / U(1, 10), each scored by a full train + evaluate cycle; the
 * winner minimizes the sum of the column-normalized scores. */
LDM_API ldm_status ldm_parameter_search(const ldm_shape_set* shapes,
                                        const ldm_graph* graph,
                                        const ldm_weights* weights,
                                        const ldm_solver_params* solver_params,
                                        const ldm_eval_params* eval_params,
                                        int64_t n_runs, uint64_t seed,
                                        ldm_search_result** out);
LDM_API int64_t ldm_search_run_count(const ldm_search_result* result);
LDM_API int64_t ldm_search_best_index(const ldm_search_result* result);
LDM_API double ldm_search_best_bandwidth(const ldm_search_result* result);
/* Row-major n_runs x 8 raw score matrix. */
LDM_API ldm_status ldm_search_scores(const ldm_search_result* result,
                                     double* out);
LDM_API ldm_status ldm_search_bandwidths(const ldm_search_result* result,
                                         double* out);
/* CSV: run,bandwidth,<8 scores>,selected */
LDM_API ldm_status ldm_search_save_csv(const ldm_search_result* result,
                                       const char* path);
LDM_API void ldm_search_destroy(ldm_search_result* result);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LOCALDEFORM_H */
