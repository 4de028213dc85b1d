#ifndef CONJPOINTS_H
#define CONJPOINTS_H

/* C interface of the conjpoints library.  Every call returns a cp_status;
 * on failure cp_last_error() describes the problem (per thread).  Objects
 * are opaque handles released with the matching *_free function. */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(CONJPOINTS_BUILDING_LIBRARY)
#define CONJPOINTS_API __attribute__((visibility("default")))
#else
#define CONJPOINTS_API
#endif

typedef enum {
  CP_OK = 0,
  CP_ERR_ARGUMENT = 1,     /* null pointer or out-of-range argument */
  CP_ERR_PRECONDITION = 2, /* invalid input (parse errors, bad files, violated preconditions) */
  CP_ERR_NUMERICAL = 3,    /* a numerical tolerance could not be met */
  CP_ERR_UNAVAILABLE = 4,  /* quantity undefined for this input */
  CP_ERR_STAGE = 5,        /* a pipeline stage failed; the message names it */
  CP_ERR_INTERNAL = 6
} cp_status;

typedef enum { CP_SPACELIKE = 0, CP_TIMELIKE = 1 } cp_causal;

typedef struct cp_system cp_system;
typedef struct cp_report cp_report;
typedef struct cp_prescribed cp_prescribed;
typedef struct cp_metric cp_metric;

CONJPOINTS_API const char* cp_last_error(void);
CONJPOINTS_API const char* cp_version(void);

/* ---- detector options ---- */

typedef struct {
  double zero_tol;          /* on d / max|d| */
  double rank_tol;
  double t_tol;
  double crossing_tol;
  double exclusion_radius;  /* < 0: 5 grid steps */
  int max_isolated_run;     /* <= 0: 3 */
  double reproject_tol;     /* symplectic drift that triggers reprojection */
} cp_detect_options;

CONJPOINTS_API void cp_detect_options_default(cp_detect_options* opts);

/* ---- systems ---- */

/* "flat" or "oscillator" on [a, b] with grid_N steps. */
CONJPOINTS_API cp_status cp_system_analytic(const char* id, int n, double a, double b, int grid_N,
                                            cp_system** out);
/* Samples of A, B, C at the grid_N + 1 nodes, each n x n row-major,
 * concatenated node after node. */
CONJPOINTS_API cp_status cp_system_sampled(int n, double a, double b, int grid_N,
                                           const double* A, const double* B, const double* C,
                                           cp_system** out);
/* Morse-Sturm system v'' = R v with R samples (row-major, node after node). */
CONJPOINTS_API cp_status cp_morse_sturm_sampled(int n, const double* g, double a, double b,
                                                int grid_N, const double* R, cp_system** out);
CONJPOINTS_API cp_status cp_system_load(const char* path, cp_system** out);
CONJPOINTS_API cp_status cp_system_save(const cp_system* s, const char* path);
CONJPOINTS_API cp_status cp_system_info(const cp_system* s, int* n, double* a, double* b,
                                        int* grid_N);
CONJPOINTS_API void cp_system_free(cp_system* s);

/* ---- detection ---- */

/* opts may be null (defaults, then any defaults stored with a loaded file). */
CONJPOINTS_API cp_status cp_detect(const cp_system* s, const cp_detect_options* opts,
                                   cp_report** out);
CONJPOINTS_API cp_status cp_maslov_regular(const cp_system* s, const cp_detect_options* opts,
                                           int* out);
CONJPOINTS_API cp_status cp_report_counts(const cp_report* r, int* instants, int* clusters);
/* has_signature = 0 when the signature is unavailable. */
CONJPOINTS_API cp_status cp_report_instant(const cp_report* r, int i, double* t,
                                           int* multiplicity, int* signature,
                                           int* has_signature, int* regular);
CONJPOINTS_API cp_status cp_report_cluster(const cp_report* r, int i, double* lo, double* hi);
/* Borrowed arrays, valid while r lives. */
CONJPOINTS_API cp_status cp_report_trace(const cp_report* r, int* count, const double** times,
                                         const double** d);
CONJPOINTS_API cp_status cp_report_scalars(const cp_report* r, double* d_scale,
                                           double* exclusion_radius, double* max_drift);
CONJPOINTS_API cp_status cp_report_save_json(const cp_report* r, const char* path);
CONJPOINTS_API cp_status cp_report_save_csv(const cp_report* r, const char* path);
CONJPOINTS_API void cp_report_free(cp_report* r);

/* ---- reduction ---- */

/* Composite reduction to a Morse-Sturm system; out is its sp-form. */
CONJPOINTS_API cp_status cp_to_morse_sturm(const cp_system* s, cp_system** out,
                                           double* max_A_residual, double* max_B_defect);

/* ---- prescribed conjugate sets ---- */

typedef struct {
  int grid_N;                /* nominal grid */
  int oversample;            /* working grid = grid_N * oversample */
  double edge_steps;         /* in nominal steps */
  double flat_steps;
  double derivative_budget;
  double isolated_run_steps;
  cp_detect_options detect;  /* exclusion_radius < 0: 5 nominal steps */
} cp_pipeline_options;

CONJPOINTS_API void cp_pipeline_options_default(cp_pipeline_options* opts);
/* set: "x" for a point, "lo:hi" for an interval, items separated by ';'. */
CONJPOINTS_API cp_status cp_prescribe(const char* set, double a, double b,
                                      const cp_pipeline_options* opts, cp_prescribed** out);
/* Hausdorff distance in nominal steps between F and the detected set;
 * passed = distance <= 2. */
CONJPOINTS_API cp_status cp_prescribed_summary(const cp_prescribed* p, double* distance_steps,
                                               int* abstract_index, int* passed);
CONJPOINTS_API cp_status cp_prescribed_report(const cp_prescribed* p, cp_report** out);
/* The reduced Morse-Sturm system, carrying the pipeline's detector defaults. */
CONJPOINTS_API cp_status cp_prescribed_system(const cp_prescribed* p, cp_system** out);
CONJPOINTS_API cp_status cp_prescribed_save_summary(const cp_prescribed* p, const char* path);
CONJPOINTS_API void cp_prescribed_free(cp_prescribed* p);

/* ---- geometry ---- */

typedef struct {
  double h;
  double max_christoffel_on_axis;
  double max_christoffel_on_axis_half;
  double geodesic_residual;
  double geodesic_residual_half;
  double offaxis_stencil_error;
  double offaxis_stencil_error_half;
  double offaxis_order;
  double curvature_mismatch;
  double curvature_mismatch_half;
  int index_of_metric;
  int inertia_constant;
} cp_geometry_report;

/* s must be in Morse-Sturm form (A = 0, B constant). */
CONJPOINTS_API cp_status cp_metric_from_system(const cp_system* s, cp_causal causal,
                                               cp_metric** out);
CONJPOINTS_API cp_status cp_metric_load(const char* path, cp_metric** out);
CONJPOINTS_API cp_status cp_metric_save(const cp_metric* m, const char* path);
CONJPOINTS_API cp_status cp_metric_index(const cp_metric* m, int* index);
CONJPOINTS_API cp_status cp_verify_geometry(const cp_metric* m, double h,
                                            cp_geometry_report* out);
CONJPOINTS_API cp_status cp_geometry_report_save(const cp_geometry_report* r, const char* path);
CONJPOINTS_API void cp_metric_free(cp_metric* m);

#ifdef __cplusplus
}
#endif

#endif /* CONJPOINTS_H */
