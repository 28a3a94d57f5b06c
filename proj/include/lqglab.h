/* lqglab.h - C interface to the LQG metric laboratory.
 *
 * All functions return an lqg_status (LQG_OK on success); results come back
 * through out-parameters.  Objects are opaque handles freed with their
 * matching *_free function.  lqg_last_error_message() describes the most
 * recent failure on the calling thread.
 */

#ifndef LQGLAB_H
#define LQGLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lqg_status {
  LQG_OK = 0,
  LQG_ERR_INVALID_PARAM = 1,
  LQG_ERR_OUT_OF_DOMAIN = 2,
  LQG_ERR_RESOLUTION = 3,
  LQG_ERR_NUMERICAL = 4,
  LQG_ERR_DEGENERATE = 5,
  LQG_ERR_IO = 6,
  LQG_ERR_DIVERGENT_WALKER = 7,
  LQG_ERR_UNKNOWN = 99
} lqg_status;

typedef struct lqg_field lqg_field;
typedef struct lqg_graph lqg_graph;
typedef struct lqg_path lqg_path;

const char* lqg_version(void);
/* Message for the most recent error on this thread; empty string if none. */
const char* lqg_last_error_message(void);

/* ---- fields ---------------------------------------------------------- */

lqg_status lqg_field_sample_zero_boundary(int32_t grid_size, double spacing, uint64_t seed,
                                          lqg_field** out);
lqg_status lqg_field_sample_whole_plane(int32_t grid_size, double spacing, uint64_t seed,
                                        lqg_field** out);
lqg_status lqg_field_load(const char* path, lqg_field** out);
lqg_status lqg_field_save(const lqg_field* field, const char* path);
lqg_status lqg_field_export_csv(const lqg_field* field, const char* path);
void lqg_field_free(lqg_field* field);

int32_t lqg_field_size(const lqg_field* field);
double lqg_field_spacing(const lqg_field* field);
double lqg_field_value(const lqg_field* field, int32_t i, int32_t j);
/* Writes the full row-major value matrix into `values` (size n*n). */
lqg_status lqg_field_values(const lqg_field* field, double* values, size_t capacity);

lqg_status lqg_field_circle_average(const lqg_field* field, double cx, double cy, double radius,
                                    double* out);
lqg_status lqg_field_is_m_good(const lqg_field* field, double cx, double cy, double radius,
                               double M, int32_t* out);
/* per_scale must hold K entries (1 = good); fraction may be NULL. */
lqg_status lqg_field_good_scale_report(const lqg_field* field, double cx, double cy,
                                       double base_radius, int32_t K, double M, int32_t* per_scale,
                                       double* fraction);
lqg_status lqg_field_measure(const lqg_field* field, double gamma, double x0, double y0, double x1,
                             double y1, double* out);

/* ---- LFPP metric graphs ---------------------------------------------- */

lqg_status lqg_graph_build(const lqg_field* field, double xi, lqg_graph** out);
void lqg_graph_free(lqg_graph* graph);
int32_t lqg_graph_side(const lqg_graph* graph);
/* Vertices are row-major indices v = i * side + j. */
lqg_status lqg_graph_vertex_position(const lqg_graph* graph, int32_t v, double* x, double* y);
lqg_status lqg_graph_nearest_vertex(const lqg_graph* graph, double x, double y, int32_t* out);

lqg_status lqg_graph_distance(const lqg_graph* graph, int32_t a, int32_t b, double* out);
lqg_status lqg_graph_geodesic(const lqg_graph* graph, int32_t a, int32_t b, lqg_path** out);
/* Unreachable pairs inside the region report +infinity, not an error. */
lqg_status lqg_graph_internal_distance(const lqg_graph* graph, const int32_t* region,
                                       size_t region_len, int32_t a, int32_t b, double* out);
lqg_status lqg_graph_separating_length(const lqg_graph* graph, double zx, double zy, double r_in,
                                       double r_out, double* out);
lqg_status lqg_graph_crossing_length(const lqg_graph* graph, double zx, double zy, double r_in,
                                     double r_out, double* out);
/* Open metric ball; member/boundary arrays are owned by the caller and
 * filled up to their capacity, with the true counts reported. */
lqg_status lqg_graph_metric_ball(const lqg_graph* graph, int32_t center, double radius,
                                 int32_t* members, size_t member_capacity, size_t* member_count,
                                 int32_t* boundary, size_t boundary_capacity,
                                 size_t* boundary_count);

/* ---- paths and traces ------------------------------------------------- */

lqg_status lqg_path_from_points(const double* xy, size_t count, lqg_path** out);
void lqg_path_free(lqg_path* path);
size_t lqg_path_size(const lqg_path* path);
lqg_status lqg_path_point(const lqg_path* path, size_t index, double* x, double* y,
                          double* cumulative_length);
lqg_status lqg_path_export_csv(const lqg_path* path, const char* file);

lqg_status lqg_sle_chordal_trace(double kappa, double horizon, double dt, uint64_t seed,
                                 int32_t stride, lqg_path** out);
lqg_status lqg_sle_whole_plane_trace(double kappa, double horizon, double dt, uint64_t seed,
                                     int32_t stride, lqg_path** out);
/* Stopped value of the angle diffusion at the horizon plus absorption flag. */
lqg_status lqg_theta_diffusion(double kappa, double theta0, double horizon, double dt,
                               uint64_t seed, double* stopped_value, int32_t* absorbed);

/* ---- crossing statistics ---------------------------------------------- */

lqg_status lqg_count_crossings(const lqg_path* path, double zx, double zy, double r_in,
                               double r_out, int32_t* out);
lqg_status lqg_max_crossings_over_grid(const lqg_path* path, double epsilon, double alpha,
                                       double x0, double y0, double x1, double y1,
                                       double center_spacing, int32_t* max_count,
                                       size_t* skipped_centers);
/* scale_scan: arrays must hold K entries each. */
lqg_status lqg_scale_scan(const lqg_graph* graph, double zx, double zy, double base_radius,
                          int32_t K, double c, double* l1, double* l2, double* s1, double* s2,
                          int32_t* count_l1_le_c_l2, int32_t* count_s1_lt_s2);
lqg_status lqg_binomial_tail_bound(double p, double r, int32_t n, double* out);

/* ---- path analysis ----------------------------------------------------- */

lqg_status lqg_holder_modulus(const lqg_path* path, double delta, double* out);
/* counts must hold num_scales entries. */
lqg_status lqg_box_counting(const lqg_path* path, const double* scales, size_t num_scales,
                            int64_t* counts, double* slope);
/* Whitney + walk-on-spheres shadows aggregated per depth; arrays sized
 * max_depth+1 are filled for depths 0..max_depth. */
lqg_status lqg_shadow_depth_totals(const lqg_path* path, double box_x0, double box_y0,
                                   double box_side, int32_t max_depth, int32_t walkers_per_cube,
                                   uint64_t seed, int64_t* cube_counts, double* sums,
                                   double* total);

/* ---- harness ----------------------------------------------------------- */

/* Runs the experiment described by a key = value config file.  When
 * `experiment` is non-NULL it names the experiment to run; a config that
 * names a different one is rejected.  seed_override replaces the config seed
 * when nonzero; out_dir_override likewise when non-NULL.  The manifest path
 * is written into manifest_path (truncated to capacity). */
lqg_status lqg_run_config_file(const char* config_path, const char* experiment,
                               const char* out_dir_override, uint64_t seed_override,
                               char* manifest_path, size_t capacity);
lqg_status lqg_render_file(const char* input, const char* style, const char* out_png);

#ifdef __cplusplus
}
#endif

#endif /* LQGLAB_H */
