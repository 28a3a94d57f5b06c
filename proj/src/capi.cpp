#include "lqglab.h"

#include <cstring>
#include <string>

#include "lqglab/analysis.hpp"
#include "lqglab/crossings.hpp"
#include "lqglab/gff.hpp"
#include "lqglab/grid_field.hpp"
#include "lqglab/harmonic.hpp"
#include "lqglab/harness.hpp"
#include "lqglab/loewner.hpp"
#include "lqglab/metric_graph.hpp"
#include "lqglab/render.hpp"

using namespace lqglab;

struct lqg_field {
  grf::GridField impl;
};
struct lqg_graph {
  lfpp::MetricGraph impl;
};
struct lqg_path {
  PlanarPath impl;
};

namespace {

thread_local std::string t_last_error;

lqg_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ok: return LQG_OK;
    case ErrorCode::invalid_parameter: return LQG_ERR_INVALID_PARAM;
    case ErrorCode::out_of_domain: return LQG_ERR_OUT_OF_DOMAIN;
    case ErrorCode::resolution: return LQG_ERR_RESOLUTION;
    case ErrorCode::numerical: return LQG_ERR_NUMERICAL;
    case ErrorCode::degenerate_input: return LQG_ERR_DEGENERATE;
    case ErrorCode::io: return LQG_ERR_IO;
    case ErrorCode::divergent_walker: return LQG_ERR_DIVERGENT_WALKER;
  }
  return LQG_ERR_UNKNOWN;
}

template <typename F>
lqg_status guarded(F&& f) {
  try {
    f();
    t_last_error.clear();
    return LQG_OK;
  } catch (const Error& e) {
    t_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return LQG_ERR_UNKNOWN;
  } catch (...) {
    t_last_error = "unknown error";
    return LQG_ERR_UNKNOWN;
  }
}

lqg_status require(bool ok, const char* what) {
  if (ok) return LQG_OK;
  t_last_error = what;
  return LQG_ERR_INVALID_PARAM;
}

}  // namespace

extern "C" {

const char* lqg_version(void) { return harness::kVersion; }
const char* lqg_last_error_message(void) { return t_last_error.c_str(); }

/* ---- fields ---------------------------------------------------------- */

lqg_status lqg_field_sample_zero_boundary(int32_t grid_size, double spacing, uint64_t seed,
                                          lqg_field** out) {
  if (require(out != nullptr, "null out pointer")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { *out = new lqg_field{grf::sample_zero_boundary_gff(grid_size, spacing, seed)}; });
}

lqg_status lqg_field_sample_whole_plane(int32_t grid_size, double spacing, uint64_t seed,
                                        lqg_field** out) {
  if (require(out != nullptr, "null out pointer")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { *out = new lqg_field{grf::sample_whole_plane_gff(grid_size, spacing, seed)}; });
}

lqg_status lqg_field_load(const char* path, lqg_field** out) {
  if (require(path && out, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { *out = new lqg_field{grf::load_field(path)}; });
}

lqg_status lqg_field_save(const lqg_field* field, const char* path) {
  if (require(field && path, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { grf::save_field(field->impl, path); });
}

lqg_status lqg_field_export_csv(const lqg_field* field, const char* path) {
  if (require(field && path, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { grf::export_field_csv(field->impl, path); });
}

void lqg_field_free(lqg_field* field) { delete field; }

int32_t lqg_field_size(const lqg_field* field) { return field ? field->impl.n : 0; }
double lqg_field_spacing(const lqg_field* field) { return field ? field->impl.spacing : 0.0; }
double lqg_field_value(const lqg_field* field, int32_t i, int32_t j) {
  if (!field || i < 0 || j < 0 || i >= field->impl.n || j >= field->impl.n) return 0.0;
  return field->impl.at(i, j);
}

lqg_status lqg_field_values(const lqg_field* field, double* values, size_t capacity) {
  if (require(field && values, "null argument")) return LQG_ERR_INVALID_PARAM;
  if (require(capacity >= field->impl.values.size(), "capacity too small"))
    return LQG_ERR_INVALID_PARAM;
  std::memcpy(values, field->impl.values.data(), field->impl.values.size() * sizeof(double));
  return LQG_OK;
}

lqg_status lqg_field_circle_average(const lqg_field* field, double cx, double cy, double radius,
                                    double* out) {
  if (require(field && out, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { *out = grf::circle_average(field->impl, {cx, cy}, radius); });
}

lqg_status lqg_field_is_m_good(const lqg_field* field, double cx, double cy, double radius,
                               double M, int32_t* out) {
  if (require(field && out, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { *out = grf::is_m_good(field->impl, {cx, cy}, radius, M) ? 1 : 0; });
}

lqg_status lqg_field_good_scale_report(const lqg_field* field, double cx, double cy,
                                       double base_radius, int32_t K, double M, int32_t* per_scale,
                                       double* fraction) {
  if (require(field && per_scale, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] {
    const auto rep = grf::good_scale_report(field->impl, {cx, cy}, base_radius, K, M);
    for (int k = 0; k < K; ++k) per_scale[k] = rep.per_scale_good[k] ? 1 : 0;
    if (fraction) *fraction = rep.fraction_good;
  });
}

lqg_status lqg_field_measure(const lqg_field* field, double gamma, double x0, double y0, double x1,
                             double y1, double* out) {
  if (require(field && out, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { *out = grf::lqg_measure(field->impl, gamma, {x0, y0, x1, y1}); });
}

/* ---- graphs ------------------------------------------------------------ */

lqg_status lqg_graph_build(const lqg_field* field, double xi, lqg_graph** out) {
  if (require(field && out, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { *out = new lqg_graph{lfpp::MetricGraph(field->impl, xi)}; });
}

void lqg_graph_free(lqg_graph* graph) { delete graph; }

int32_t lqg_graph_side(const lqg_graph* graph) { return graph ? graph->impl.side() : 0; }

lqg_status lqg_graph_vertex_position(const lqg_graph* graph, int32_t v, double* x, double* y) {
  if (require(graph && x && y, "null argument")) return LQG_ERR_INVALID_PARAM;
  if (require(v >= 0 && v < graph->impl.vertex_count(), "vertex out of range"))
    return LQG_ERR_INVALID_PARAM;
  const Vec2 p = graph->impl.position(v);
  *x = p.x;
  *y = p.y;
  return LQG_OK;
}

lqg_status lqg_graph_nearest_vertex(const lqg_graph* graph, double x, double y, int32_t* out) {
  if (require(graph && out, "null argument")) return LQG_ERR_INVALID_PARAM;
  *out = graph->impl.nearest_vertex({x, y});
  return LQG_OK;
}

lqg_status lqg_graph_distance(const lqg_graph* graph, int32_t a, int32_t b, double* out) {
  if (require(graph && out, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { *out = lfpp::distance(graph->impl, a, b); });
}

lqg_status lqg_graph_geodesic(const lqg_graph* graph, int32_t a, int32_t b, lqg_path** out) {
  if (require(graph && out, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { *out = new lqg_path{lfpp::geodesic(graph->impl, a, b)}; });
}

lqg_status lqg_graph_internal_distance(const lqg_graph* graph, const int32_t* region,
                                       size_t region_len, int32_t a, int32_t b, double* out) {
  if (require(graph && region && out, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] {
    std::vector<int> reg(region, region + region_len);
    *out = lfpp::internal_distance(graph->impl, reg, a, b);
  });
}

lqg_status lqg_graph_separating_length(const lqg_graph* graph, double zx, double zy, double r_in,
                                       double r_out, double* out) {
  if (require(graph && out, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { *out = lfpp::annulus_separating_length(graph->impl, {zx, zy}, r_in, r_out); });
}

lqg_status lqg_graph_crossing_length(const lqg_graph* graph, double zx, double zy, double r_in,
                                     double r_out, double* out) {
  if (require(graph && out, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { *out = lfpp::annulus_crossing_length(graph->impl, {zx, zy}, r_in, r_out); });
}

lqg_status lqg_graph_metric_ball(const lqg_graph* graph, int32_t center, double radius,
                                 int32_t* members, size_t member_capacity, size_t* member_count,
                                 int32_t* boundary, size_t boundary_capacity,
                                 size_t* boundary_count) {
  if (require(graph && member_count && boundary_count, "null argument"))
    return LQG_ERR_INVALID_PARAM;
  return guarded([&] {
    const auto ball = lfpp::metric_ball(graph->impl, center, radius);
    *member_count = ball.member_vertices.size();
    *boundary_count = ball.boundary_vertices.size();
    if (members)
      for (size_t i = 0; i < std::min(member_capacity, ball.member_vertices.size()); ++i)
        members[i] = ball.member_vertices[i];
    if (boundary)
      for (size_t i = 0; i < std::min(boundary_capacity, ball.boundary_vertices.size()); ++i)
        boundary[i] = ball.boundary_vertices[i];
  });
}

/* ---- paths -------------------------------------------------------------- */

lqg_status lqg_path_from_points(const double* xy, size_t count, lqg_path** out) {
  if (require(xy && out, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] {
    std::vector<Vec2> pts;
    pts.reserve(count);
    for (size_t i = 0; i < count; ++i) pts.push_back({xy[2 * i], xy[2 * i + 1]});
    *out = new lqg_path{make_path(std::move(pts), PathKind::synthetic)};
  });
}

void lqg_path_free(lqg_path* path) { delete path; }

size_t lqg_path_size(const lqg_path* path) { return path ? path->impl.size() : 0; }

lqg_status lqg_path_point(const lqg_path* path, size_t index, double* x, double* y,
                          double* cumulative_length) {
  if (require(path, "null path")) return LQG_ERR_INVALID_PARAM;
  if (require(index < path->impl.size(), "index out of range")) return LQG_ERR_INVALID_PARAM;
  if (x) *x = path->impl.vertices[index].x;
  if (y) *y = path->impl.vertices[index].y;
  if (cumulative_length) *cumulative_length = path->impl.cumulative_length[index];
  return LQG_OK;
}

lqg_status lqg_path_export_csv(const lqg_path* path, const char* file) {
  if (require(path && file, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { export_path_csv(path->impl, file); });
}

lqg_status lqg_sle_chordal_trace(double kappa, double horizon, double dt, uint64_t seed,
                                 int32_t stride, lqg_path** out) {
  if (require(out != nullptr, "null out pointer")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] {
    const auto driving = loewner::sample_driving(kappa, horizon, dt, seed);
    *out = new lqg_path{loewner::chordal_trace(driving, stride)};
  });
}

lqg_status lqg_sle_whole_plane_trace(double kappa, double horizon, double dt, uint64_t seed,
                                     int32_t stride, lqg_path** out) {
  if (require(out != nullptr, "null out pointer")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { *out = new lqg_path{loewner::whole_plane_trace(kappa, horizon, dt, seed, stride)}; });
}

lqg_status lqg_theta_diffusion(double kappa, double theta0, double horizon, double dt,
                               uint64_t seed, double* stopped_value, int32_t* absorbed) {
  if (require(stopped_value != nullptr, "null out pointer")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] {
    const auto path = loewner::theta_diffusion(kappa, theta0, horizon, dt, seed);
    *stopped_value = path.stopped_value();
    if (absorbed) *absorbed = path.absorbed ? 1 : 0;
  });
}

/* ---- crossings ----------------------------------------------------------- */

lqg_status lqg_count_crossings(const lqg_path* path, double zx, double zy, double r_in,
                               double r_out, int32_t* out) {
  if (require(path && out, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { *out = crossings::count_crossings(path->impl, {{zx, zy}, r_in, r_out}); });
}

lqg_status lqg_max_crossings_over_grid(const lqg_path* path, double epsilon, double alpha,
                                       double x0, double y0, double x1, double y1,
                                       double center_spacing, int32_t* max_count,
                                       size_t* skipped_centers) {
  if (require(path && max_count, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] {
    const auto rep = crossings::max_crossings_over_grid(path->impl, epsilon, alpha,
                                                        {x0, y0, x1, y1}, center_spacing);
    *max_count = rep.max_count;
    if (skipped_centers) *skipped_centers = rep.skipped_centers.size();
  });
}

lqg_status lqg_scale_scan(const lqg_graph* graph, double zx, double zy, double base_radius,
                          int32_t K, double c, double* l1, double* l2, double* s1, double* s2,
                          int32_t* count_l1_le_c_l2, int32_t* count_s1_lt_s2) {
  if (require(graph && l1 && l2 && s1 && s2, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] {
    const auto scan = crossings::scale_scan(graph->impl, {zx, zy}, base_radius, K, c);
    for (int k = 0; k < K; ++k) {
      l1[k] = scan.per_scale[k].l1;
      l2[k] = scan.per_scale[k].l2;
      s1[k] = scan.per_scale[k].s1;
      s2[k] = scan.per_scale[k].s2;
    }
    if (count_l1_le_c_l2) *count_l1_le_c_l2 = scan.count_l1_le_c_l2;
    if (count_s1_lt_s2) *count_s1_lt_s2 = scan.count_s1_lt_s2;
  });
}

lqg_status lqg_binomial_tail_bound(double p, double r, int32_t n, double* out) {
  if (require(out != nullptr, "null out pointer")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { *out = crossings::binomial_tail_bound(p, r, n); });
}

/* ---- analysis -------------------------------------------------------------- */

lqg_status lqg_holder_modulus(const lqg_path* path, double delta, double* out) {
  if (require(path && out, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { *out = analysis::holder_modulus(path->impl, delta); });
}

lqg_status lqg_box_counting(const lqg_path* path, const double* scales, size_t num_scales,
                            int64_t* counts, double* slope) {
  if (require(path && scales && counts, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] {
    std::vector<double> sc(scales, scales + num_scales);
    const auto r = analysis::box_counting_dimension(path->impl, sc);
    for (size_t i = 0; i < num_scales; ++i) counts[i] = r.counts[i];
    if (slope) *slope = r.slope;
  });
}

lqg_status lqg_shadow_depth_totals(const lqg_path* path, double box_x0, double box_y0,
                                   double box_side, int32_t max_depth, int32_t walkers_per_cube,
                                   uint64_t seed, int64_t* cube_counts, double* sums,
                                   double* total) {
  if (require(path && cube_counts && sums, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] {
    const Rect box{box_x0, box_y0, box_x0 + box_side, box_y0 + box_side};
    const auto dec = analysis::whitney_decomposition(path->impl, box, max_depth);
    const auto shadows = analysis::shadow_sum_estimate(path->impl, dec.cubes, walkers_per_cube, seed);
    for (int d = 0; d <= max_depth; ++d) {
      cube_counts[d] = 0;
      sums[d] = 0.0;
    }
    for (const auto& t : analysis::shadow_totals_by_depth(shadows)) {
      cube_counts[t.depth] = t.cube_count;
      sums[t.depth] = t.sum_diam_sq;
    }
    if (total) *total = shadows.total;
  });
}

/* ---- harness ----------------------------------------------------------------- */

lqg_status lqg_run_config_file(const char* config_path, const char* experiment,
                               const char* out_dir_override, uint64_t seed_override,
                               char* manifest_path, size_t capacity) {
  if (require(config_path != nullptr, "null config path")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] {
    harness::ExperimentConfig config = harness::load_config_file(config_path);
    if (experiment && experiment[0]) {
      if (!config.experiment.empty() && config.experiment != experiment)
        fail(ErrorCode::invalid_parameter, "config names experiment '" + config.experiment +
                                               "' but '" + experiment + "' was requested");
      config.experiment = experiment;
    }
    if (out_dir_override && out_dir_override[0]) config.output_dir = out_dir_override;
    if (seed_override != 0) config.seed = seed_override;
    const auto man = harness::run(config);
    if (manifest_path && capacity > 0) {
      std::strncpy(manifest_path, man.manifest_path.c_str(), capacity - 1);
      manifest_path[capacity - 1] = '\0';
    }
  });
}

lqg_status lqg_render_file(const char* input, const char* style, const char* out_png) {
  if (require(input && style && out_png, "null argument")) return LQG_ERR_INVALID_PARAM;
  return guarded([&] { render::render_file(input, style, out_png); });
}

}  // extern "C"
