#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lqglab.h"
#include "lqglab/gff.hpp"
#include "lqglab/io_util.hpp"

namespace fs = std::filesystem;

namespace {

struct FieldHandle {
  lqg_field* ptr = nullptr;
  ~FieldHandle() { lqg_field_free(ptr); }
};
struct GraphHandle {
  lqg_graph* ptr = nullptr;
  ~GraphHandle() { lqg_graph_free(ptr); }
};
struct PathHandle {
  lqg_path* ptr = nullptr;
  ~PathHandle() { lqg_path_free(ptr); }
};

}  // namespace

TEST_CASE("c api: field sampling matches the core bit for bit") {
  FieldHandle f;
  REQUIRE(lqg_field_sample_whole_plane(32, 4.0 / 32, 123, &f.ptr) == LQG_OK);
  CHECK(lqg_field_size(f.ptr) == 32);
  CHECK(lqg_field_spacing(f.ptr) == 4.0 / 32);

  const auto core = lqglab::grf::sample_whole_plane_gff(32, 4.0 / 32, 123);
  std::vector<double> values(32 * 32);
  REQUIRE(lqg_field_values(f.ptr, values.data(), values.size()) == LQG_OK);
  CHECK(values == core.values);
  CHECK(lqg_field_value(f.ptr, 3, 7) == core.at(3, 7));
}

TEST_CASE("c api: error codes and messages surface correctly") {
  lqg_field* raw = nullptr;
  CHECK(lqg_field_sample_whole_plane(48, 0.1, 1, &raw) == LQG_ERR_INVALID_PARAM);
  CHECK(std::strlen(lqg_last_error_message()) > 0);
  CHECK(lqg_field_sample_zero_boundary(4, 0.1, 1, &raw) == LQG_ERR_INVALID_PARAM);

  FieldHandle f;
  REQUIRE(lqg_field_sample_zero_boundary(16, 0.1, 7, &f.ptr) == LQG_OK);
  double avg = 0.0;
  CHECK(lqg_field_circle_average(f.ptr, 0.0, 0.0, 0.5, &avg) == LQG_OK);
  CHECK(lqg_field_circle_average(f.ptr, 5.0, 0.0, 0.5, &avg) == LQG_ERR_OUT_OF_DOMAIN);
  CHECK(lqg_field_circle_average(f.ptr, 0.0, 0.0, 0.05, &avg) == LQG_ERR_INVALID_PARAM);
  CHECK(lqg_field_measure(f.ptr, 2.5, -0.2, -0.2, 0.2, 0.2, &avg) == LQG_ERR_INVALID_PARAM);
}

TEST_CASE("c api: graph queries, geodesics, annulus lengths") {
  FieldHandle f;
  REQUIRE(lqg_field_sample_whole_plane(64, 4.0 / 64, 9, &f.ptr) == LQG_OK);
  GraphHandle g;
  REQUIRE(lqg_graph_build(f.ptr, 0.41, &g.ptr) == LQG_OK);
  CHECK(lqg_graph_side(g.ptr) == 64);

  int32_t a = 0, b = 0;
  REQUIRE(lqg_graph_nearest_vertex(g.ptr, -1.0, -1.0, &a) == LQG_OK);
  REQUIRE(lqg_graph_nearest_vertex(g.ptr, 1.0, 1.0, &b) == LQG_OK);
  double d = 0.0;
  REQUIRE(lqg_graph_distance(g.ptr, a, b, &d) == LQG_OK);
  CHECK(d > 0.0);

  PathHandle geo;
  REQUIRE(lqg_graph_geodesic(g.ptr, a, b, &geo.ptr) == LQG_OK);
  double x, y, cl;
  REQUIRE(lqg_path_point(geo.ptr, lqg_path_size(geo.ptr) - 1, &x, &y, &cl) == LQG_OK);
  CHECK(cl == doctest::Approx(d).epsilon(1e-12));
  CHECK(lqg_graph_geodesic(g.ptr, a, a, &geo.ptr) == LQG_ERR_DEGENERATE);

  double l1 = 0.0, l2 = 0.0;
  REQUIRE(lqg_graph_separating_length(g.ptr, 0.0, 0.0, 0.5, 0.875, &l1) == LQG_OK);
  REQUIRE(lqg_graph_crossing_length(g.ptr, 0.0, 0.0, 0.5, 0.875, &l2) == LQG_OK);
  CHECK(l1 > 0.0);
  CHECK(l2 > 0.0);
  CHECK(lqg_graph_separating_length(g.ptr, 0.0, 0.0, 0.5, 0.51, &l1) == LQG_ERR_RESOLUTION);

  // Internal distance with an explicit region; +inf for split regions.
  const int32_t region[3] = {0, 1, 64 * 32 + 32};
  REQUIRE(lqg_graph_internal_distance(g.ptr, region, 3, 0, 64 * 32 + 32, &d) == LQG_OK);
  CHECK(std::isinf(d));

  size_t members = 0, boundary = 0;
  REQUIRE(lqg_graph_metric_ball(g.ptr, 64 * 32 + 32, 0.4, nullptr, 0, &members, nullptr, 0,
                                &boundary) == LQG_OK);
  CHECK(members > 0);
  CHECK(boundary > 0);
  CHECK(boundary <= members);

  int32_t per_scale[2] = {-1, -1};
  double fraction = -1.0;
  int32_t good = -1;
  REQUIRE(lqg_field_good_scale_report(f.ptr, 0.0, 0.0, 1.0, 2, 4.0, per_scale, &fraction) ==
          LQG_OK);
  CHECK(fraction >= 0.0);
  CHECK(fraction <= 1.0);
  REQUIRE(lqg_field_is_m_good(f.ptr, 0.0, 0.0, 0.5, 4.0, &good) == LQG_OK);
  CHECK((good == 0 || good == 1));

  double l1k[2], l2k[2], s1k[2], s2k[2];
  int32_t n_l = -1, n_s = -1;
  REQUIRE(lqg_scale_scan(g.ptr, 0.0, 0.0, 4.0, 2, 16.0, l1k, l2k, s1k, s2k, &n_l, &n_s) ==
          LQG_OK);
  CHECK(l1k[0] > 0.0);
  CHECK(n_l >= 0);
}

TEST_CASE("c api: traces, theta diffusion, crossing counts, analysis calls") {
  PathHandle trace;
  REQUIRE(lqg_sle_chordal_trace(6.0, 0.05, 1e-5, 42, 1, &trace.ptr) == LQG_OK);
  CHECK(lqg_path_size(trace.ptr) == 5001);

  int32_t count = -1;
  REQUIRE(lqg_count_crossings(trace.ptr, 0.0, 0.05, 0.04, 0.1, &count) == LQG_OK);
  CHECK(count >= 0);

  int32_t max_count = -1;
  size_t skipped = 0;
  REQUIRE(lqg_max_crossings_over_grid(trace.ptr, 0.25, 1.2, -1.0, 0.0, 1.0, 1.0, 0.125,
                                      &max_count, &skipped) == LQG_OK);
  CHECK(max_count >= 0);

  double stopped = 0.0;
  int32_t absorbed = -1;
  REQUIRE(lqg_theta_diffusion(4.0, 1.5, 1.0, 1e-3, 3, &stopped, &absorbed) == LQG_OK);
  CHECK((absorbed == 0 || absorbed == 1));
  CHECK(lqg_theta_diffusion(4.0, -1.0, 1.0, 1e-3, 3, &stopped, &absorbed) ==
        LQG_ERR_INVALID_PARAM);

  double bound = 0.0;
  REQUIRE(lqg_binomial_tail_bound(0.5, 0.75, 100, &bound) == LQG_OK);
  CHECK(bound == doctest::Approx(2.08e-6).epsilon(0.01));

  // Synthetic path through the analysis entry points.
  std::vector<double> xy;
  for (int i = 0; i <= 200; ++i) {
    xy.push_back(0.001 + 0.998 * i / 200.0);
    xy.push_back(0.013);
  }
  PathHandle seg;
  REQUIRE(lqg_path_from_points(xy.data(), 201, &seg.ptr) == LQG_OK);
  double modulus = 0.0;
  REQUIRE(lqg_holder_modulus(seg.ptr, 0.5, &modulus) == LQG_OK);
  CHECK(modulus == doctest::Approx(std::sqrt(0.998)).epsilon(1e-9));

  const double scales[3] = {0.25, 0.125, 0.0625};
  int64_t counts[3];
  double slope = 0.0;
  REQUIRE(lqg_box_counting(seg.ptr, scales, 3, counts, &slope) == LQG_OK);
  CHECK(counts[0] >= 4);
  CHECK(slope == doctest::Approx(1.0).epsilon(0.15));

  int64_t cube_counts[7];
  double sums[7], total = 0.0;
  REQUIRE(lqg_shadow_depth_totals(seg.ptr, -0.5, -0.7, 2.0, 6, 16, 5, cube_counts, sums,
                                  &total) == LQG_OK);
  CHECK(total > 0.0);
}

TEST_CASE("c api: run + render end to end") {
  const fs::path dir = "capi_work";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "field.cfg");
    cfg << "experiment = field\ngrid_size = 32\nreplicas = 1\nseed = 3\nexport_csv = true\n";
  }
  char manifest[1024] = {0};
  REQUIRE(lqg_run_config_file((dir / "field.cfg").string().c_str(), "field",
                              (dir / "out").string().c_str(), 0, manifest, sizeof(manifest)) ==
          LQG_OK);
  CHECK(fs::exists(manifest));
  CHECK(fs::exists(dir / "out" / "field_0.grf"));

  REQUIRE(lqg_render_file((dir / "out" / "field_0.grf").string().c_str(), "field",
                          (dir / "field.png").string().c_str()) == LQG_OK);
  CHECK(fs::exists(dir / "field.png"));

  // Conflicting experiment names are rejected.
  CHECK(lqg_run_config_file((dir / "field.cfg").string().c_str(), "ball",
                            (dir / "out2").string().c_str(), 0, nullptr, 0) ==
        LQG_ERR_INVALID_PARAM);
  // Field save/load round trip through the C surface.
  FieldHandle f;
  REQUIRE(lqg_field_load((dir / "out" / "field_0.grf").string().c_str(), &f.ptr) == LQG_OK);
  CHECK(lqg_field_size(f.ptr) == 32);
  REQUIRE(lqg_field_save(f.ptr, (dir / "resaved.grf").string().c_str()) == LQG_OK);
  CHECK(lqglab::file_digest((dir / "out" / "field_0.grf").string()) ==
        lqglab::file_digest((dir / "resaved.grf").string()));
}
