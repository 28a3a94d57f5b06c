#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lqglab/io_util.hpp"
#include "lqglab/metric_graph.hpp"
#include "lqglab/rng.hpp"
#include "oracles.hpp"

using namespace lqglab;
using grf::GridField;
using lfpp::MetricGraph;

namespace {

GridField make_field(int n, double spacing, std::uint64_t seed, double scale = 1.0) {
  GridField f;
  f.n = n;
  f.spacing = spacing;
  f.origin = {-(n / 2) * spacing, -(n / 2) * spacing};
  f.boundary = grf::BoundaryKind::torus_whole_plane;
  f.normalization_note = "test";
  f.values.assign(static_cast<std::size_t>(n) * n, 0.0);
  if (seed != 0) {
    Rng rng(seed);
    for (double& v : f.values) v = scale * rng.gaussian();
  }
  return f;
}

GridField shifted(const GridField& f, double c) {
  GridField g = f;
  for (double& v : g.values) v += c;
  return g;
}

}  // namespace

TEST_CASE("flat graphs carry spacing-weight edges; constants factor out exactly") {
  const GridField flat = make_field(8, 0.25, 0);
  const MetricGraph g(flat, 0.41);
  CHECK(g.edge_weight(g.vertex_at(2, 2), g.vertex_at(2, 3)) == doctest::Approx(0.25).epsilon(1e-15));

  const GridField f = make_field(8, 0.25, 3);
  const MetricGraph a(f, 0.41);
  const MetricGraph b(shifted(f, 1.3), 0.41);
  const double factor = std::exp(0.41 * 1.3);
  for (int v = 0; v + 1 < a.vertex_count(); ++v) {
    if ((v + 1) % a.side() == 0) continue;
    CHECK(b.edge_weight(v, v + 1) ==
          doctest::Approx(factor * a.edge_weight(v, v + 1)).epsilon(1e-13));
  }
}

TEST_CASE("hand instance: weights match the rule; xi is validated") {
  GridField f = make_field(8, 0.5, 0);
  f.at(3, 3) = 1.0;
  f.at(3, 4) = -0.5;
  f.at(4, 3) = 0.25;
  const MetricGraph g(f, 2.0);
  const double w_expected = 0.5 * (std::exp(2.0 * 1.0) + std::exp(2.0 * -0.5)) / 2.0;
  CHECK(g.edge_weight(g.vertex_at(3, 3), g.vertex_at(3, 4)) ==
        doctest::Approx(w_expected).epsilon(1e-15));
  const double w2 = 0.5 * (std::exp(2.0 * 1.0) + std::exp(2.0 * 0.25)) / 2.0;
  CHECK(g.edge_weight(g.vertex_at(3, 3), g.vertex_at(4, 3)) ==
        doctest::Approx(w2).epsilon(1e-15));
  CHECK_THROWS_AS(MetricGraph(f, 0.0), Error);
}

TEST_CASE("distance: flat lattice and brute-force enumeration on random 4x4 blocks") {
  const GridField flat = make_field(8, 0.25, 0);
  const MetricGraph g(flat, 0.41);
  CHECK(lfpp::distance(g, g.vertex_at(3, 3), g.vertex_at(3, 3)) == 0.0);
  CHECK(lfpp::distance(g, g.vertex_at(3, 3), g.vertex_at(3, 4)) == doctest::Approx(0.25));
  CHECK(lfpp::distance(g, g.vertex_at(1, 2), g.vertex_at(1, 7)) == doctest::Approx(5 * 0.25));

  // Random 4x4 instances against exhaustive simple-path enumeration: the
  // block is embedded in a field whose outside heights make any detour
  // astronomically expensive, so distance() is the block shortest path.
  for (int inst = 0; inst < 5; ++inst) {
    GridField f = make_field(8, 1.0, 100 + inst);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        if (i >= 4 || j >= 4) f.at(i, j) = 50.0;
    const MetricGraph rg(f, 0.7);
    const int a = rg.vertex_at(0, 0);
    const int b = rg.vertex_at(3, 3);
    std::vector<int> region;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) region.push_back(rg.vertex_at(i, j));
    const double brute = oracles::brute_shortest_path_in_region(rg, region, a, b);
    CHECK(lfpp::distance(rg, a, b) == brute);
    CHECK(lfpp::internal_distance(rg, region, a, b) == brute);
  }
}

TEST_CASE("distance is symmetric and satisfies the triangle inequality") {
  const GridField f = make_field(16, 0.2, 7);
  const MetricGraph g(f, 0.41);
  Rng rng(99);
  for (int t = 0; t < 1000; ++t) {
    const int a = static_cast<int>(rng.below(g.vertex_count()));
    const int b = static_cast<int>(rng.below(g.vertex_count()));
    const int c = static_cast<int>(rng.below(g.vertex_count()));
    const double ab = lfpp::distance(g, a, b);
    const double bc = lfpp::distance(g, b, c);
    const double ac = lfpp::distance(g, a, c);
    // Reverse traversal sums the same weights in the opposite order.
    CHECK(lfpp::distance(g, b, a) == doctest::Approx(ab).epsilon(1e-12));
    CHECK(ac <= ab + bc + 1e-12 * (ab + bc));
  }
}

TEST_CASE("geodesic: flat monotone staircases, length identity, degenerate input") {
  const GridField flat = make_field(16, 0.25, 0);
  const MetricGraph g(flat, 0.41);
  const int a = g.vertex_at(3, 2), b = g.vertex_at(9, 11);
  const PlanarPath p = lfpp::geodesic(g, a, b);
  CHECK(p.kind == PathKind::geodesic);
  CHECK(p.length() == doctest::Approx(lfpp::distance(g, a, b)).epsilon(1e-12));
  for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) {
    CHECK(p.vertices[i + 1].x >= p.vertices[i].x);
    CHECK(p.vertices[i + 1].y >= p.vertices[i].y);
  }
  CHECK(p.vertices.size() == 6 + 9 + 1);
  CHECK_THROWS_AS(lfpp::geodesic(g, a, a), Error);
}

TEST_CASE("geodesic uniqueness: transposed relabeling returns the mirrored path") {
  const GridField f = make_field(16, 0.2, 31);
  GridField ft = f;
  for (int i = 0; i < f.n; ++i)
    for (int j = 0; j < f.n; ++j) ft.at(i, j) = f.at(j, i);
  const MetricGraph g(f, 0.41);
  const MetricGraph gt(ft, 0.41);
  const PlanarPath p = lfpp::geodesic(g, g.vertex_at(2, 3), g.vertex_at(13, 12));
  const PlanarPath pt = lfpp::geodesic(gt, gt.vertex_at(3, 2), gt.vertex_at(12, 13));
  REQUIRE(p.vertices.size() == pt.vertices.size());
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    CHECK(p.vertices[i].x == pt.vertices[i].y);
    CHECK(p.vertices[i].y == pt.vertices[i].x);
  }
}

TEST_CASE("geodesic subpaths are geodesics") {
  const GridField f = make_field(24, 0.2, 17);
  const MetricGraph g(f, 0.41);
  const PlanarPath p = lfpp::geodesic(g, g.vertex_at(2, 2), g.vertex_at(20, 19));
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const std::size_t i = rng.below(p.vertices.size() - 1);
    const std::size_t j = i + 1 + rng.below(p.vertices.size() - i - 1);
    const int vi = g.nearest_vertex(p.vertices[i]);
    const int vj = g.nearest_vertex(p.vertices[j]);
    const double along = p.cumulative_length[j] - p.cumulative_length[i];
    CHECK(along == doctest::Approx(lfpp::distance(g, vi, vj)).epsilon(1e-12));
  }
}

TEST_CASE("metric ball: flat crosses, tiny radii, distance-oracle membership, open ball") {
  const GridField flat = make_field(16, 0.25, 0);
  const MetricGraph g(flat, 0.41);
  const int c = g.vertex_at(8, 8);
  const auto small = lfpp::metric_ball(g, c, 1.5 * 0.25);
  CHECK(small.member_vertices.size() == 5);  // center plus 4 neighbors

  const auto tiny = lfpp::metric_ball(g, c, 0.25);
  CHECK(tiny.member_vertices.size() == 1);
  CHECK(tiny.member_vertices[0] == c);

  // Strictly-less membership: radius exactly two steps still excludes the
  // two-step shell.
  const auto open_ball = lfpp::metric_ball(g, c, 2.0 * 0.25);
  CHECK(open_ball.member_vertices.size() == 5);

  const GridField f = make_field(12, 0.25, 13);
  const MetricGraph rg(f, 0.6);
  const int rc = rg.vertex_at(6, 6);
  const auto ball = lfpp::metric_ball(rg, rc, 0.8);
  std::vector<bool> member(rg.vertex_count(), false);
  for (int v : ball.member_vertices) member[v] = true;
  for (int v = 0; v < rg.vertex_count(); ++v)
    CHECK(member[v] == (lfpp::distance(rg, rc, v) < 0.8));
  for (int v : ball.boundary_vertices) CHECK(member[v]);
}

TEST_CASE("internal distance: whole graph, rows, slit annuli, unreachable regions") {
  const GridField f = make_field(10, 0.3, 23);
  const MetricGraph g(f, 0.5);
  std::vector<int> all;
  for (int v = 0; v < g.vertex_count(); ++v) all.push_back(v);
  const int a = g.vertex_at(1, 1), b = g.vertex_at(8, 7);
  CHECK(lfpp::internal_distance(g, all, a, b) == lfpp::distance(g, a, b));

  std::vector<int> row;
  double along = 0.0;
  for (int j = 0; j < g.side(); ++j) row.push_back(g.vertex_at(4, j));
  for (int j = 0; j + 1 < g.side(); ++j)
    along += g.edge_weight(g.vertex_at(4, j), g.vertex_at(4, j + 1));
  CHECK(lfpp::internal_distance(g, row, g.vertex_at(4, 0), g.vertex_at(4, g.side() - 1)) ==
        doctest::Approx(along).epsilon(1e-13));

  std::vector<int> split = {g.vertex_at(0, 0), g.vertex_at(0, 1), g.vertex_at(5, 5)};
  CHECK(std::isinf(lfpp::internal_distance(g, split, g.vertex_at(0, 0), g.vertex_at(5, 5))));
  CHECK_THROWS_AS(lfpp::internal_distance(g, split, g.vertex_at(0, 0), g.vertex_at(9, 9)), Error);

  // Slit annulus on a 6x6 block: restriction can only lengthen paths.
  const GridField f6 = make_field(8, 1.0, 29);
  const MetricGraph g6(f6, 0.7);
  std::vector<int> annulus_slit;
  const Vec2 z = g6.position(g6.vertex_at(3, 3));
  for (int v = 0; v < g6.vertex_count(); ++v) {
    const double d = dist(g6.position(v), z);
    const Vec2 p = g6.position(v);
    const bool on_slit = p.y == z.y && p.x > z.x;  // radial slit removed
    if (d >= 1.0 && d <= 3.0 && !on_slit) annulus_slit.push_back(v);
  }
  const int sa = g6.vertex_at(2, 4), sb = g6.vertex_at(4, 4);
  REQUIRE(std::count(annulus_slit.begin(), annulus_slit.end(), sa) == 1);
  REQUIRE(std::count(annulus_slit.begin(), annulus_slit.end(), sb) == 1);
  const double internal = lfpp::internal_distance(g6, annulus_slit, sa, sb);
  CHECK(internal >= lfpp::distance(g6, sa, sb) - 1e-12);
  CHECK(internal == oracles::brute_shortest_path_in_region(g6, annulus_slit, sa, sb));
}

TEST_CASE("locality: the internal metric ignores field values outside the region") {
  const GridField f1 = make_field(12, 0.25, 41);
  GridField f2 = f1;
  Rng rng(42);
  std::vector<int> region;
  for (int i = 2; i <= 9; ++i)
    for (int j = 2; j <= 5; ++j) region.push_back(i * 12 + j);
  std::vector<bool> inside(144, false);
  for (int v : region) inside[v] = true;
  for (int v = 0; v < 144; ++v)
    if (!inside[v]) f2.values[v] = 10.0 * rng.gaussian();  // resample outside
  const MetricGraph g1(f1, 0.41), g2(f2, 0.41);
  const int a = region.front(), b = region.back();
  CHECK(lfpp::internal_distance(g1, region, a, b) == lfpp::internal_distance(g2, region, a, b));
}

TEST_CASE("scaling invariance: all lengths scale by e^{xi C}, geodesics unchanged") {
  const GridField f = make_field(24, 4.0 / 24, 57);
  const double xi = 0.41, c0 = 0.85;
  const MetricGraph a(f, xi);
  const MetricGraph b(shifted(f, c0), xi);
  const double factor = std::exp(xi * c0);
  const int va = a.vertex_at(3, 4), vb = a.vertex_at(19, 17);

  CHECK(lfpp::distance(b, va, vb) ==
        doctest::Approx(factor * lfpp::distance(a, va, vb)).epsilon(1e-12));
  const PlanarPath pa = lfpp::geodesic(a, va, vb);
  const PlanarPath pb = lfpp::geodesic(b, va, vb);
  REQUIRE(pa.vertices.size() == pb.vertices.size());
  for (std::size_t i = 0; i < pa.vertices.size(); ++i) CHECK(pa.vertices[i] == pb.vertices[i]);

  const Vec2 z{0.1, -0.05};
  CHECK(lfpp::annulus_separating_length(b, z, 0.5, 0.9) ==
        doctest::Approx(factor * lfpp::annulus_separating_length(a, z, 0.5, 0.9)).epsilon(1e-12));
  CHECK(lfpp::annulus_crossing_length(b, z, 0.5, 0.9) ==
        doctest::Approx(factor * lfpp::annulus_crossing_length(a, z, 0.5, 0.9)).epsilon(1e-12));
}

TEST_CASE("annulus lengths: flat-metric bounds") {
  const int n = 64;
  const double s = 4.0 / n;
  const GridField flat = make_field(n, s, 0);
  const MetricGraph g(flat, 0.41);
  const Vec2 z{0.0, 0.0};
  for (double r : {0.8, 1.2}) {
    const double r_in = r / 2.0, r_out = 7.0 * r / 8.0;
    const double l1 = lfpp::annulus_separating_length(g, z, r_in, r_out);
    CHECK(l1 <= 2.0 * std::numbers::pi * r_out + 8.0 * s);
    CHECK(l1 >= 2.0 * std::numbers::pi * r_in - 8.0 * s);
    const double l2 = lfpp::annulus_crossing_length(g, z, r_in, r_out);
    CHECK(std::abs(l2 - (r_out - r_in)) <= 4.0 * s);
  }
}

TEST_CASE("annulus separating length matches brute-force cycle enumeration") {
  for (std::uint64_t seed : {5ull, 6ull, 7ull}) {
    const GridField f = make_field(8, 1.0, seed, 0.4);
    const MetricGraph g(f, 0.8);
    const Vec2 z = g.position(g.vertex_at(4, 4));
    const double got = lfpp::annulus_separating_length(g, z, 2.0, 2.9);
    const double brute = oracles::brute_separating_cycle(g, z, 2.0, 2.9);
    CHECK(got == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("annulus crossing length matches the pairwise internal-distance oracle") {
  const GridField f = make_field(10, 1.0, 77, 0.5);
  const MetricGraph g(f, 0.6);
  const Vec2 z = g.position(g.vertex_at(5, 5));
  const double r_in = 2.0, r_out = 4.0;
  const double got = lfpp::annulus_crossing_length(g, z, r_in, r_out);

  std::vector<int> annulus, outer, inner;
  for (int v = 0; v < g.vertex_count(); ++v) {
    const double d = dist(g.position(v), z);
    if (d < r_in || d > r_out) continue;
    annulus.push_back(v);
    const int i = v / g.side(), j = v % g.side();
    bool has_outer = false, has_inner = false;
    const int nbr[4][2] = {{i, j - 1}, {i, j + 1}, {i - 1, j}, {i + 1, j}};
    for (auto& [ni, nj] : nbr) {
      if (ni < 0 || nj < 0 || ni >= g.side() || nj >= g.side()) continue;
      const double nd = dist(g.position(g.vertex_at(ni, nj)), z);
      has_outer = has_outer || nd > r_out;
      has_inner = has_inner || nd < r_in;
    }
    if (has_outer) outer.push_back(v);
    if (has_inner) inner.push_back(v);
  }
  double best = std::numeric_limits<double>::infinity();
  for (int a : outer)
    for (int b : inner) best = std::min(best, lfpp::internal_distance(g, annulus, a, b));
  CHECK(got == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("annulus ops reject bad geometry and unresolvable rings") {
  const GridField f = make_field(16, 0.25, 3);
  const MetricGraph g(f, 0.41);
  CHECK_THROWS_AS(lfpp::annulus_separating_length(g, {0, 0}, 0.1, 0.9), Error);  // r_in < 2s
  CHECK_THROWS_AS(lfpp::annulus_separating_length(g, {0, 0}, 0.9, 0.5), Error);
  CHECK_THROWS_AS(lfpp::annulus_separating_length(g, {1.8, 0}, 0.5, 0.9), Error);  // leaves grid
  bool resolution_seen = false;
  try {
    lfpp::annulus_separating_length(g, {0.01, 0.013}, 0.5, 0.52);
  } catch (const Error& e) {
    resolution_seen = e.code() == ErrorCode::resolution;
  }
  CHECK(resolution_seen);
}

TEST_CASE("ball and path csv exports are well formed") {
  const GridField f = make_field(12, 0.25, 3);
  const MetricGraph g(f, 0.41);
  const auto ball = lfpp::metric_ball(g, g.vertex_at(6, 6), 0.7);
  lfpp::export_ball_csv(g, ball, "test_ball.csv");
  const std::string csv = read_file("test_ball.csv");
  CHECK(csv.rfind("x,y,dist_to_center\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<long>(ball.member_vertices.size()) + 1);

  const PlanarPath p = lfpp::geodesic(g, g.vertex_at(1, 1), g.vertex_at(10, 10));
  export_path_csv(p, "test_path.csv");
  const PlanarPath q = load_path_csv("test_path.csv");
  REQUIRE(q.vertices.size() == p.vertices.size());
  for (std::size_t i = 0; i < p.vertices.size(); ++i) CHECK(q.vertices[i] == p.vertices[i]);
  std::remove("test_ball.csv");
  std::remove("test_path.csv");
}
