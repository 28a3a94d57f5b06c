#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "lqglab/analysis.hpp"
#include "lqglab/metric_graph.hpp"
#include "lqglab/rng.hpp"
#include "oracles.hpp"

using namespace lqglab;
using namespace lqglab::analysis;
using grf::GridField;
using lfpp::MetricGraph;

namespace {

PlanarPath unit_segment(int vertices) {
  std::vector<Vec2> pts;
  for (int i = 0; i < vertices; ++i)
    pts.push_back({static_cast<double>(i) / (vertices - 1), 0.0});
  return make_path(std::move(pts));
}

PlanarPath random_walk(int steps, double step_len, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec2> pts = {{0.0, 0.0}};
  for (int i = 0; i < steps; ++i) {
    const double a = 2.0 * std::numbers::pi * rng.uniform();
    pts.push_back({pts.back().x + step_len * std::cos(a), pts.back().y + step_len * std::sin(a)});
  }
  return make_path(std::move(pts));
}

GridField sample_like_field(int n, double spacing, std::uint64_t seed, double scale) {
  GridField f;
  f.n = n;
  f.spacing = spacing;
  f.origin = {-(n / 2) * spacing, -(n / 2) * spacing};
  f.boundary = grf::BoundaryKind::torus_whole_plane;
  f.normalization_note = "test";
  f.values.assign(static_cast<std::size_t>(n) * n, 0.0);
  Rng rng(seed);
  for (double& v : f.values) v = scale * rng.gaussian();
  return f;
}

}  // namespace

TEST_CASE("holder modulus: straight segments score 1, the L-shape scores 2^(1/4)") {
  CHECK(holder_modulus(unit_segment(101), 0.5) == doctest::Approx(1.0).epsilon(1e-12));

  const PlanarPath ell = make_path({{0.0, 1.0}, {0.0, 0.0}, {1.0, 0.0}});
  CHECK(holder_modulus(ell, 0.5) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-12));

  CHECK_THROWS_AS(holder_modulus(make_path({{0, 0}, {1, 0}}), 0.5), Error);
  CHECK_THROWS_AS(holder_modulus(ell, 0.0), Error);
  CHECK_THROWS_AS(holder_modulus(ell, 1.0), Error);
}

TEST_CASE("holder modulus: for sub-unit chords the value cannot drop as delta shrinks") {
  // With every chord below 1, |chord|^(1-delta) shrinks as delta shrinks, so
  // the modulus is nonincreasing in delta.
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    PlanarPath p = random_walk(60, 0.005, seed);  // diameter well below 1
    const double v02 = holder_modulus(p, 0.2);
    const double v05 = holder_modulus(p, 0.5);
    const double v08 = holder_modulus(p, 0.8);
    CHECK(v02 >= v05);
    CHECK(v05 >= v08);
  }
}

TEST_CASE("holder modulus: the endpoint pair keeps the diameter admissible") {
  for (std::uint64_t seed : {4ull, 5ull}) {
    const PlanarPath p = random_walk(80, 0.01, seed);
    const double delta = 0.3;
    double max_chord = 0.0;
    for (std::size_t i = 0; i < p.vertices.size(); ++i)
      for (std::size_t j = i + 1; j < p.vertices.size(); ++j)
        max_chord = std::max(max_chord, dist(p.vertices[i], p.vertices[j]));
    CHECK(holder_modulus(p, delta) * std::pow(max_chord, 1.0 - delta) >= p.diameter() - 1e-12);
  }
}

TEST_CASE("box counting: frozen straight segment counts 4/8/16 with unit slope") {
  std::vector<Vec2> pts;
  for (int i = 0; i <= 200; ++i) pts.push_back({0.001 + 0.998 * i / 200.0, 0.013});
  const auto r = box_counting_dimension(make_path(std::move(pts)), {0.25, 0.125, 0.0625});
  REQUIRE(r.counts.size() == 3);
  CHECK(r.counts[0] >= 4);
  CHECK(r.counts[0] <= 6);
  CHECK(r.counts[1] >= 8);
  CHECK(r.counts[1] <= 10);
  CHECK(r.counts[2] >= 16);
  CHECK(r.counts[2] <= 18);
  CHECK(r.slope > 0.9);
  CHECK(r.slope < 1.1);
}

TEST_CASE("box counting: boustrophedon sweeps fill the square at slope about 2") {
  const int rows = 128;
  const double h = 1.0 / rows;
  std::vector<Vec2> pts;
  for (int r = 0; r <= rows; ++r) {
    const double y = r * h + h / 3.0;
    if (y > 1.0) break;
    if (r % 2 == 0)
      for (int c = 0; c <= rows; ++c) pts.push_back({c * h, y});
    else
      for (int c = rows; c >= 0; --c) pts.push_back({c * h, y});
  }
  const auto r = box_counting_dimension(make_path(std::move(pts)), {0.25, 0.125, 0.0625, 0.03125});
  CHECK(r.slope > 1.8);
  CHECK(r.slope <= 2.0 + 1e-9);
}

TEST_CASE("box counting: scale validation and the sanity envelope") {
  const PlanarPath p = random_walk(2000, 0.004, 9);
  CHECK_THROWS_AS(box_counting_dimension(p, {0.25, 0.26}), Error);
  CHECK_THROWS_AS(box_counting_dimension(p, {0.25, 0.005}), Error);
  const auto r = box_counting_dimension(p, {0.125, 0.0625, 0.03125, 0.015625});
  CHECK(r.slope > 0.9);
  CHECK(r.slope < 2.1);
}

TEST_CASE("whitney decomposition: point obstacle yields the dyadic ring pattern") {
  // A point-like obstacle at the box center.  Its infinitesimal rightward
  // extent breaks the exact distance ties on the right, so each depth
  // refines a 6-cell core (4 corner cells plus the 2 right neighbors) and
  // emits the ring around it: 16 - 6 = 10 cells at depth 2, then
  // 24 - 6 = 18 at every deeper level, with the 6-cell core surrendered at
  // max depth.  Ring sizes stabilize, i.e. cube sides grow dyadically away
  // from the obstacle.
  const PlanarPath point = make_path({{0.5, 0.5}, {0.5 + 1e-9, 0.5}});
  const int max_depth = 6;
  const auto dec = whitney_decomposition(point, {0.0, 0.0, 1.0, 1.0}, max_depth);
  std::map<int, int> per_depth;
  for (const auto& c : dec.cubes) per_depth[c.depth]++;
  CHECK(per_depth.count(0) == 0);
  CHECK(per_depth.count(1) == 0);
  CHECK(per_depth[2] == 10);
  for (int d = 3; d <= max_depth; ++d) CHECK(per_depth[d] == 18);
  CHECK(dec.shortfall.size() == 6);

  for (const auto& c : dec.cubes) {
    CHECK(c.dist_to_path >= c.side / 8.0);
    CHECK(c.dist_to_path <= 8.0 * c.side);
  }
}

TEST_CASE("whitney decomposition: disjoint interiors covering the box") {
  const PlanarPath path = random_walk(40, 0.02, 13);
  const Rect box{-0.6, -0.6, 0.6, 0.6};
  const int max_depth = 6;
  const auto dec = whitney_decomposition(path, box, max_depth);

  const int fine = 1 << max_depth;
  std::vector<int> occupancy(static_cast<std::size_t>(fine) * fine, 0);
  auto mark = [&](const WhitneyCube& c) {
    const double cell = box.width() / fine;
    const int x0 = static_cast<int>(std::lround((c.corner.x - box.x0) / cell));
    const int y0 = static_cast<int>(std::lround((c.corner.y - box.y0) / cell));
    const int w = static_cast<int>(std::lround(c.side / cell));
    for (int y = y0; y < y0 + w; ++y)
      for (int x = x0; x < x0 + w; ++x) occupancy[static_cast<std::size_t>(y) * fine + x]++;
  };
  for (const auto& c : dec.cubes) mark(c);
  for (const auto& c : dec.shortfall) mark(c);
  for (int v : occupancy) CHECK(v == 1);  // tiling: no gaps, no overlaps

  for (const auto& c : dec.cubes) {
    CHECK(c.dist_to_path >= c.side / 8.0);
    CHECK(c.dist_to_path <= 8.0 * c.side);
  }
  CHECK_THROWS_AS(whitney_decomposition(path, {0.0, 0.0, 0.1, 0.1}, 4), Error);
}

TEST_CASE("whitney cube counts grow like the box-counting dimension") {
  const GridField f = sample_like_field(256, 4.0 / 256, 33, 1.0);
  const MetricGraph g(f, 0.41);
  const PlanarPath geo = lfpp::geodesic(g, g.vertex_at(40, 32), g.vertex_at(208, 220));

  const Rect bb = geo.bounding_box();
  const double side = std::max(bb.x1 - bb.x0, bb.y1 - bb.y0) * 1.5;
  const Vec2 mid{0.5 * (bb.x0 + bb.x1), 0.5 * (bb.y0 + bb.y1)};
  const Rect box{mid.x - side / 2, mid.y - side / 2, mid.x + side / 2, mid.y + side / 2};
  const auto dec = whitney_decomposition(geo, box, 7);
  std::map<int, double> count;
  for (const auto& c : dec.cubes) count[c.depth] += 1.0;
  // Growth exponent over the three finest fully-populated depths.
  const double g1 = std::log2(count[6] / count[5]);
  const double g2 = std::log2(count[7] / count[6]);
  const double growth = 0.5 * (g1 + g2);

  const auto boxes = box_counting_dimension(geo, {0.5, 0.25, 0.125, 0.0625});
  CHECK(std::abs(growth - boxes.slope) <= 0.3);
}

TEST_CASE("shadow estimates: distant cubes see at most the path diameter") {
  const PlanarPath seg = unit_segment(64);
  const WhitneyCube cube{{30.0, 30.0}, 0.5, 3, 0.0};
  const auto sum = shadow_sum_estimate(seg, {cube}, 24, 5);
  REQUIRE(sum.per_cube.size() == 1);
  CHECK(sum.per_cube[0].hit_points.size() == 24);
  CHECK(sum.per_cube[0].diameter <= seg.diameter() + 1e-12);
  for (const Vec2& h : sum.per_cube[0].hit_points) {
    CHECK(h.x >= -1e-6);
    CHECK(h.x <= 1.0 + 1e-6);
    CHECK(std::abs(h.y) <= 1e-3);
  }
  CHECK(sum.proxy);
}

TEST_CASE("shadow estimates: more walkers never shrink a hit-set diameter") {
  const PlanarPath path = random_walk(50, 0.02, 21);
  const Rect bb = path.bounding_box();
  const WhitneyCube cube{{bb.x1 + 0.3, bb.y0}, 0.25, 4, 0.0};
  const auto small = shadow_sum_estimate(path, {cube}, 16, 77);
  const auto big = shadow_sum_estimate(path, {cube}, 32, 77);
  CHECK(big.per_cube[0].diameter >= small.per_cube[0].diameter);
  // The first 16 walkers are the same substreams.
  for (int w = 0; w < 16; ++w) {
    CHECK(big.per_cube[0].hit_points[w].x == small.per_cube[0].hit_points[w].x);
    CHECK(big.per_cube[0].hit_points[w].y == small.per_cube[0].hit_points[w].y);
  }
}

TEST_CASE("shadow estimates are deterministic and translation equivariant") {
  const PlanarPath path = random_walk(60, 0.015, 31);
  const Rect bb = path.bounding_box();
  const std::vector<WhitneyCube> cubes = {{{bb.x1 + 0.2, bb.y0 + 0.05}, 0.125, 4, 0.0},
                                          {{bb.x0 - 0.3, bb.y1 + 0.1}, 0.25, 3, 0.0}};
  const auto a = shadow_sum_estimate(path, cubes, 16, 99);
  const auto b = shadow_sum_estimate(path, cubes, 16, 99);
  CHECK(a.total == b.total);

  const Vec2 shift{0.5, 0.25};
  std::vector<Vec2> moved_pts;
  for (const Vec2& v : path.vertices) moved_pts.push_back(v + shift);
  const PlanarPath moved = make_path(std::move(moved_pts));
  std::vector<WhitneyCube> moved_cubes = cubes;
  for (auto& c : moved_cubes) c.corner = c.corner + shift;
  const auto t = shadow_sum_estimate(moved, moved_cubes, 16, 99);
  for (std::size_t i = 0; i < cubes.size(); ++i)
    CHECK(std::abs(t.per_cube[i].diameter - a.per_cube[i].diameter) <= 1e-12);
}

TEST_CASE("shadow walkers report divergence against the step budget") {
  const PlanarPath seg = unit_segment(16);
  const WhitneyCube cube{{40.0, 40.0}, 0.5, 3, 0.0};
  bool divergent = false;
  try {
    shadow_sum_estimate(seg, {cube}, 16, 1, 3);
  } catch (const Error& e) {
    divergent = e.code() == ErrorCode::divergent_walker;
  }
  CHECK(divergent);
}

TEST_CASE("per-depth shadow totals group and sum correctly") {
  const PlanarPath path = random_walk(40, 0.02, 41);
  const Rect bb = path.bounding_box();
  const std::vector<WhitneyCube> cubes = {{{bb.x1 + 0.2, bb.y0}, 0.25, 3, 0.0},
                                          {{bb.x1 + 0.5, bb.y0}, 0.25, 3, 0.0},
                                          {{bb.x0 - 0.4, bb.y0}, 0.125, 4, 0.0}};
  const auto sum = shadow_sum_estimate(path, cubes, 16, 7);
  const auto totals = shadow_totals_by_depth(sum);
  REQUIRE(totals.size() == 2);
  CHECK(totals[0].depth == 3);
  CHECK(totals[0].cube_count == 2);
  CHECK(totals[1].depth == 4);
  CHECK(totals[1].cube_count == 1);
  double grand = 0.0;
  for (const auto& t : totals) grand += t.sum_diam_sq;
  CHECK(grand == doctest::Approx(sum.total).epsilon(1e-12));
}
