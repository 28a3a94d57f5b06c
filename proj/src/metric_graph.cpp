#include "lqglab/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <queue>

#include "lqglab/io_util.hpp"

namespace lqglab::lfpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using HeapEntry = std::pair<double, int>;
using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>>;

template <typename F>
void for_neighbors(int n, int v, F&& f) {
  const int j = v % n;
  if (j > 0) f(v - 1);
  if (j < n - 1) f(v + 1);
  if (v >= n) f(v - n);
  if (v < n * (n - 1)) f(v + n);
}

struct Workspace {
  std::vector<double> dist;
  std::vector<int> pred;
  MinHeap heap;

  void reset(int count) {
    dist.assign(count, kInf);
    pred.assign(count, -1);
    heap = MinHeap();
  }
};

// Label-setting search with deterministic tie-breaking: among equal-length
// shortest paths the predecessor with the smallest vertex index wins, so the
// predecessor tree does not depend on relaxation order.
void search(const MetricGraph& g, Workspace& ws, std::span<const int> sources, int target,
            double radius_bound) {
  const int n = g.side();
  ws.reset(g.vertex_count());
  for (int s : sources) {
    ws.dist[s] = 0.0;
    ws.heap.emplace(0.0, s);
  }
  while (!ws.heap.empty()) {
    const auto [d, u] = ws.heap.top();
    ws.heap.pop();
    if (d > ws.dist[u]) continue;  // stale entry
    if (d >= radius_bound) break;
    if (u == target) break;
    for_neighbors(n, u, [&](int v) {
      const double alt = d + g.edge_weight(u, v);
      if (alt < ws.dist[v]) {
        ws.dist[v] = alt;
        ws.pred[v] = u;
        ws.heap.emplace(alt, v);
      } else if (alt == ws.dist[v] && u < ws.pred[v]) {
        ws.pred[v] = u;
      }
    });
  }
}

}  // namespace

MetricGraph::MetricGraph(const GridField& field, double xi) {
  if (!(xi > 0.0)) fail(ErrorCode::invalid_parameter, "xi must be positive");
  field.validate_geometry();
  n_ = field.n;
  xi_ = xi;
  spacing_ = field.spacing;
  origin_ = field.origin;
  half_factor_.resize(field.values.size());
  const double half_spacing = 0.5 * spacing_;
  for (std::size_t v = 0; v < half_factor_.size(); ++v) {
    half_factor_[v] = half_spacing * std::exp(xi * field.values[v]);
    if (!std::isfinite(half_factor_[v]) || half_factor_[v] <= 0.0)
      fail(ErrorCode::numerical, "edge weight overflow at vertex " + std::to_string(v));
  }
}

int MetricGraph::nearest_vertex(Vec2 p) const {
  auto clamp_idx = [&](double f) {
    const int i = static_cast<int>(std::lround(f));
    return std::clamp(i, 0, n_ - 1);
  };
  const int j = clamp_idx((p.x - origin_.x) / spacing_);
  const int i = clamp_idx((p.y - origin_.y) / spacing_);
  return i * n_ + j;
}

double distance(const MetricGraph& graph, int a, int b) {
  if (a < 0 || b < 0 || a >= graph.vertex_count() || b >= graph.vertex_count())
    fail(ErrorCode::invalid_parameter, "vertex index out of range");
  if (a == b) return 0.0;
  Workspace ws;
  const int src[1] = {a};
  search(graph, ws, src, b, kInf);
  return ws.dist[b];
}

PlanarPath geodesic(const MetricGraph& graph, int a, int b) {
  if (a < 0 || b < 0 || a >= graph.vertex_count() || b >= graph.vertex_count())
    fail(ErrorCode::invalid_parameter, "vertex index out of range");
  if (a == b) fail(ErrorCode::degenerate_input, "geodesic endpoints coincide");
  Workspace ws;
  const int src[1] = {a};
  search(graph, ws, src, b, kInf);
  if (ws.dist[b] == kInf) fail(ErrorCode::numerical, "target unreachable");

  std::vector<int> chain;
  for (int v = b; v != -1; v = ws.pred[v]) chain.push_back(v);
  std::reverse(chain.begin(), chain.end());

  PlanarPath p;
  p.kind = PathKind::geodesic;
  p.vertices.reserve(chain.size());
  p.cumulative_length.reserve(chain.size());
  for (int v : chain) {
    p.vertices.push_back(graph.position(v));
    p.cumulative_length.push_back(ws.dist[v]);
  }
  p.validate();
  return p;
}

MetricBall metric_ball(const MetricGraph& graph, int center, double radius) {
  if (center < 0 || center >= graph.vertex_count())
    fail(ErrorCode::invalid_parameter, "vertex index out of range");
  if (!(radius > 0.0)) fail(ErrorCode::invalid_parameter, "ball radius must be positive");
  Workspace ws;
  const int src[1] = {center};
  search(graph, ws, src, -1, radius);

  MetricBall ball;
  ball.center = center;
  ball.radius = radius;
  std::vector<bool> member(graph.vertex_count(), false);
  for (int v = 0; v < graph.vertex_count(); ++v) {
    if (ws.dist[v] < radius) {
      member[v] = true;
      ball.member_vertices.push_back(v);
      ball.member_distance.push_back(ws.dist[v]);
    }
  }
  for (int v : ball.member_vertices) {
    bool edge = false;
    for_neighbors(graph.side(), v, [&](int w) { edge = edge || !member[w]; });
    if (edge) ball.boundary_vertices.push_back(v);
  }
  return ball;
}

double internal_distance(const MetricGraph& graph, std::span<const int> region, int a, int b) {
  std::vector<bool> in_region(graph.vertex_count(), false);
  for (int v : region) {
    if (v < 0 || v >= graph.vertex_count())
      fail(ErrorCode::invalid_parameter, "region vertex out of range");
    in_region[v] = true;
  }
  if (!in_region[a] || !in_region[b])
    fail(ErrorCode::invalid_parameter, "internal_distance endpoints must lie in the region");
  if (a == b) return 0.0;

  std::vector<double> dist(graph.vertex_count(), kInf);
  MinHeap heap;
  dist[a] = 0.0;
  heap.emplace(0.0, a);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (u == b) return d;
    for_neighbors(graph.side(), u, [&](int v) {
      if (!in_region[v]) return;
      const double alt = d + graph.edge_weight(u, v);
      if (alt < dist[v]) {
        dist[v] = alt;
        heap.emplace(alt, v);
      }
    });
  }
  return kInf;  // unreachable inside the region: explicit sentinel
}

namespace {

struct AnnulusGraph {
  std::vector<int> verts;          // global vertex ids
  std::vector<int> local;          // global -> local (-1 outside)
  // Flat adjacency: neighbor local index, weight, and whether the edge
  // crosses the cut ray.
  struct Arc {
    int to;
    double weight;
    bool flip;
  };
  std::vector<std::vector<Arc>> adj;
  std::vector<int> cut_upper;  // local ids of upper endpoints of cut edges
};

AnnulusGraph build_annulus(const MetricGraph& g, Vec2 z, double r_in, double r_out) {
  AnnulusGraph a;
  a.local.assign(g.vertex_count(), -1);
  const int n = g.side();
  for (int v = 0; v < g.vertex_count(); ++v) {
    const double d = dist(g.position(v), z);
    if (d >= r_in && d <= r_out) {
      a.local[v] = static_cast<int>(a.verts.size());
      a.verts.push_back(v);
    }
  }
  a.adj.resize(a.verts.size());
  for (std::size_t lv = 0; lv < a.verts.size(); ++lv) {
    const int v = a.verts[lv];
    for_neighbors(n, v, [&](int w) {
      const int lw = a.local[w];
      if (lw < 0) return;
      // The cut runs along {y = z.y + 0+, x > z.x}: only vertical edges with
      // the lower endpoint at or below the ray row can cross it.
      bool flip = false;
      if (w == v + n || w == v - n) {
        const Vec2 pv = g.position(v), pw = g.position(w);
        const double ylo = std::min(pv.y, pw.y), yhi = std::max(pv.y, pw.y);
        if (ylo <= z.y && z.y < yhi && pv.x > z.x) flip = true;
      }
      a.adj[lv].push_back({lw, g.edge_weight(v, w), flip});
      if (flip && g.position(w).y > g.position(v).y) a.cut_upper.push_back(lw);
    });
  }
  std::sort(a.cut_upper.begin(), a.cut_upper.end());
  a.cut_upper.erase(std::unique(a.cut_upper.begin(), a.cut_upper.end()), a.cut_upper.end());
  return a;
}

void validate_annulus_params(const MetricGraph& g, Vec2 z, double r_in, double r_out) {
  if (!(2.0 * g.spacing() <= r_in) || !(r_in < r_out))
    fail(ErrorCode::invalid_parameter, "need 2*spacing <= r_in < r_out");
  const Vec2 lo = g.position(0);
  const Vec2 hi = g.position(g.vertex_count() - 1);
  if (z.x - r_out < lo.x || z.y - r_out < lo.y || z.x + r_out > hi.x || z.y + r_out > hi.y)
    fail(ErrorCode::out_of_domain, "annulus leaves the grid");
}

}  // namespace

double annulus_separating_length(const MetricGraph& graph, Vec2 z, double r_in, double r_out) {
  validate_annulus_params(graph, z, r_in, r_out);
  const AnnulusGraph a = build_annulus(graph, z, r_in, r_out);
  if (a.cut_upper.empty())
    fail(ErrorCode::resolution, "annulus too thin to contain a separating lattice cycle");

  // Duplicate the annulus into two sheets glued along the cut; a shortest
  // sheet-changing loop at a cut vertex is a shortest cycle with odd winding
  // around z, i.e. a minimal separating cycle.
  const int m = static_cast<int>(a.verts.size());
  double best = kInf;
  std::vector<double> dist(2 * m);
  MinHeap heap;
  for (int root : a.cut_upper) {
    std::fill(dist.begin(), dist.end(), kInf);
    heap = MinHeap();
    const int src = 2 * root;
    const int dst = 2 * root + 1;
    dist[src] = 0.0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[u]) continue;
      if (d >= best) break;
      if (u == dst) break;
      const int lu = u >> 1;
      const int layer = u & 1;
      for (const auto& arc : a.adj[lu]) {
        const int v = 2 * arc.to + (arc.flip ? 1 - layer : layer);
        const double alt = d + arc.weight;
        if (alt < dist[v]) {
          dist[v] = alt;
          heap.emplace(alt, v);
        }
      }
    }
    best = std::min(best, dist[dst]);
  }
  if (best == kInf)
    fail(ErrorCode::resolution, "annulus too thin to contain a separating lattice cycle");
  return best;
}

double annulus_crossing_length(const MetricGraph& graph, Vec2 z, double r_in, double r_out) {
  validate_annulus_params(graph, z, r_in, r_out);
  const AnnulusGraph a = build_annulus(graph, z, r_in, r_out);
  const int n = graph.side();

  std::vector<int> sources;
  std::vector<bool> sink(a.verts.size(), false);
  bool have_sink = false;
  for (std::size_t lv = 0; lv < a.verts.size(); ++lv) {
    const int v = a.verts[lv];
    bool outer = false, inner = false;
    for_neighbors(n, v, [&](int w) {
      const double d = dist(graph.position(w), z);
      if (d > r_out) outer = true;
      if (d < r_in) inner = true;
    });
    if (outer) sources.push_back(static_cast<int>(lv));
    if (inner) {
      sink[lv] = true;
      have_sink = true;
    }
  }
  if (sources.empty() || !have_sink)
    fail(ErrorCode::resolution, "annulus too thin to carry a crossing");

  std::vector<double> dist(a.verts.size(), kInf);
  MinHeap heap;
  for (int s : sources) {
    dist[s] = 0.0;
    heap.emplace(0.0, s);
    if (sink[s]) return 0.0;
  }
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (sink[u]) return d;
    for (const auto& arc : a.adj[u]) {
      const double alt = d + arc.weight;
      if (alt < dist[arc.to]) {
        dist[arc.to] = alt;
        heap.emplace(alt, arc.to);
      }
    }
  }
  fail(ErrorCode::resolution, "annulus rings are disconnected at this resolution");
}

std::vector<PlanarPath> geodesic_fan(const MetricGraph& graph, const MetricBall& ball) {
  Workspace ws;
  const int src[1] = {ball.center};
  search(graph, ws, src, -1, ball.radius);
  std::vector<PlanarPath> fan;
  fan.reserve(ball.boundary_vertices.size());
  for (int b : ball.boundary_vertices) {
    if (b == ball.center) continue;
    std::vector<int> chain;
    for (int v = b; v != -1; v = ws.pred[v]) chain.push_back(v);
    PlanarPath p;
    p.kind = PathKind::geodesic;
    for (int v : chain) {
      p.vertices.push_back(graph.position(v));
      p.cumulative_length.push_back(ws.dist[b] - ws.dist[v]);
    }
    p.validate();
    fan.push_back(std::move(p));
  }
  return fan;
}

void export_ball_csv(const MetricGraph& graph, const MetricBall& ball, const std::string& file) {
  FileWriter out(file);
  std::string header = "x,y,dist_to_center\n";
  out.write_bytes(header.data(), header.size());
  char buf[128];
  for (std::size_t k = 0; k < ball.member_vertices.size(); ++k) {
    const Vec2 p = graph.position(ball.member_vertices[k]);
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.x, p.y, ball.member_distance[k]);
    out.write_bytes(buf, std::strlen(buf));
  }
}

}  // namespace lqglab::lfpp
