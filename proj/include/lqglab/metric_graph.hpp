#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lqglab/grid_field.hpp"
#include "lqglab/planar_path.hpp"

namespace lqglab::lfpp {

using grf::GridField;

/// Liouville first-passage percolation over the 4-neighbor lattice of a
/// GridField: weight(u, v) = spacing * (e^{xi h(u)} + e^{xi h(v)}) / 2.
///
/// Vertices are indexed row-major (v = i * n + j).  The graph is immutable
/// after construction; searches allocate private workspaces and may run
/// concurrently over the same graph.
class MetricGraph {
 public:
  MetricGraph(const GridField& field, double xi);

  int side() const { return n_; }
  int vertex_count() const { return n_ * n_; }
  double xi() const { return xi_; }
  double spacing() const { return spacing_; }

  int vertex_at(int i, int j) const { return i * n_ + j; }
  Vec2 position(int v) const {
    return {origin_.x + (v % n_) * spacing_, origin_.y + (v / n_) * spacing_};
  }
  /// Nearest lattice vertex to a plane point (clamped to the grid).
  int nearest_vertex(Vec2 p) const;

  /// Exact edge weight between adjacent vertices.
  double edge_weight(int u, int v) const { return half_factor_[u] + half_factor_[v]; }

  std::span<const double> half_factors() const { return half_factor_; }

 private:
  int n_;
  double xi_;
  double spacing_;
  Vec2 origin_;
  // (spacing/2) * e^{xi h(v)} per vertex; an edge weighs the endpoint sum.
  std::vector<double> half_factor_;
};

/// Exact shortest-path distance; distance(a, a) = 0.
double distance(const MetricGraph& graph, int a, int b);

/// The shortest path from a to b as a PlanarPath whose arc-length index
/// tracks partial sums of edge weights.  Ties are broken by smallest
/// predecessor vertex index, which makes the result independent of the
/// relaxation order.
PlanarPath geodesic(const MetricGraph& graph, int a, int b);

struct MetricBall {
  int center = 0;
  double radius = 0.0;
  std::vector<int> member_vertices;    // graph distance < radius (open ball)
  std::vector<int> boundary_vertices;  // members with a non-member neighbor
  std::vector<double> member_distance;  // aligned with member_vertices
};

/// Open metric ball via a single-source search truncated at the radius.
MetricBall metric_ball(const MetricGraph& graph, int center, double radius);

/// Shortest-path distance using only edges with both endpoints in `region`.
/// Returns +infinity when b is unreachable inside the region (an explicit
/// result, not an error).
double internal_distance(const MetricGraph& graph, std::span<const int> region, int a, int b);

/// Infimum of graph lengths of cycles contained in the closed Euclidean
/// annulus {w : r_in <= |w - z| <= r_out} that separate z from infinity.
/// Computed by cutting the annulus along the rightward ray from z and
/// searching shortest layer-changing paths in the resulting duplicated
/// (two-sheet) annulus graph.
double annulus_separating_length(const MetricGraph& graph, Vec2 z, double r_in, double r_out);

/// Graph distance from the outer boundary ring to the inner boundary ring of
/// the closed annulus, restricted to the annulus.
double annulus_crossing_length(const MetricGraph& graph, Vec2 z, double r_in, double r_out);

/// All geodesics from the ball's boundary vertices to its center, read off
/// the ball search's predecessor tree (the Figure-1 style fan).
std::vector<PlanarPath> geodesic_fan(const MetricGraph& graph, const MetricBall& ball);

/// CSV export with columns (x, y, dist_to_center).
void export_ball_csv(const MetricGraph& graph, const MetricBall& ball, const std::string& file);

}  // namespace lqglab::lfpp
