#pragma once

#include <string>
#include <vector>

#include "lqglab/common.hpp"

namespace lqglab {

enum class PathKind { geodesic, sle_trace, synthetic };

/// An ordered polyline in the plane with a nondecreasing arc-length index:
/// graph length for geodesics, Euclidean arc length for SLE traces.
struct PlanarPath {
  std::vector<Vec2> vertices;
  std::vector<double> cumulative_length;
  PathKind kind = PathKind::synthetic;

  std::size_t size() const { return vertices.size(); }
  double length() const { return cumulative_length.empty() ? 0.0 : cumulative_length.back(); }

  Rect bounding_box() const;
  double diameter() const;

  void validate() const;
};

/// Builds a synthetic path from points, indexing by Euclidean arc length.
PlanarPath make_path(std::vector<Vec2> points, PathKind kind = PathKind::synthetic);

/// Reverses the vertex order (arc-length index recomputed from segments).
PlanarPath reverse_path(const PlanarPath& path);

/// CSV export with columns (index, x, y, cumulative_length).
void export_path_csv(const PlanarPath& path, const std::string& file);
PlanarPath load_path_csv(const std::string& file);

}  // namespace lqglab
