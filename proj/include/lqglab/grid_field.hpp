#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lqglab/common.hpp"

namespace lqglab::grf {

enum class BoundaryKind { torus_whole_plane, zero_boundary };

/// A real-valued field sampled on a square lattice.
///
/// values[i*n + j] is the height at row i (y index) and column j (x index);
/// the plane position of (i, j) is origin + spacing * (j, i).  Samplers place
/// the lattice so that vertex (n/2, n/2) sits at the plane origin.
struct GridField {
  int n = 0;
  double spacing = 0.0;
  Vec2 origin{};
  BoundaryKind boundary = BoundaryKind::zero_boundary;
  std::string normalization_note;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * n + j]; }
  Vec2 position(int i, int j) const { return {origin.x + j * spacing, origin.y + i * spacing}; }
  int center_index() const { return n / 2; }
  Vec2 center() const { return position(center_index(), center_index()); }
  /// One-past the largest coordinate of any lattice vertex.
  Rect extent() const {
    return {origin.x, origin.y, origin.x + (n - 1) * spacing, origin.y + (n - 1) * spacing};
  }

  /// Checks the declared type invariants; throws on violation.
  void validate() const;

  /// Geometry-only subset (square side >= 8, finite entries, positive
  /// spacing) for consumers that accept raw lattice functions, e.g. harmonic
  /// parts or hand-built fields that carry no sampler convention.
  void validate_geometry() const;
};

/// Bilinear interpolation of the field at an arbitrary plane point.
/// Throws out_of_domain if the point is outside the lattice hull.
double interpolate(const GridField& field, Vec2 p);

/// Trapezoidal average of the bilinearly interpolated field over the circle
/// of the given radius; ceil(2*pi*radius/spacing) equispaced points.
/// pre: radius >= 2*spacing and the circle lies inside the grid.
double circle_average(const GridField& field, Vec2 center, double radius);

/// Same quadrature without the 2*spacing floor on radius.  Used internally
/// where the regularization scale is the lattice spacing itself.
double circle_average_unchecked(const GridField& field, Vec2 center, double radius);

/// Discrete LQG area measure of an axis-aligned rectangle:
///   sum over lattice vertices z in region of s^2 * s^(gamma^2/2) * e^(gamma h_s(z))
/// where h_s(z) is the circle average at radius = spacing.  Vertices are
/// counted with the half-open convention [x0,x1) x [y0,y1) so that adjacent
/// rectangles tile without double counting.
/// pre: 0 < gamma < 2; every counted vertex has its radius-s circle in grid.
double lqg_measure(const GridField& field, double gamma, const Rect& region);

/// Binary export: 16-byte header (magic "GRF1", u32 grid size little-endian,
/// f64 spacing) followed by row-major f64 values.
void save_field(const GridField& field, const std::string& path);
GridField load_field(const std::string& path);

/// CSV export, one line per lattice row.
void export_field_csv(const GridField& field, const std::string& path);

}  // namespace lqglab::grf
