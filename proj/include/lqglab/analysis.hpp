#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lqglab/planar_path.hpp"

namespace lqglab::analysis {

/// max over vertex pairs s < t of diam(path[s..t]) / |path(t) - path(s)|^(1-delta),
/// pairs with coinciding endpoints skipped.  O(n^2) via an interval recursion
/// for the running diameters.  pre: delta in (0,1), at least 3 vertices.
double holder_modulus(const PlanarPath& path, double delta);

struct BoxCountResult {
  std::vector<double> scales;
  std::vector<long long> counts;  // grid cells of each mesh meeting the path
  double slope = 0.0;             // OLS of log N vs log(1/scale), 4 finest scales
};

/// pre: scale_list decreasing, smallest scale > 2 * max vertex spacing.
BoxCountResult box_counting_dimension(const PlanarPath& path, const std::vector<double>& scales);

struct WhitneyCube {
  Vec2 corner{};     // lower-left
  double side = 0.0;  // box_side * 2^-depth
  int depth = 0;
  double dist_to_path = 0.0;
};

struct WhitneyDecomposition {
  Rect box{};
  std::vector<WhitneyCube> cubes;
  /// Max-depth cells still closer to the path than their side (the reported
  /// refinement shortfall).
  std::vector<WhitneyCube> shortfall;
};

/// Quadtree refinement of bounding_box: a cell is emitted once
/// dist(cell, path) >= side (which construction keeps below (2 + 2 sqrt(2)) * side,
/// inside the factor-8 Whitney envelope), refined while closer, and surrendered
/// to `shortfall` at max_depth.  pre: path strictly inside the box.
WhitneyDecomposition whitney_decomposition(const PlanarPath& path, const Rect& bounding_box,
                                           int max_depth);

struct ShadowEstimate {
  WhitneyCube cube{};
  std::vector<Vec2> hit_points;
  double diameter = 0.0;
  /// Robust companion scale: twice the 75th-percentile distance of the hit
  /// points from their coordinate-wise median.  Planar harmonic measure has
  /// Cauchy tails, so the max-pairwise diameter above is dominated by rare
  /// faraway hits; the trimmed core tracks the concentration scale of the
  /// hit set instead.
  double core_diameter = 0.0;
};

struct ShadowSum {
  std::vector<ShadowEstimate> per_cube;
  double total = 0.0;  // sum of squared hit-set diameters
  /// Harmonic-measure proxy: hit sets are first-hit locations of random
  /// walkers, not the conformal shadow itself; totals estimate the same
  /// finiteness behavior, not the exact sum.
  bool proxy = true;
};

/// Walk-on-spheres from each cube center until within 1e-4 * side of the
/// path; per-cube contribution is the squared diameter of the hit set.
/// Deterministic given the seed (per-cube, per-walker substreams).
/// `max_steps` is the divergence guard (default 1e6 per the contract).
ShadowSum shadow_sum_estimate(const PlanarPath& path, const std::vector<WhitneyCube>& cubes,
                              int walkers_per_cube, std::uint64_t seed,
                              long long max_steps = 1000000);

/// Per-depth totals of a shadow sum: (depth, cube count, sum of diam^2,
/// sum of core diam^2).
struct DepthTotal {
  int depth = 0;
  long long cube_count = 0;
  double sum_diam_sq = 0.0;
  double sum_core_sq = 0.0;
};
std::vector<DepthTotal> shadow_totals_by_depth(const ShadowSum& sum);

void export_box_counts_csv(const BoxCountResult& r, const std::string& file);
void export_depth_totals_csv(const std::vector<DepthTotal>& totals, const std::string& file);

}  // namespace lqglab::analysis
