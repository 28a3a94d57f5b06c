#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lqglab/metric_graph.hpp"
#include "lqglab/planar_path.hpp"

namespace lqglab::crossings {

struct Annulus {
  Vec2 center{};
  double r_in = 0.0;
  double r_out = 0.0;
};

/// Number of maximal subpaths connecting the inner circle to the outer circle
/// while remaining in the closed annulus; each inner<->outer transit counts.
/// Tangential grazes do not count.  pre: segments meeting the closed disk of
/// radius r_out are shorter than r_in/4 (resolution guard).
int count_crossings(const PlanarPath& path, const Annulus& annulus);

struct CrossingReport {
  std::vector<std::pair<Vec2, int>> per_center;
  int max_count = 0;
  double epsilon = 0.0;
  double alpha = 0.0;
  PathKind path_kind = PathKind::synthetic;
  /// Centers whose annuli tripped the resolution guard; excluded from
  /// per_center and max_count but reported so a caller can tighten dt.
  std::vector<Vec2> skipped_centers;
};

/// Evaluates count_crossings for annuli B(z, eps) \ B(z, eps^alpha) with z on
/// a center_spacing grid over `region`.
/// pre: alpha > 1, eps in (0,1), eps^alpha > 4 * (median path vertex spacing).
CrossingReport max_crossings_over_grid(const PlanarPath& path, double epsilon, double alpha,
                                       const Rect& region, double center_spacing);

/// Per-epsilon aggregate of a Monte Carlo crossing experiment.
struct CrossingExperimentSummary {
  double epsilon = 0.0;
  double alpha = 0.0;
  int num_paths = 0;
  std::vector<int> max_counts;  // per path
  int num_exceeding_four = 0;
  double frequency = 0.0;       // of {max_count > 4}
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
};

/// Samples `num_pairs` far-apart vertex pairs, computes their geodesics, and
/// scans each per epsilon.  Deterministic given the seed.
std::vector<CrossingExperimentSummary> geodesic_crossing_experiment(
    const lfpp::MetricGraph& graph, int num_pairs, const std::vector<double>& epsilon_list,
    double alpha, std::uint64_t seed);

struct ScaleScan {
  Vec2 center{};
  double base_radius = 0.0;
  int K = 0;
  double c = 0.0;
  struct Entry {
    int k = 0;
    double l1 = 0.0;  // separating length in (r_k/2, 7 r_k/8)
    double l2 = 0.0;  // crossing length across the same annulus
    double s1 = 0.0;  // separating length in (3 r_k/4, 7 r_k/8)
    double s2 = 0.0;  // crossing length from 5 r_k/8 down to r_k/2
  };
  std::vector<Entry> per_scale;
  int count_l1_le_c_l2 = 0;  // N(K, c)
  int count_s1_lt_s2 = 0;
};

/// Annulus length statistics at the dyadic scales r_k = 2^-k * base_radius.
/// pre: r_K >= 8 * spacing; errors name the largest feasible K.
ScaleScan scale_scan(const lfpp::MetricGraph& graph, Vec2 z, double base_radius, int K, double c);

/// exp(n ((1-r) ln((1-p)/(1-r)) + r ln(p/r))): the binomial upper-tail bound
/// P[X >= r n] for X ~ Bin(n, p), r in [p, 1].
double binomial_tail_bound(double p, double r, int n);

/// Wilson score interval for a binomial proportion at z = 1.96.
std::pair<double, double> wilson_interval(int successes, int trials);

void export_crossing_report_csv(const CrossingReport& report, const std::string& file);
void export_scale_scan_csv(const ScaleScan& scan, const std::string& file);

}  // namespace lqglab::crossings
