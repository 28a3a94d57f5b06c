#include "lqglab/crossings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

#include "lqglab/io_util.hpp"
#include "lqglab/rng.hpp"

namespace lqglab::crossings {

namespace {

constexpr int kRegionHole = 0;
constexpr int kRegionAnnulus = 1;
constexpr int kRegionBeyond = 2;

int classify(Vec2 p, const Annulus& a) {
  const double d = dist(p, a.center);
  if (d < a.r_in) return kRegionHole;
  if (d > a.r_out) return kRegionBeyond;
  return kRegionAnnulus;
}

double point_segment_distance(Vec2 z, Vec2 p, Vec2 q) {
  const Vec2 d = q - p;
  const double dd = d.norm2();
  double t = dd > 0.0 ? ((z - p).x * d.x + (z - p).y * d.y) / dd : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return dist(z, {p.x + t * d.x, p.y + t * d.y});
}

// Roots of |p + t (q-p) - z|^2 = r^2 strictly inside (0, 1).
void circle_roots(Vec2 p, Vec2 q, Vec2 z, double r, std::vector<double>& out) {
  const Vec2 d = q - p;
  const Vec2 f = p - z;
  const double a = d.norm2();
  if (a == 0.0) return;
  const double b = f.x * d.x + f.y * d.y;
  const double c = f.norm2() - r * r;
  const double disc = b * b - a * c;
  if (disc <= 0.0) return;  // tangent or disjoint: no transversal crossing
  const double s = std::sqrt(disc);
  // Numerically stable pairing.
  const double qv = -(b + (b >= 0.0 ? s : -s));
  const double t1 = qv / a;
  const double t2 = c / qv;
  if (t1 > 0.0 && t1 < 1.0) out.push_back(t1);
  if (t2 > 0.0 && t2 < 1.0) out.push_back(t2);
}

// Transition bookkeeping shared by the state machine: returns the updated
// crossing count given a touched boundary.
struct TouchState {
  int last = -1;  // -1 none, 0 inner, 1 outer
  int count = 0;

  void touch(int boundary) {
    if (last >= 0 && last != boundary) ++count;
    last = boundary;
  }
};

}  // namespace

int count_crossings(const PlanarPath& path, const Annulus& annulus) {
  path.validate();
  if (!(annulus.r_in > 0.0) || !(annulus.r_in < annulus.r_out))
    fail(ErrorCode::invalid_parameter, "annulus needs 0 < r_in < r_out");

  // Resolution guard: the typical (median) spacing of segments meeting the
  // closed outer disk must resolve the hole.  Isolated long steps are a fact
  // of discretized traces and are processed exactly as polyline segments.
  const double guard = annulus.r_in / 4.0;
  std::vector<double> near_lengths;

  TouchState st;
  int cur = classify(path.vertices.front(), annulus);
  std::vector<double> ts;
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
    const Vec2 p = path.vertices[i];
    const Vec2 q = path.vertices[i + 1];
    const double min_d = point_segment_distance(annulus.center, p, q);
    if (min_d > annulus.r_out) {
      cur = kRegionBeyond;
      continue;
    }
    near_lengths.push_back(dist(p, q));
    ts.clear();
    circle_roots(p, q, annulus.center, annulus.r_in, ts);
    circle_roots(p, q, annulus.center, annulus.r_out, ts);
    ts.push_back(1.0);
    std::sort(ts.begin(), ts.end());
    double t_prev = 0.0;
    for (double t : ts) {
      const double mid = 0.5 * (t_prev + t);
      const Vec2 m{p.x + mid * (q.x - p.x), p.y + mid * (q.y - p.y)};
      const int reg = classify(m, annulus);
      if (reg != cur) {
        // A region change crosses the circle separating the two regions; a
        // two-step jump (hole <-> beyond) resolves into both touches in
        // travel order.
        if ((cur == kRegionHole) != (reg == kRegionHole) && (cur != kRegionBeyond && reg != kRegionBeyond)) {
          st.touch(0);
        } else if ((cur == kRegionBeyond) != (reg == kRegionBeyond) &&
                   (cur != kRegionHole && reg != kRegionHole)) {
          st.touch(1);
        } else if (cur == kRegionHole && reg == kRegionBeyond) {
          st.touch(0);
          st.touch(1);
        } else if (cur == kRegionBeyond && reg == kRegionHole) {
          st.touch(1);
          st.touch(0);
        }
        cur = reg;
      }
      t_prev = t;
    }
  }
  if (!near_lengths.empty()) {
    std::nth_element(near_lengths.begin(), near_lengths.begin() + near_lengths.size() / 2,
                     near_lengths.end());
    if (near_lengths[near_lengths.size() / 2] >= guard)
      fail(ErrorCode::resolution, "path vertex spacing too coarse near the annulus");
  }
  return st.count;
}

CrossingReport max_crossings_over_grid(const PlanarPath& path, double epsilon, double alpha,
                                       const Rect& region, double center_spacing) {
  path.validate();
  if (!(alpha > 1.0)) fail(ErrorCode::invalid_parameter, "alpha must exceed 1");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    fail(ErrorCode::invalid_parameter, "epsilon must lie in (0, 1)");
  if (!(center_spacing > 0.0)) fail(ErrorCode::invalid_parameter, "center_spacing must be positive");
  const double r_in = std::pow(epsilon, alpha);

  std::vector<double> seg_len(path.vertices.size() - 1);
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i)
    seg_len[i] = dist(path.vertices[i], path.vertices[i + 1]);
  std::vector<double> sorted = seg_len;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  if (!(r_in > 4.0 * median))
    fail(ErrorCode::invalid_parameter,
         "epsilon^alpha must exceed 4x the path vertex spacing; refine the path or enlarge epsilon");
  const double max_seg = sorted.back();

  // Coarse vertex hash over cells of size epsilon: a center farther than
  // r_out + max_seg/2 from every vertex cannot meet the path.
  const double cell = epsilon;
  const Rect bb = path.bounding_box();
  const int nx = std::max(1, static_cast<int>((bb.x1 - bb.x0) / cell) + 1);
  const int ny = std::max(1, static_cast<int>((bb.y1 - bb.y0) / cell) + 1);
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(nx) * ny);
  auto bucket_of = [&](Vec2 p) {
    int bx = std::clamp(static_cast<int>((p.x - bb.x0) / cell), 0, nx - 1);
    int by = std::clamp(static_cast<int>((p.y - bb.y0) / cell), 0, ny - 1);
    return static_cast<std::size_t>(by) * nx + bx;
  };
  for (std::size_t i = 0; i < path.vertices.size(); ++i)
    buckets[bucket_of(path.vertices[i])].push_back(static_cast<int>(i));

  const double reach = epsilon + 0.5 * max_seg;
  const int ring = static_cast<int>(std::ceil(reach / cell)) + 1;
  auto near_path = [&](Vec2 z) {
    const int bx = static_cast<int>(std::floor((z.x - bb.x0) / cell));
    const int by = static_cast<int>(std::floor((z.y - bb.y0) / cell));
    for (int dy = -ring; dy <= ring; ++dy) {
      const int yy = by + dy;
      if (yy < 0 || yy >= ny) continue;
      for (int dx = -ring; dx <= ring; ++dx) {
        const int xx = bx + dx;
        if (xx < 0 || xx >= nx) continue;
        for (int vi : buckets[static_cast<std::size_t>(yy) * nx + xx])
          if (dist(path.vertices[vi], z) <= reach) return true;
      }
    }
    return false;
  };

  CrossingReport rep;
  rep.epsilon = epsilon;
  rep.alpha = alpha;
  rep.path_kind = path.kind;
  const int kx = static_cast<int>(std::floor((region.x1 - region.x0) / center_spacing + 1e-12));
  const int ky = static_cast<int>(std::floor((region.y1 - region.y0) / center_spacing + 1e-12));
  for (int iy = 0; iy <= ky; ++iy) {
    const double y = region.y0 + iy * center_spacing;
    for (int ix = 0; ix <= kx; ++ix) {
      const double x = region.x0 + ix * center_spacing;
      const Vec2 z{x, y};
      int count = 0;
      if (near_path(z)) {
        try {
          count = count_crossings(path, {z, r_in, epsilon});
        } catch (const Error& e) {
          if (e.code() != ErrorCode::resolution) throw;
          rep.skipped_centers.push_back(z);
          continue;
        }
      }
      rep.per_center.emplace_back(z, count);
      rep.max_count = std::max(rep.max_count, count);
    }
  }
  return rep;
}

std::vector<CrossingExperimentSummary> geodesic_crossing_experiment(
    const lfpp::MetricGraph& graph, int num_pairs, const std::vector<double>& epsilon_list,
    double alpha, std::uint64_t seed) {
  if (num_pairs < 1) fail(ErrorCode::invalid_parameter, "num_pairs must be positive");
  if (epsilon_list.empty()) fail(ErrorCode::invalid_parameter, "epsilon_list must not be empty");
  for (double eps : epsilon_list)
    if (!(std::pow(eps, alpha) > 4.0 * graph.spacing()))
      fail(ErrorCode::resolution, "epsilon^alpha must exceed 4x the lattice spacing");

  // Pairs drawn from the central half of the lattice, separated by at least
  // a third of the grid extent.
  const int n = graph.side();
  const double extent = (n - 1) * graph.spacing();
  Rng rng(seed);
  auto sample_vertex = [&] {
    const int lo = n / 4, span = n / 2;
    const int i = lo + static_cast<int>(rng.below(span));
    const int j = lo + static_cast<int>(rng.below(span));
    return graph.vertex_at(i, j);
  };

  std::vector<CrossingExperimentSummary> out(epsilon_list.size());
  for (std::size_t e = 0; e < epsilon_list.size(); ++e) {
    out[e].epsilon = epsilon_list[e];
    out[e].alpha = alpha;
  }
  for (int pair = 0; pair < num_pairs; ++pair) {
    int a = sample_vertex(), b = sample_vertex();
    while (dist(graph.position(a), graph.position(b)) < extent / 3.0) b = sample_vertex();
    const PlanarPath geo = lfpp::geodesic(graph, a, b);
    Rect bb = geo.bounding_box();
    for (std::size_t e = 0; e < epsilon_list.size(); ++e) {
      const double eps = epsilon_list[e];
      const Rect region{bb.x0 - eps, bb.y0 - eps, bb.x1 + eps, bb.y1 + eps};
      const CrossingReport rep = max_crossings_over_grid(geo, eps, alpha, region, eps / 2.0);
      out[e].max_counts.push_back(rep.max_count);
    }
  }
  for (auto& s : out) {
    s.num_paths = num_pairs;
    s.num_exceeding_four =
        static_cast<int>(std::count_if(s.max_counts.begin(), s.max_counts.end(),
                                       [](int c) { return c > 4; }));
    s.frequency = static_cast<double>(s.num_exceeding_four) / num_pairs;
    std::tie(s.wilson_lo, s.wilson_hi) = wilson_interval(s.num_exceeding_four, num_pairs);
  }
  return out;
}

ScaleScan scale_scan(const lfpp::MetricGraph& graph, Vec2 z, double base_radius, int K, double c) {
  if (K < 1) fail(ErrorCode::invalid_parameter, "K must be at least 1");
  if (!(c > 0.0)) fail(ErrorCode::invalid_parameter, "c must be positive");
  const double r_finest = std::ldexp(base_radius, -K);
  if (r_finest < 8.0 * graph.spacing()) {
    const int k_max =
        static_cast<int>(std::floor(std::log2(base_radius / (8.0 * graph.spacing()))));
    fail(ErrorCode::resolution,
         "K too deep for this resolution; largest feasible K is " + std::to_string(k_max));
  }

  ScaleScan scan;
  scan.center = z;
  scan.base_radius = base_radius;
  scan.K = K;
  scan.c = c;
  for (int k = 1; k <= K; ++k) {
    const double r = std::ldexp(base_radius, -k);
    ScaleScan::Entry e;
    e.k = k;
    try {
      e.l1 = lfpp::annulus_separating_length(graph, z, r / 2.0, 7.0 * r / 8.0);
      e.l2 = lfpp::annulus_crossing_length(graph, z, r / 2.0, 7.0 * r / 8.0);
      e.s1 = lfpp::annulus_separating_length(graph, z, 3.0 * r / 4.0, 7.0 * r / 8.0);
      e.s2 = lfpp::annulus_crossing_length(graph, z, r / 2.0, 5.0 * r / 8.0);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::resolution) throw;
      fail(ErrorCode::resolution, "scale k=" + std::to_string(k) +
                                      " is unresolvable on this lattice; largest feasible K is " +
                                      std::to_string(k - 1) + " (" + err.what() + ")");
    }
    if (e.l1 <= c * e.l2) ++scan.count_l1_le_c_l2;
    if (e.s1 < e.s2) ++scan.count_s1_lt_s2;
    scan.per_scale.push_back(e);
  }
  return scan;
}

double binomial_tail_bound(double p, double r, int n) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::invalid_parameter, "p must lie in (0, 1)");
  if (!(r >= p && r <= 1.0)) fail(ErrorCode::invalid_parameter, "r must lie in [p, 1]");
  if (n < 1) fail(ErrorCode::invalid_parameter, "n must be positive");
  double exponent = r < 1.0 ? (1.0 - r) * std::log((1.0 - p) / (1.0 - r)) : 0.0;
  exponent += r * std::log(p / r);
  return std::exp(n * exponent);
}

std::pair<double, double> wilson_interval(int successes, int trials) {
  if (trials < 1) fail(ErrorCode::invalid_parameter, "trials must be positive");
  const double zq = 1.96;
  const double n = trials;
  const double phat = static_cast<double>(successes) / n;
  const double z2 = zq * zq;
  const double denom = 1.0 + z2 / n;
  const double mid = phat + z2 / (2.0 * n);
  const double half = zq * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, (mid - half) / denom), std::min(1.0, (mid + half) / denom)};
}

void export_crossing_report_csv(const CrossingReport& report, const std::string& file) {
  FileWriter out(file);
  std::string header = "center_x,center_y,crossings\n";
  out.write_bytes(header.data(), header.size());
  char buf[128];
  for (const auto& [z, count] : report.per_center) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d\n", z.x, z.y, count);
    out.write_bytes(buf, std::strlen(buf));
  }
}

void export_scale_scan_csv(const ScaleScan& scan, const std::string& file) {
  FileWriter out(file);
  std::string header = "k,r_k,L1,L2,S1,S2\n";
  out.write_bytes(header.data(), header.size());
  char buf[192];
  for (const auto& e : scan.per_scale) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.k,
                  std::ldexp(scan.base_radius, -e.k), e.l1, e.l2, e.s1, e.s2);
    out.write_bytes(buf, std::strlen(buf));
  }
}

}  // namespace lqglab::crossings
