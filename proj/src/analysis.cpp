#include "lqglab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numbers>
#include <tuple>
#include <unordered_set>

#include "lqglab/io_util.hpp"
#include "lqglab/rng.hpp"

namespace lqglab::analysis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double point_segment_distance(Vec2 z, Vec2 p, Vec2 q) {
  const Vec2 d = q - p;
  const double dd = d.norm2();
  double t = dd > 0.0 ? ((z - p).x * d.x + (z - p).y * d.y) / dd : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return dist(z, {p.x + t * d.x, p.y + t * d.y});
}

Vec2 closest_point_on_segment(Vec2 z, Vec2 p, Vec2 q) {
  const Vec2 d = q - p;
  const double dd = d.norm2();
  double t = dd > 0.0 ? ((z - p).x * d.x + (z - p).y * d.y) / dd : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return {p.x + t * d.x, p.y + t * d.y};
}

double segment_segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
    return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
  };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0))) return 0.0;  // proper crossing
  double best = point_segment_distance(c, a, b);
  best = std::min(best, point_segment_distance(d, a, b));
  best = std::min(best, point_segment_distance(a, c, d));
  best = std::min(best, point_segment_distance(b, c, d));
  return best;
}

// Distance from an axis-aligned square to a segment; 0 when they meet.
double square_segment_distance(Vec2 corner, double side, Vec2 p, Vec2 q) {
  const Rect r{corner.x, corner.y, corner.x + side, corner.y + side};
  if (r.contains(p) || r.contains(q)) return 0.0;
  const Vec2 c00 = corner, c10{r.x1, r.y0}, c01{r.x0, r.y1}, c11{r.x1, r.y1};
  double best = segment_segment_distance(c00, c10, p, q);
  best = std::min(best, segment_segment_distance(c10, c11, p, q));
  best = std::min(best, segment_segment_distance(c11, c01, p, q));
  best = std::min(best, segment_segment_distance(c01, c00, p, q));
  return best;
}

}  // namespace

double holder_modulus(const PlanarPath& path, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::invalid_parameter, "delta must lie in (0, 1)");
  if (path.vertices.size() < 3)
    fail(ErrorCode::degenerate_input, "holder_modulus needs at least 3 vertices");
  const auto& v = path.vertices;
  const std::size_t n = v.size();
  const double expo = 1.0 - delta;

  // D[s][t] = diam(v[s..t]) satisfies
  //   D[s][t] = max(D[s+1][t], D[s][t-1], |v[s]-v[t]|),
  // so two rolling rows suffice while s runs downward.
  std::vector<double> next(n, 0.0), cur(n, 0.0);
  double best = 0.0;
  for (std::size_t s = n - 1; s-- > 0;) {
    cur[s + 1] = dist(v[s], v[s + 1]);
    double chord = cur[s + 1];
    if (chord > 0.0) best = std::max(best, chord / std::pow(chord, expo));
    for (std::size_t t = s + 2; t < n; ++t) {
      const double d_st = dist(v[s], v[t]);
      cur[t] = std::max({next[t], cur[t - 1], d_st});
      if (d_st > 0.0) best = std::max(best, cur[t] / std::pow(d_st, expo));
    }
    std::swap(cur, next);
  }
  return best;
}

BoxCountResult box_counting_dimension(const PlanarPath& path, const std::vector<double>& scales) {
  path.validate();
  if (scales.size() < 2) fail(ErrorCode::invalid_parameter, "need at least 2 scales");
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (!(scales[i] < scales[i - 1]))
      fail(ErrorCode::invalid_parameter, "scale list must be strictly decreasing");
  double max_spacing = 0.0;
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i)
    max_spacing = std::max(max_spacing, dist(path.vertices[i], path.vertices[i + 1]));
  if (!(scales.back() > 2.0 * max_spacing))
    fail(ErrorCode::resolution, "smallest scale must exceed 2x the path vertex spacing");

  BoxCountResult out;
  out.scales = scales;
  out.counts.reserve(scales.size());
  std::unordered_set<long long> cells;
  for (double m : scales) {
    cells.clear();
    for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
      // Amanatides-Woo traversal of the segment through the mesh.
      Vec2 p = path.vertices[i];
      const Vec2 q = path.vertices[i + 1];
      long long cx = static_cast<long long>(std::floor(p.x / m));
      long long cy = static_cast<long long>(std::floor(p.y / m));
      const long long ex = static_cast<long long>(std::floor(q.x / m));
      const long long ey = static_cast<long long>(std::floor(q.y / m));
      cells.insert(cx * 2000003LL + cy);
      const double dx = q.x - p.x, dy = q.y - p.y;
      const int sx = dx > 0 ? 1 : -1, sy = dy > 0 ? 1 : -1;
      double t_max_x = dx != 0.0 ? (((cx + (sx > 0)) * m) - p.x) / dx : kInf;
      double t_max_y = dy != 0.0 ? (((cy + (sy > 0)) * m) - p.y) / dy : kInf;
      const double t_dx = dx != 0.0 ? std::abs(m / dx) : kInf;
      const double t_dy = dy != 0.0 ? std::abs(m / dy) : kInf;
      int guard = 0;
      while ((cx != ex || cy != ey) && ++guard < 1 << 22) {
        if (t_max_x < t_max_y) {
          cx += sx;
          t_max_x += t_dx;
        } else {
          cy += sy;
          t_max_y += t_dy;
        }
        cells.insert(cx * 2000003LL + cy);
      }
    }
    out.counts.push_back(static_cast<long long>(cells.size()));
  }

  // OLS over the 4 finest scales (coarser ones see the path's overall
  // diameter rather than its structure).
  const std::size_t fit = std::min<std::size_t>(4, scales.size());
  const std::size_t first = scales.size() - fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = first; i < scales.size(); ++i) {
    const double x = std::log(1.0 / scales[i]);
    const double y = std::log(static_cast<double>(out.counts[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double nfit = static_cast<double>(fit);
  out.slope = (nfit * sxy - sx * sy) / (nfit * sxx - sx * sx);
  return out;
}

namespace {

struct CubeTask {
  Vec2 corner;
  double side;
  int depth;
  std::vector<int> candidates;  // segment indices possibly within range
};

}  // namespace

WhitneyDecomposition whitney_decomposition(const PlanarPath& path, const Rect& bounding_box,
                                           int max_depth) {
  path.validate();
  if (max_depth < 1 || max_depth > 30) fail(ErrorCode::invalid_parameter, "max_depth must be in [1, 30]");
  for (const Vec2& v : path.vertices)
    if (!bounding_box.contains_strict(v))
      fail(ErrorCode::invalid_parameter, "path must lie strictly inside the bounding box");
  if (bounding_box.width() != bounding_box.height())
    fail(ErrorCode::invalid_parameter, "bounding box must be square");

  const std::size_t nseg = path.vertices.size() - 1;
  WhitneyDecomposition out;
  out.box = bounding_box;

  std::vector<CubeTask> stack;
  CubeTask root{{bounding_box.x0, bounding_box.y0}, bounding_box.width(), 0, {}};
  root.candidates.resize(nseg);
  for (std::size_t i = 0; i < nseg; ++i) root.candidates[i] = static_cast<int>(i);
  stack.push_back(std::move(root));

  while (!stack.empty()) {
    CubeTask task = std::move(stack.back());
    stack.pop_back();
    double d = kInf;
    for (int si : task.candidates)
      d = std::min(d, square_segment_distance(task.corner, task.side, path.vertices[si],
                                              path.vertices[si + 1]));
    if (d >= task.side) {
      out.cubes.push_back({task.corner, task.side, task.depth, d});
      continue;
    }
    if (task.depth == max_depth) {
      out.shortfall.push_back({task.corner, task.side, task.depth, d});
      continue;
    }
    const double h = task.side / 2.0;
    // Children only need segments within their own emission range.
    const double keep = 10.0 * h;
    for (int cy = 0; cy < 2; ++cy) {
      for (int cx = 0; cx < 2; ++cx) {
        CubeTask child{{task.corner.x + cx * h, task.corner.y + cy * h}, h, task.depth + 1, {}};
        for (int si : task.candidates) {
          if (square_segment_distance(child.corner, h, path.vertices[si], path.vertices[si + 1]) <=
              keep)
            child.candidates.push_back(si);
        }
        stack.push_back(std::move(child));
      }
    }
  }
  // Deterministic output order regardless of traversal bookkeeping.
  std::sort(out.cubes.begin(), out.cubes.end(), [](const WhitneyCube& a, const WhitneyCube& b) {
    return std::tie(a.depth, a.corner.y, a.corner.x) < std::tie(b.depth, b.corner.y, b.corner.x);
  });
  std::sort(out.shortfall.begin(), out.shortfall.end(),
            [](const WhitneyCube& a, const WhitneyCube& b) {
              return std::tie(a.corner.y, a.corner.x) < std::tie(b.corner.y, b.corner.x);
            });
  return out;
}

namespace {

/// Multi-level uniform grids over path segments answering exact nearest
/// queries.  Near queries resolve on the fine level; mid-range queries
/// escalate to coarser levels instead of spiralling through fine rings.
class SegmentIndex {
 public:
  explicit SegmentIndex(const PlanarPath& path) : path_(path) {
    bb_ = path.bounding_box();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i)
      total += dist(path.vertices[i], path.vertices[i + 1]);
    const double extent = std::max({bb_.width(), bb_.height(), 1e-12});
    double cell = std::max(extent / 512.0, total / std::max<std::size_t>(path.vertices.size(), 1));
    while (true) {
      levels_.push_back(Level(path, bb_, cell));
      if (cell >= extent / 4.0) break;
      cell *= 8.0;
    }
  }

  /// Distance to the path and the closest path point.
  std::pair<double, Vec2> query(Vec2 z) const {
    double best = kInf;
    Vec2 best_pt{};
    for (const Level& level : levels_) {
      if (level.refine(path_, z, best, best_pt)) return {best, best_pt};
    }
    // Far query: finish exhaustively (rare; dominated by the hull fast path
    // in the walk loop).
    for (std::size_t i = 0; i + 1 < path_.vertices.size(); ++i) {
      const double d = point_segment_distance(z, path_.vertices[i], path_.vertices[i + 1]);
      if (d < best) {
        best = d;
        best_pt = closest_point_on_segment(z, path_.vertices[i], path_.vertices[i + 1]);
      }
    }
    return {best, best_pt};
  }

 private:
  struct Level {
    double cell;
    int nx, ny;
    Rect bb;
    std::vector<std::vector<int>> buckets;

    Level(const PlanarPath& path, const Rect& box, double cell_size)
        : cell(cell_size), bb(box) {
      nx = static_cast<int>(bb.width() / cell) + 2;
      ny = static_cast<int>(bb.height() / cell) + 2;
      buckets.resize(static_cast<std::size_t>(nx) * ny);
      for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
        const Vec2 p = path.vertices[i], q = path.vertices[i + 1];
        const int x0 = cx(std::min(p.x, q.x)), x1 = cx(std::max(p.x, q.x));
        const int y0 = cy(std::min(p.y, q.y)), y1 = cy(std::max(p.y, q.y));
        for (int y = y0; y <= y1; ++y)
          for (int x = x0; x <= x1; ++x)
            buckets[static_cast<std::size_t>(y) * nx + x].push_back(static_cast<int>(i));
      }
    }

    int cx(double x) const { return std::clamp(static_cast<int>((x - bb.x0) / cell), 0, nx - 1); }
    int cy(double y) const { return std::clamp(static_cast<int>((y - bb.y0) / cell), 0, ny - 1); }

    /// Ring search around z; true once `best` is certified exact (every
    /// segment within (ring-1)*cell has been examined and best is inside
    /// that radius).
    bool refine(const PlanarPath& path, Vec2 z, double& best, Vec2& best_pt) const {
      const int zx = cx(z.x), zy = cy(z.y);
      const int max_ring = 4;
      for (int ring = 0; ring <= max_ring; ++ring) {
        for (int y = zy - ring; y <= zy + ring; ++y) {
          if (y < 0 || y >= ny) continue;
          for (int x = zx - ring; x <= zx + ring; ++x) {
            if (x < 0 || x >= nx) continue;
            if (ring > 0 && std::abs(x - zx) != ring && std::abs(y - zy) != ring) continue;
            for (int si : buckets[static_cast<std::size_t>(y) * nx + x]) {
              const Vec2 p = path.vertices[si], q = path.vertices[si + 1];
              const double d = point_segment_distance(z, p, q);
              if (d < best) {
                best = d;
                best_pt = closest_point_on_segment(z, p, q);
              }
            }
          }
        }
        if (best <= (ring - 1) * cell) return true;
      }
      return false;
    }
  };

  const PlanarPath& path_;
  Rect bb_{};
  std::vector<Level> levels_;
};

}  // namespace

ShadowSum shadow_sum_estimate(const PlanarPath& path, const std::vector<WhitneyCube>& cubes,
                              int walkers_per_cube, std::uint64_t seed, long long max_steps) {
  path.validate();
  if (walkers_per_cube < 16)
    fail(ErrorCode::invalid_parameter, "walkers_per_cube must be at least 16");
  const SegmentIndex index(path);

  // Planar walk-on-spheres is null-recurrent: outward excursions have
  // infinite expected length.  Whenever the walker leaves a circle enclosing
  // the path, its whole excursion is replaced by one draw of the reentry
  // point from the exterior Poisson kernel, which preserves harmonic
  // measure exactly.
  const Rect bb = path.bounding_box();
  const Vec2 ring_center{0.5 * (bb.x0 + bb.x1), 0.5 * (bb.y0 + bb.y1)};
  const double ring_radius = std::max(0.75 * std::hypot(bb.width(), bb.height()), 1e-9);

  ShadowSum sum;
  sum.per_cube.reserve(cubes.size());
  for (std::size_t ci = 0; ci < cubes.size(); ++ci) {
    const WhitneyCube& cube = cubes[ci];
    const Vec2 start{cube.corner.x + cube.side / 2.0, cube.corner.y + cube.side / 2.0};
    const double stop_eps = 1e-4 * cube.side;
    ShadowEstimate est;
    est.cube = cube;
    est.hit_points.reserve(walkers_per_cube);
    for (int w = 0; w < walkers_per_cube; ++w) {
      // Per-walker substream: enlarging the walker budget extends the hit
      // set instead of reshuffling it.
      Rng rng(derive_seed(derive_seed(seed, ci), static_cast<std::uint64_t>(w)));
      Vec2 x = start;
      long long steps = 0;
      for (;;) {
        const Vec2 rel = x - ring_center;
        const double rho = rel.norm() / ring_radius;
        if (rho > 1.0) {
          // First-hit angle on the enclosing circle from a point at
          // normalized radius rho: Mobius image of the uniform measure.
          const double phi = std::atan2(rel.y, rel.x);
          const double squeeze = (rho - 1.0) / (rho + 1.0);
          const double theta =
              phi + 2.0 * std::atan(squeeze * std::tan(std::numbers::pi * (rng.uniform() - 0.5)));
          x = {ring_center.x + ring_radius * std::cos(theta),
               ring_center.y + ring_radius * std::sin(theta)};
        }
        const auto [r, nearest] = index.query(x);
        if (r <= stop_eps) {
          est.hit_points.push_back(nearest);
          break;
        }
        if (++steps > max_steps)
          fail(ErrorCode::divergent_walker,
               "walker exceeded the step budget in cube " + std::to_string(ci));
        const double a = 2.0 * std::numbers::pi * rng.uniform();
        x = {x.x + r * std::cos(a), x.y + r * std::sin(a)};
      }
    }
    double diam = 0.0;
    for (std::size_t i = 0; i < est.hit_points.size(); ++i)
      for (std::size_t j = i + 1; j < est.hit_points.size(); ++j)
        diam = std::max(diam, dist(est.hit_points[i], est.hit_points[j]));
    est.diameter = diam;
    if (!est.hit_points.empty()) {
      std::vector<double> xs, ys;
      for (const Vec2& h : est.hit_points) {
        xs.push_back(h.x);
        ys.push_back(h.y);
      }
      auto median = [](std::vector<double>& v) {
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        return v[v.size() / 2];
      };
      const Vec2 center{median(xs), median(ys)};
      std::vector<double> dists;
      for (const Vec2& h : est.hit_points) dists.push_back(dist(h, center));
      const std::size_t q75 = (3 * dists.size()) / 4;
      std::nth_element(dists.begin(), dists.begin() + q75, dists.end());
      est.core_diameter = 2.0 * dists[q75];
    }
    sum.total += diam * diam;
    sum.per_cube.push_back(std::move(est));
  }
  return sum;
}

std::vector<DepthTotal> shadow_totals_by_depth(const ShadowSum& sum) {
  std::vector<DepthTotal> totals;
  for (const auto& est : sum.per_cube) {
    const int d = est.cube.depth;
    auto it = std::find_if(totals.begin(), totals.end(),
                           [d](const DepthTotal& t) { return t.depth == d; });
    if (it == totals.end()) {
      totals.push_back(
          {d, 1, est.diameter * est.diameter, est.core_diameter * est.core_diameter});
    } else {
      ++it->cube_count;
      it->sum_diam_sq += est.diameter * est.diameter;
      it->sum_core_sq += est.core_diameter * est.core_diameter;
    }
  }
  std::sort(totals.begin(), totals.end(),
            [](const DepthTotal& a, const DepthTotal& b) { return a.depth < b.depth; });
  return totals;
}

void export_box_counts_csv(const BoxCountResult& r, const std::string& file) {
  FileWriter out(file);
  std::string header = "scale,count\n";
  out.write_bytes(header.data(), header.size());
  char buf[96];
  for (std::size_t i = 0; i < r.scales.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%lld\n", r.scales[i], r.counts[i]);
    out.write_bytes(buf, std::strlen(buf));
  }
}

void export_depth_totals_csv(const std::vector<DepthTotal>& totals, const std::string& file) {
  FileWriter out(file);
  std::string header = "depth,cube_count,sum_diam_sq,sum_core_sq\n";
  out.write_bytes(header.data(), header.size());
  char buf[128];
  for (const auto& t : totals) {
    std::snprintf(buf, sizeof(buf), "%d,%lld,%.17g,%.17g\n", t.depth, t.cube_count, t.sum_diam_sq,
                  t.sum_core_sq);
    out.write_bytes(buf, std::strlen(buf));
  }
}

}  // namespace lqglab::analysis
