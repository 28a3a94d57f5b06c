#include "lqglab/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace lqglab::grf {

namespace {

struct DiskSystem {
  std::vector<int> verts;   // global ids of disk vertices
  std::vector<int> local;   // global -> local, -1 outside
  int n = 0;
};

DiskSystem index_disk(const GridField& field, Vec2 center, double radius) {
  DiskSystem sys;
  sys.n = field.n;
  sys.local.assign(static_cast<std::size_t>(field.n) * field.n, -1);
  const double r2 = radius * radius;
  // Scan only the disk's bounding rows.
  const int i0 = std::max(0, static_cast<int>(std::floor((center.y - radius - field.origin.y) / field.spacing)));
  const int i1 = std::min(field.n - 1, static_cast<int>(std::ceil((center.y + radius - field.origin.y) / field.spacing)));
  for (int i = i0; i <= i1; ++i) {
    for (int j = 0; j < field.n; ++j) {
      const Vec2 p = field.position(i, j);
      if ((p - center).norm2() < r2) {
        const int v = i * field.n + j;
        sys.local[v] = static_cast<int>(sys.verts.size());
        sys.verts.push_back(v);
      }
    }
  }
  return sys;
}

// Conjugate gradients on the Dirichlet Laplacian of the disk.
// A x = b with A = 4 I - adjacency (within the disk), b collecting ambient
// neighbor values.  A is symmetric positive definite.
std::vector<double> solve_dirichlet(const GridField& field, const DiskSystem& sys) {
  const int m = static_cast<int>(sys.verts.size());
  const int n = sys.n;
  std::vector<double> b(m, 0.0);
  for (int l = 0; l < m; ++l) {
    const int v = sys.verts[l];
    const int i = v / n, j = v % n;
    const int nbr[4] = {v - 1, v + 1, v - n, v + n};
    const bool ok[4] = {j > 0, j < n - 1, i > 0, i < n - 1};
    for (int t = 0; t < 4; ++t) {
      if (!ok[t]) fail(ErrorCode::out_of_domain, "disk touches the grid boundary");
      if (sys.local[nbr[t]] < 0) b[l] += field.values[nbr[t]];
    }
  }

  auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
    for (int l = 0; l < m; ++l) {
      const int v = sys.verts[l];
      double acc = 4.0 * x[l];
      const int nbr[4] = {v - 1, v + 1, v - n, v + n};
      for (int t = 0; t < 4; ++t) {
        const int lw = sys.local[nbr[t]];
        if (lw >= 0) acc -= x[lw];
      }
      out[l] = acc;
    }
  };

  std::vector<double> x(m, 0.0), r = b, p = b, ap(m);
  double rs = 0.0, bnorm2 = 0.0;
  for (int l = 0; l < m; ++l) {
    rs += r[l] * r[l];
    bnorm2 += b[l] * b[l];
  }
  const double tol = 1e-10 * std::max(1.0, std::sqrt(bnorm2));
  const double tol2 = tol * tol;
  const int max_iter = 20 * m + 100;
  for (int it = 0; it < max_iter && rs > tol2; ++it) {
    apply(p, ap);
    double pap = 0.0;
    for (int l = 0; l < m; ++l) pap += p[l] * ap[l];
    const double alpha = rs / pap;
    double rs_new = 0.0;
    for (int l = 0; l < m; ++l) {
      x[l] += alpha * p[l];
      r[l] -= alpha * ap[l];
      rs_new += r[l] * r[l];
    }
    const double beta = rs_new / rs;
    rs = rs_new;
    for (int l = 0; l < m; ++l) p[l] = r[l] + beta * p[l];
  }
  if (rs > tol2) fail(ErrorCode::numerical, "Dirichlet solve did not reach the residual tolerance");
  return x;
}

void require_margin(const GridField& field, Vec2 center, double radius) {
  const Rect ext = field.extent();
  const double margin = 2.0 * field.spacing;
  if (center.x - radius < ext.x0 + margin || center.x + radius > ext.x1 - margin ||
      center.y - radius < ext.y0 + margin || center.y + radius > ext.y1 - margin)
    fail(ErrorCode::out_of_domain, "disk touches the grid boundary (needs a 2-step margin)");
}

}  // namespace

std::vector<int> disk_vertices(const GridField& field, Vec2 center, double radius) {
  return index_disk(field, center, radius).verts;
}

HarmonicDecomposition harmonic_decomposition(const GridField& field, Vec2 center, double radius) {
  if (!(radius > 0.0)) fail(ErrorCode::invalid_parameter, "radius must be positive");
  require_margin(field, center, radius);
  const DiskSystem sys = index_disk(field, center, radius);
  if (sys.verts.empty()) fail(ErrorCode::invalid_parameter, "disk contains no lattice vertex");
  const std::vector<double> x = solve_dirichlet(field, sys);

  HarmonicDecomposition out;
  out.center = center;
  out.radius = radius;
  out.harmonic_part = field;
  out.harmonic_part.normalization_note = "harmonic part";
  out.remainder = field;
  out.remainder.normalization_note = "markov remainder";
  std::fill(out.remainder.values.begin(), out.remainder.values.end(), 0.0);
  for (std::size_t l = 0; l < sys.verts.size(); ++l) {
    const int v = sys.verts[l];
    out.harmonic_part.values[v] = x[l];
    out.remainder.values[v] = field.values[v] - x[l];
  }
  // The pieces are raw lattice functions, not samples of either ensemble;
  // skip the sampler invariants but keep geometry coherent.
  return out;
}

bool is_m_good(const GridField& field, Vec2 center, double radius, double M) {
  if (!(M > 0.0)) fail(ErrorCode::invalid_parameter, "M must be positive");
  const HarmonicDecomposition dec = harmonic_decomposition(field, center, radius);
  const double at_center = interpolate(dec.harmonic_part, center);
  const double sup_radius = 15.0 * radius / 16.0;
  double sup = 0.0;
  for (int v : disk_vertices(field, center, sup_radius)) {
    sup = std::max(sup, std::abs(dec.harmonic_part.values[v] - at_center));
    if (sup > M) return false;
  }
  return sup <= M;
}

GoodScaleReport good_scale_report(const GridField& field, Vec2 center, double base_radius, int K,
                                  double M) {
  if (K < 1) fail(ErrorCode::invalid_parameter, "K must be at least 1");
  if (!(base_radius > 0.0)) fail(ErrorCode::invalid_parameter, "base_radius must be positive");
  const double finest = std::ldexp(base_radius, -K);
  if (finest < 4.0 * field.spacing) {
    const int k_max = static_cast<int>(std::floor(std::log2(base_radius / (4.0 * field.spacing))));
    fail(ErrorCode::invalid_parameter,
         "K too deep for this resolution; largest feasible K is " + std::to_string(k_max));
  }
  require_margin(field, center, base_radius / 2.0);

  GoodScaleReport rep;
  rep.center = center;
  rep.base_radius = base_radius;
  rep.K = K;
  rep.M = M;
  rep.per_scale_good.resize(K);
  int good = 0;
  for (int k = 1; k <= K; ++k) {
    const bool g = is_m_good(field, center, std::ldexp(base_radius, -k), M);
    rep.per_scale_good[k - 1] = g;
    good += g ? 1 : 0;
  }
  rep.fraction_good = static_cast<double>(good) / K;
  return rep;
}

}  // namespace lqglab::grf
