#pragma once

#include <vector>

#include "lqglab/grid_field.hpp"

namespace lqglab::grf {

/// Markov split of a field over a lattice disk: harmonic_part solves the
/// discrete Dirichlet problem on the disk's vertices with ambient boundary
/// data and matches the field outside; remainder is the difference inside
/// and 0 on and outside the disk boundary.
struct HarmonicDecomposition {
  GridField harmonic_part;
  GridField remainder;
  Vec2 center{};
  double radius = 0.0;
};

/// Lattice vertices of the open disk B(center, radius) (strict inequality).
std::vector<int> disk_vertices(const GridField& field, Vec2 center, double radius);

/// Solves the discrete Dirichlet problem by conjugate gradients to residual
/// 1e-10.  pre: the disk lies inside the grid with a margin of at least two
/// lattice steps.
HarmonicDecomposition harmonic_decomposition(const GridField& field, Vec2 center, double radius);

/// True iff the harmonic part of the field over B(center, radius) oscillates
/// by at most M around its value at the center, the sup running over lattice
/// vertices of B(center, 15*radius/16).
bool is_m_good(const GridField& field, Vec2 center, double radius, double M);

struct GoodScaleReport {
  Vec2 center{};
  double base_radius = 0.0;
  int K = 0;
  double M = 0.0;
  std::vector<bool> per_scale_good;  // index k-1 holds scale r_k = 2^-k * base
  double fraction_good = 0.0;
};

/// Evaluates is_m_good at the dyadic scales r_k = 2^-k * base_radius for
/// k = 1..K.  Errors with the largest feasible K when the requested K is too
/// deep for the lattice resolution.
GoodScaleReport good_scale_report(const GridField& field, Vec2 center, double base_radius, int K,
                                  double M);

}  // namespace lqglab::grf
