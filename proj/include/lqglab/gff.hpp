#pragma once

#include <cstdint>

#include "lqglab/grid_field.hpp"

namespace lqglab::grf {

/// Samples a zero-boundary discrete Gaussian free field on an n x n lattice.
///
/// The field is the finite eigenbasis series over the discrete Dirichlet
/// Laplacian: coefficient variance 2*pi/lambda for each eigenmode, so the
/// covariance of the field equals 2*pi times the inverse of the unweighted
/// 4-neighbor graph Laplacian with zero boundary data.  Deterministic given
/// the seed; boundary entries are exactly 0 by construction.
GridField sample_zero_boundary_gff(int grid_size, double spacing, std::uint64_t seed);

/// Samples a whole-plane-style field on the n x n torus (n a power of two)
/// from independent Gaussian spectral coefficients with the zero mode
/// dropped, then fixes the additive constant so the circle average of radius
/// 1 around the grid center is 0.
///
/// pre: grid_size >= 8 and a power of two; (grid_size-1)*spacing must cover
/// the unit circle around the center so the normalization is well defined.
GridField sample_whole_plane_gff(int grid_size, double spacing, std::uint64_t seed);

/// Exact variance of the linear functional w . h for the torus field above
/// (after the unit-circle normalization), computed from the spectral weights.
/// `weights` lists (vertex index, weight) pairs of the functional applied to
/// the raw torus field; the normalization is handled internally.
double torus_functional_variance(int grid_size,
                                 const std::vector<std::pair<int, double>>& weights);

/// Bilinear stencil of the circle-average functional: the sparse vertex
/// weights w with circle_average(field, center, radius) == sum w_i h_i for
/// every field on this lattice geometry.
std::vector<std::pair<int, double>> circle_average_weights(const GridField& geometry, Vec2 center,
                                                           double radius);

}  // namespace lqglab::grf
