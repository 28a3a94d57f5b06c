#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "lqglab/planar_path.hpp"

namespace lqglab::loewner {

/// Brownian driving samples U_t = sqrt(kappa) B_t on a uniform time grid.
struct DrivingFunction {
  std::vector<double> times;   // strictly increasing, starting at 0
  std::vector<double> values;  // U at those times, U_0 = 0
  double kappa = 0.0;

  void validate() const;
};

/// Gaussian increments of variance kappa * dt; deterministic given the seed.
DrivingFunction sample_driving(double kappa, double horizon, double dt, std::uint64_t seed);

/// Chordal trace by composing, in reverse time order, the vertical-slit maps
/// of each driving increment.  The path starts at eta(0) = U_0 and stays in
/// the closed upper half-plane.  `stride` keeps every stride-th sample time
/// as an output point (the composition itself always uses every increment).
PlanarPath chordal_trace(const DrivingFunction& driving, int stride = 1);

/// Whole-plane trace grown from a seed circle of radius e^{-T0} with T0
/// chosen so that e^{-T0} < dt; radial slit maps composed outward.  The
/// returned path starts within 2 e^{-T0} of the origin.
PlanarPath whole_plane_trace(double kappa, double horizon, double dt, std::uint64_t seed,
                             int stride = 1);

/// Elementary exterior radial slit map used by whole_plane_trace: the inverse
/// of the constant-driving flow of duration `duration` with driving angle u.
/// Exposed for tests.
std::complex<double> radial_slit_map(std::complex<double> w, double u, double duration);

/// Angle diffusion of the harmonic-measure process:
///   d Theta = (1 - 4/kappa) cot(Theta) dt + dB,  Theta in (0, pi).
struct ThetaPath {
  std::vector<double> times;
  std::vector<double> values;  // strictly inside (0, pi)
  double kappa = 0.0;
  bool absorbed = false;
  double absorbed_at = 0.0;   // boundary value 0 or pi when absorbed
  double absorption_time = 0.0;

  /// Value of the stopped process at the final time (boundary value when
  /// absorbed); the natural martingale observable at kappa = 4.
  double stopped_value() const { return absorbed ? absorbed_at : values.back(); }
};

/// Euler-Maruyama with step halving near the boundary: a substep is halved
/// while its drift move exceeds half the distance to {0, pi}.  Boundary
/// contact absorbs and truncates the path.
ThetaPath theta_diffusion(double kappa, double theta0, double horizon, double dt,
                          std::uint64_t seed);

/// CSV export with columns (index, t, x, y).
void export_trace_csv(const PlanarPath& path, const std::vector<double>& times,
                      const std::string& file);

}  // namespace lqglab::loewner
