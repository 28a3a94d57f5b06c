#include "lqglab/loewner.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>

#include "lqglab/io_util.hpp"
#include "lqglab/rng.hpp"

namespace lqglab::loewner {

namespace {

using cplx = std::complex<double>;

// Principal square root mapped into the closed upper half-plane.
cplx sqrt_upper(cplx z) {
  cplx r = std::sqrt(z);
  if (r.imag() < 0.0) r = -r;
  return r;
}

void check_step(cplx w, std::size_t step) {
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
    fail(ErrorCode::numerical, "Loewner composition lost finiteness at step " + std::to_string(step));
}

}  // namespace

void DrivingFunction::validate() const {
  if (times.size() != values.size() || times.size() < 2)
    fail(ErrorCode::invalid_parameter, "driving needs matching times/values with at least 2 samples");
  if (times[0] != 0.0) fail(ErrorCode::invalid_parameter, "driving must start at time 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      fail(ErrorCode::invalid_parameter, "driving times must be strictly increasing");
  for (double v : values)
    if (!std::isfinite(v)) fail(ErrorCode::invalid_parameter, "driving contains a non-finite value");
  if (!(kappa >= 0.0)) fail(ErrorCode::invalid_parameter, "kappa must be nonnegative");
}

DrivingFunction sample_driving(double kappa, double horizon, double dt, std::uint64_t seed) {
  if (!(kappa >= 0.0)) fail(ErrorCode::invalid_parameter, "kappa must be nonnegative");
  if (!(dt > 0.0) || !(horizon >= dt))
    fail(ErrorCode::invalid_parameter, "need dt > 0 and horizon >= dt");
  const std::size_t steps = static_cast<std::size_t>(std::llround(horizon / dt));
  Rng rng(seed);
  DrivingFunction d;
  d.kappa = kappa;
  d.times.resize(steps + 1);
  d.values.resize(steps + 1);
  d.times[0] = 0.0;
  d.values[0] = 0.0;
  const double scale = std::sqrt(kappa * dt);
  for (std::size_t k = 1; k <= steps; ++k) {
    d.times[k] = k * dt;
    d.values[k] = d.values[k - 1] + scale * rng.gaussian();
  }
  return d;
}

PlanarPath chordal_trace(const DrivingFunction& driving, int stride) {
  driving.validate();
  if (stride < 1) fail(ErrorCode::invalid_parameter, "stride must be >= 1");
  const std::size_t steps = driving.times.size() - 1;

  // Increment data for the centered slit maps h_k(w) = sqrt((w + delta_k)^2 - 4 Delta_k).
  std::vector<double> delta(steps), four_dt(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    delta[k] = driving.values[k + 1] - driving.values[k];
    four_dt[k] = 4.0 * (driving.times[k + 1] - driving.times[k]);
  }

  std::vector<Vec2> pts;
  pts.reserve(steps / stride + 2);
  pts.push_back({driving.values[0], 0.0});  // eta(0) = U_0
  for (std::size_t m = stride; m <= steps; m += stride) {
    // Raw-double composition; this loop is the cost of the whole module.
    double wx = 0.0, wy = 0.0;
    for (std::size_t k = m; k-- > 0;) {
      const double sx = wx + delta[k];
      const double zx = sx * sx - wy * wy - four_dt[k];
      const double zy = 2.0 * sx * wy;
      // Principal square root folded into the closed upper half-plane.
      const double r = std::sqrt(zx * zx + zy * zy);
      const double u = std::sqrt(0.5 * (r + std::abs(zx)));
      if (zx >= 0.0) {
        wx = u;
        wy = u > 0.0 ? zy / (2.0 * u) : 0.0;
      } else {
        wx = u > 0.0 ? std::abs(zy) / (2.0 * u) : 0.0;
        wy = std::copysign(u, zy);
      }
      if (wy < 0.0) {
        wx = -wx;
        wy = -wy;
      }
    }
    check_step({wx, wy}, m);
    pts.push_back({wx + driving.values[0], wy});
  }
  return make_path(std::move(pts), PathKind::sle_trace);
}

std::complex<double> radial_slit_map(std::complex<double> w, double u, double duration) {
  // Exterior radial flow with constant driving solves K(g_t(w)) = e^t K(w)
  // for K(w) = w / (1+w)^2; the inverse map pulls K back by e^{-duration}.
  const cplx rot(std::cos(u), std::sin(u));
  const cplx wr = w / rot;
  const cplx one(1.0, 0.0);
  const cplx denom = (one + wr) * (one + wr);
  if (std::abs(denom) < 1e-12)
    fail(ErrorCode::numerical, "radial slit map: point at the critical angle");
  const cplx zeta = std::exp(-duration) * wr / denom;
  if (std::abs(zeta) < 1e-12)
    fail(ErrorCode::numerical, "radial slit map: degenerate Koebe value");
  // Roots of zeta v^2 + (2 zeta - 1) v + zeta = 0 multiply to 1; take the
  // exterior one.
  const cplx disc = std::sqrt(one - 4.0 * zeta);
  const cplx q = one - 2.0 * zeta;
  cplx v = (q + disc) / (2.0 * zeta);
  if (std::abs(v) < 1.0) v = (q - disc) / (2.0 * zeta);
  return v * rot;
}

PlanarPath whole_plane_trace(double kappa, double horizon, double dt, std::uint64_t seed,
                             int stride) {
  if (!(kappa >= 0.0)) fail(ErrorCode::invalid_parameter, "kappa must be nonnegative");
  if (!(dt > 0.0) || !(horizon >= dt))
    fail(ErrorCode::invalid_parameter, "need dt > 0 and horizon >= dt");
  if (stride < 1) fail(ErrorCode::invalid_parameter, "stride must be >= 1");

  // Start time -T0 with e^{-T0} < dt; the seed hull is the disk of that
  // capacity and contributes the front factor e^{-T0}.
  const double t0 = -(std::log(1.0 / dt) + 1.0);
  const std::size_t steps = static_cast<std::size_t>(std::llround(horizon / dt));
  Rng rng(seed);
  std::vector<double> u(steps + 1);
  u[0] = 0.0;
  const double scale = std::sqrt(kappa * dt);
  for (std::size_t k = 1; k <= steps; ++k) u[k] = u[k - 1] + scale * rng.gaussian();

  const double front = std::exp(t0);
  std::vector<Vec2> pts;
  pts.reserve(steps / stride + 1);
  for (std::size_t m = stride; m <= steps; m += stride) {
    cplx w(std::cos(u[m]), std::sin(u[m]));
    for (std::size_t k = m + 1; k-- > 1;) w = radial_slit_map(w, u[k], dt);
    check_step(w, m);
    w *= front;
    pts.push_back({w.real(), w.imag()});
  }
  if (pts.size() < 2) fail(ErrorCode::invalid_parameter, "horizon too short for this stride");
  return make_path(std::move(pts), PathKind::sle_trace);
}

ThetaPath theta_diffusion(double kappa, double theta0, double horizon, double dt,
                          std::uint64_t seed) {
  if (!(kappa > 0.0)) fail(ErrorCode::invalid_parameter, "kappa must be positive");
  if (!(theta0 > 0.0 && theta0 < std::numbers::pi))
    fail(ErrorCode::invalid_parameter, "theta0 must lie in (0, pi)");
  if (!(dt > 0.0) || !(horizon >= dt))
    fail(ErrorCode::invalid_parameter, "need dt > 0 and horizon >= dt");

  const double drift_coef = 1.0 - 4.0 / kappa;
  const std::size_t steps = static_cast<std::size_t>(std::llround(horizon / dt));
  Rng rng(seed);

  ThetaPath path;
  path.kappa = kappa;
  path.times.reserve(steps + 1);
  path.values.reserve(steps + 1);
  path.times.push_back(0.0);
  path.values.push_back(theta0);

  double theta = theta0;
  for (std::size_t k = 1; k <= steps; ++k) {
    double remaining = dt;
    while (remaining > 0.0) {
      const double boundary_gap = std::min(theta, std::numbers::pi - theta);
      const double drift = drift_coef * (std::cos(theta) / std::sin(theta));
      double h = remaining;
      // Halve the substep while the drift move overshoots half the gap.
      while (std::abs(drift) * h > 0.5 * boundary_gap && h > dt * 0x1.0p-30) h *= 0.5;
      if (h <= dt * 0x1.0p-30) {
        // Drift pinned against the boundary: treat as absorbed.
        path.absorbed = true;
        path.absorbed_at = theta < std::numbers::pi / 2 ? 0.0 : std::numbers::pi;
        path.absorption_time = path.times.back();
        return path;
      }
      theta += drift * h + std::sqrt(h) * rng.gaussian();
      if (theta <= 0.0 || theta >= std::numbers::pi) {
        path.absorbed = true;
        path.absorbed_at = theta <= 0.0 ? 0.0 : std::numbers::pi;
        path.absorption_time = path.times.back() + (dt - remaining) + h;
        return path;
      }
      remaining -= h;
    }
    path.times.push_back(k * dt);
    path.values.push_back(theta);
  }
  return path;
}

void export_trace_csv(const PlanarPath& path, const std::vector<double>& times,
                      const std::string& file) {
  if (times.size() != path.vertices.size())
    fail(ErrorCode::invalid_parameter, "trace time index size mismatch");
  FileWriter out(file);
  std::string header = "index,t,x,y\n";
  out.write_bytes(header.data(), header.size());
  char buf[128];
  for (std::size_t i = 0; i < path.vertices.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i, times[i], path.vertices[i].x,
                  path.vertices[i].y);
    out.write_bytes(buf, std::strlen(buf));
  }
}

}  // namespace lqglab::loewner
