#include "lqglab/gff.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "lqglab/rng.hpp"

namespace lqglab::grf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// FFTW planning is not thread-safe; plans are cached per transform size.
std::mutex g_fftw_mutex;

// 2D DST-I (RODFT00) executed through a cached plan.  FFTW's RODFT00 returns
// 4 * sum_{jk} c_{jk} sin(pi (j+1)(x+1)/(m+1)) sin(pi (k+1)(y+1)/(m+1)).
void dst2d_inplace(std::vector<double>& data, int m) {
  static std::map<int, fftw_plan> plans;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    auto it = plans.find(m);
    if (it == plans.end()) {
      plan = fftw_plan_r2r_2d(m, m, data.data(), data.data(), FFTW_RODFT00, FFTW_RODFT00,
                              FFTW_ESTIMATE);
      plans.emplace(m, plan);
    } else {
      plan = it->second;
    }
  }
  fftw_execute_r2r(plan, data.data(), data.data());
}

void ifft2d_inplace(std::vector<std::complex<double>>& data, int n) {
  static std::map<int, fftw_plan> plans;
  fftw_plan plan;
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    auto it = plans.find(n);
    if (it == plans.end()) {
      plan = fftw_plan_dft_2d(n, n, ptr, ptr, FFTW_BACKWARD, FFTW_ESTIMATE);
      plans.emplace(n, plan);
    } else {
      plan = it->second;
    }
  }
  fftw_execute_dft(plan, ptr, ptr);
}

double torus_eigenvalue(int n, int k1, int k2) {
  return 4.0 - 2.0 * std::cos(kTwoPi * k1 / n) - 2.0 * std::cos(kTwoPi * k2 / n);
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Hermitian-symmetric Gaussian spectrum for the torus field.  The draw order
// is fixed (row-major over canonical representatives) so results are
// reproducible bit for bit.
std::vector<std::complex<double>> torus_spectrum(int n, Rng& rng) {
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(n) * n, {0.0, 0.0});
  const double inv_sqrt2 = std::sqrt(0.5);
  for (int k1 = 0; k1 < n; ++k1) {
    for (int k2 = 0; k2 < n; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const int m1 = (n - k1) % n;
      const int m2 = (n - k2) % n;
      const bool self_conjugate = (m1 == k1 && m2 == k2);
      // Visit each +/-k pair once, at its lexicographically first member.
      if (!self_conjugate && (std::make_pair(m1, m2) < std::make_pair(k1, k2))) continue;
      const double sigma = std::sqrt(kTwoPi / torus_eigenvalue(n, k1, k2));
      if (self_conjugate) {
        spec[static_cast<std::size_t>(k1) * n + k2] = {sigma * rng.gaussian(), 0.0};
      } else {
        const std::complex<double> c(sigma * inv_sqrt2 * rng.gaussian(),
                                     sigma * inv_sqrt2 * rng.gaussian());
        spec[static_cast<std::size_t>(k1) * n + k2] = c;
        spec[static_cast<std::size_t>(m1) * n + m2] = std::conj(c);
      }
    }
  }
  return spec;
}

}  // namespace

GridField sample_zero_boundary_gff(int grid_size, double spacing, std::uint64_t seed) {
  if (grid_size < 8)
    fail(ErrorCode::invalid_parameter, "grid_size must be at least 8, got " + std::to_string(grid_size));
  if (!(spacing > 0.0)) fail(ErrorCode::invalid_parameter, "spacing must be positive");

  const int n = grid_size;
  const int m = n - 2;  // interior side
  Rng rng(seed);

  // Spectral coefficients alpha_{jk} * sqrt(2*pi / lambda_{jk}).
  std::vector<double> coeff(static_cast<std::size_t>(m) * m);
  for (int j = 1; j <= m; ++j) {
    const double cj = 2.0 * std::cos(std::numbers::pi * j / (n - 1));
    for (int k = 1; k <= m; ++k) {
      const double lambda = 4.0 - cj - 2.0 * std::cos(std::numbers::pi * k / (n - 1));
      coeff[static_cast<std::size_t>(j - 1) * m + (k - 1)] = rng.gaussian() * std::sqrt(kTwoPi / lambda);
    }
  }
  dst2d_inplace(coeff, m);

  GridField f;
  f.n = n;
  f.spacing = spacing;
  f.origin = {-f.center_index() * spacing, -f.center_index() * spacing};
  f.boundary = BoundaryKind::zero_boundary;
  f.normalization_note = "zero boundary";
  f.values.assign(static_cast<std::size_t>(n) * n, 0.0);
  // Orthonormal eigenvectors carry a 2/(n-1) product normalization; RODFT00
  // contributes a factor 4.
  const double scale = 0.5 / (n - 1);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      f.at(i + 1, j + 1) = scale * coeff[static_cast<std::size_t>(i) * m + j];
  return f;
}

GridField sample_whole_plane_gff(int grid_size, double spacing, std::uint64_t seed) {
  if (grid_size < 8 || !is_power_of_two(grid_size))
    fail(ErrorCode::invalid_parameter,
         "whole-plane sampler needs a power-of-two grid_size >= 8, got " + std::to_string(grid_size));
  if (!(spacing > 0.0)) fail(ErrorCode::invalid_parameter, "spacing must be positive");
  if ((grid_size / 2 - 1) * spacing < 1.0)
    fail(ErrorCode::invalid_parameter,
         "lattice must cover the unit circle about its center to fix the additive constant; "
         "increase grid_size or spacing");

  const int n = grid_size;
  Rng rng(seed);
  auto spec = torus_spectrum(n, rng);
  ifft2d_inplace(spec, n);

  GridField f;
  f.n = n;
  f.spacing = spacing;
  f.origin = {-f.center_index() * spacing, -f.center_index() * spacing};
  f.boundary = BoundaryKind::torus_whole_plane;
  f.normalization_note = "unit-circle average fixed to 0";
  f.values.resize(static_cast<std::size_t>(n) * n);
  const double inv_n = 1.0 / n;
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = spec[i].real() * inv_n;

  // Fix the additive constant: average on the unit circle about the center
  // vanishes.  Requires the unit circle to fit inside the lattice.
  const double avg = circle_average_unchecked(f, f.center(), 1.0);
  for (double& v : f.values) v -= avg;
  return f;
}

std::vector<std::pair<int, double>> circle_average_weights(const GridField& geometry, Vec2 center,
                                                           double radius) {
  const int n = geometry.n;
  const Rect ext = geometry.extent();
  if (center.x - radius < ext.x0 || center.x + radius > ext.x1 || center.y - radius < ext.y0 ||
      center.y + radius > ext.y1)
    fail(ErrorCode::out_of_domain, "circle leaves the grid");
  const int m = static_cast<int>(std::ceil(kTwoPi * radius / geometry.spacing));
  std::vector<double> w(static_cast<std::size_t>(n) * n, 0.0);
  for (int k = 0; k < m; ++k) {
    const double a = kTwoPi * k / m;
    const double fx = (center.x + radius * std::cos(a) - geometry.origin.x) / geometry.spacing;
    const double fy = (center.y + radius * std::sin(a) - geometry.origin.y) / geometry.spacing;
    int j = static_cast<int>(fx);
    int i = static_cast<int>(fy);
    if (j == n - 1) --j;
    if (i == n - 1) --i;
    const double tx = fx - j, ty = fy - i;
    const double p = 1.0 / m;
    w[static_cast<std::size_t>(i) * n + j] += p * (1 - tx) * (1 - ty);
    w[static_cast<std::size_t>(i) * n + j + 1] += p * tx * (1 - ty);
    w[static_cast<std::size_t>(i + 1) * n + j] += p * (1 - tx) * ty;
    w[static_cast<std::size_t>(i + 1) * n + j + 1] += p * tx * ty;
  }
  std::vector<std::pair<int, double>> out;
  for (int idx = 0; idx < n * n; ++idx)
    if (w[idx] != 0.0) out.emplace_back(idx, w[idx]);
  return out;
}

double torus_functional_variance(int grid_size,
                                 const std::vector<std::pair<int, double>>& weights) {
  const int n = grid_size;
  if (!is_power_of_two(n) || n < 8) fail(ErrorCode::invalid_parameter, "grid_size must be a power of two >= 8");
  // Var(w . h) = sum_k (2*pi / lambda_k) |w_hat(k)|^2 / n^2 over nonzero modes,
  // with w_hat(k) = sum_x w_x e^{-2 pi i k.x / n}.
  double var = 0.0;
  for (int k1 = 0; k1 < n; ++k1) {
    for (int k2 = 0; k2 < n; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      std::complex<double> what(0.0, 0.0);
      for (const auto& [idx, w] : weights) {
        const int i = idx / n;
        const int j = idx % n;
        const double phase = -kTwoPi * (static_cast<double>(k1) * i + static_cast<double>(k2) * j) / n;
        what += w * std::complex<double>(std::cos(phase), std::sin(phase));
      }
      var += kTwoPi / torus_eigenvalue(n, k1, k2) * std::norm(what) / (static_cast<double>(n) * n);
    }
  }
  return var;
}

}  // namespace lqglab::grf
