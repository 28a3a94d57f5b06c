#include "lqglab/grid_field.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>

#include "lqglab/io_util.hpp"

namespace lqglab::grf {

void GridField::validate_geometry() const {
  if (n < 8) fail(ErrorCode::invalid_parameter, "grid side must be at least 8, got " + std::to_string(n));
  if (!(spacing > 0.0)) fail(ErrorCode::invalid_parameter, "spacing must be positive");
  if (values.size() != static_cast<std::size_t>(n) * n)
    fail(ErrorCode::invalid_parameter, "value matrix is not square of the declared side");
  for (double v : values)
    if (!std::isfinite(v)) fail(ErrorCode::invalid_parameter, "field contains a non-finite entry");
}

void GridField::validate() const {
  validate_geometry();
  if (boundary == BoundaryKind::zero_boundary) {
    for (int i = 0; i < n; ++i) {
      if (at(i, 0) != 0.0 || at(i, n - 1) != 0.0 || at(0, i) != 0.0 || at(n - 1, i) != 0.0)
        fail(ErrorCode::invalid_parameter, "zero-boundary field has a nonzero boundary entry");
    }
  } else {
    const double avg = circle_average(*this, center(), 1.0);
    if (std::abs(avg) > 1e-9)
      fail(ErrorCode::invalid_parameter,
           "whole-plane field violates the unit-circle-average convention: avg = " + std::to_string(avg));
  }
}

double interpolate(const GridField& field, Vec2 p) {
  const double fx = (p.x - field.origin.x) / field.spacing;
  const double fy = (p.y - field.origin.y) / field.spacing;
  if (fx < 0.0 || fy < 0.0 || fx > field.n - 1 || fy > field.n - 1)
    fail(ErrorCode::out_of_domain, "interpolation point outside the lattice");
  int j = static_cast<int>(fx);
  int i = static_cast<int>(fy);
  if (j == field.n - 1) --j;
  if (i == field.n - 1) --i;
  const double tx = fx - j;
  const double ty = fy - i;
  const double v00 = field.at(i, j), v01 = field.at(i, j + 1);
  const double v10 = field.at(i + 1, j), v11 = field.at(i + 1, j + 1);
  return (1 - ty) * ((1 - tx) * v00 + tx * v01) + ty * ((1 - tx) * v10 + tx * v11);
}

double circle_average_unchecked(const GridField& field, Vec2 center, double radius) {
  const Rect ext = field.extent();
  if (center.x - radius < ext.x0 || center.x + radius > ext.x1 || center.y - radius < ext.y0 ||
      center.y + radius > ext.y1)
    fail(ErrorCode::out_of_domain, "circle leaves the grid");
  const int m = static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius / field.spacing));
  // Closed circle with equispaced points: the trapezoid rule collapses to a
  // plain mean.
  double sum = 0.0;
  for (int k = 0; k < m; ++k) {
    const double a = 2.0 * std::numbers::pi * k / m;
    sum += interpolate(field, {center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return sum / m;
}

double circle_average(const GridField& field, Vec2 center, double radius) {
  if (radius < 2.0 * field.spacing)
    fail(ErrorCode::invalid_parameter, "circle_average radius must be at least 2*spacing");
  return circle_average_unchecked(field, center, radius);
}

double lqg_measure(const GridField& field, double gamma, const Rect& region) {
  if (!(gamma > 0.0 && gamma < 2.0))
    fail(ErrorCode::invalid_parameter, "gamma must lie in (0, 2), got " + std::to_string(gamma));
  const Rect ext = field.extent();
  if (region.x0 < ext.x0 || region.y0 < ext.y0 || region.x1 > ext.x1 || region.y1 > ext.y1)
    fail(ErrorCode::out_of_domain, "measure region leaves the grid");
  const double s = field.spacing;
  const double cell = s * s * std::pow(s, gamma * gamma / 2.0);
  double total = 0.0;
  for (int i = 0; i < field.n; ++i) {
    const double y = field.origin.y + i * s;
    if (y < region.y0 || y >= region.y1) continue;
    for (int j = 0; j < field.n; ++j) {
      const double x = field.origin.x + j * s;
      if (x < region.x0 || x >= region.x1) continue;
      const double h_s = circle_average_unchecked(field, {x, y}, s);
      total += cell * std::exp(gamma * h_s);
    }
  }
  return total;
}

namespace {
constexpr char kMagic[4] = {'G', 'R', 'F', '1'};
}

void save_field(const GridField& field, const std::string& path) {
  FileWriter out(path);
  out.write_bytes(kMagic, 4);
  out.write_u32(static_cast<std::uint32_t>(field.n));
  out.write_f64(field.spacing);
  out.write_bytes(reinterpret_cast<const char*>(field.values.data()),
                  field.values.size() * sizeof(double));
}

GridField load_field(const std::string& path) {
  FileReader in(path);
  char magic[4];
  in.read_bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) fail(ErrorCode::io, "bad magic in field file " + path);
  GridField f;
  f.n = static_cast<int>(in.read_u32());
  f.spacing = in.read_f64();
  if (f.n < 8 || f.n > (1 << 16)) fail(ErrorCode::io, "implausible grid size in " + path);
  f.values.resize(static_cast<std::size_t>(f.n) * f.n);
  in.read_bytes(reinterpret_cast<char*>(f.values.data()), f.values.size() * sizeof(double));
  // The file format does not carry the origin or boundary kind.  Center the
  // lattice (vertex n/2 at the plane origin) and infer the boundary kind from
  // the boundary entries.
  f.origin = {-f.center_index() * f.spacing, -f.center_index() * f.spacing};
  bool zero_boundary = true;
  for (int i = 0; i < f.n && zero_boundary; ++i)
    zero_boundary = f.at(i, 0) == 0.0 && f.at(i, f.n - 1) == 0.0 && f.at(0, i) == 0.0 &&
                    f.at(f.n - 1, i) == 0.0;
  f.boundary = zero_boundary ? BoundaryKind::zero_boundary : BoundaryKind::torus_whole_plane;
  f.normalization_note = zero_boundary ? "zero boundary" : "unit-circle average fixed to 0";
  f.validate();
  return f;
}

void export_field_csv(const GridField& field, const std::string& path) {
  FileWriter out(path);
  std::string line;
  char buf[32];
  for (int i = 0; i < field.n; ++i) {
    line.clear();
    for (int j = 0; j < field.n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", field.at(i, j));
      if (j) line += ',';
      line += buf;
    }
    line += '\n';
    out.write_bytes(line.data(), line.size());
  }
}

}  // namespace lqglab::grf
