#include "lqglab/planar_path.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>

#include "lqglab/io_util.hpp"

namespace lqglab {

Rect PlanarPath::bounding_box() const {
  if (vertices.empty()) return {};
  Rect r{vertices[0].x, vertices[0].y, vertices[0].x, vertices[0].y};
  for (const Vec2& v : vertices) {
    r.x0 = std::min(r.x0, v.x);
    r.y0 = std::min(r.y0, v.y);
    r.x1 = std::max(r.x1, v.x);
    r.y1 = std::max(r.y1, v.y);
  }
  return r;
}

double PlanarPath::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (std::size_t j = i + 1; j < vertices.size(); ++j)
      best = std::max(best, dist(vertices[i], vertices[j]));
  return best;
}

void PlanarPath::validate() const {
  if (vertices.size() < 2) fail(ErrorCode::degenerate_input, "a path needs at least 2 vertices");
  if (cumulative_length.size() != vertices.size())
    fail(ErrorCode::invalid_parameter, "arc-length index size mismatch");
  if (cumulative_length[0] != 0.0) fail(ErrorCode::invalid_parameter, "arc-length index must start at 0");
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    if (vertices[i] == vertices[i - 1])
      fail(ErrorCode::invalid_parameter, "consecutive path vertices coincide");
    if (cumulative_length[i] < cumulative_length[i - 1])
      fail(ErrorCode::invalid_parameter, "arc-length index must be nondecreasing");
  }
}

PlanarPath make_path(std::vector<Vec2> points, PathKind kind) {
  PlanarPath p;
  p.kind = kind;
  p.vertices = std::move(points);
  p.cumulative_length.resize(p.vertices.size());
  if (!p.cumulative_length.empty()) {
    p.cumulative_length[0] = 0.0;
    for (std::size_t i = 1; i < p.vertices.size(); ++i)
      p.cumulative_length[i] = p.cumulative_length[i - 1] + dist(p.vertices[i], p.vertices[i - 1]);
  }
  p.validate();
  return p;
}

PlanarPath reverse_path(const PlanarPath& path) {
  std::vector<Vec2> pts(path.vertices.rbegin(), path.vertices.rend());
  return make_path(std::move(pts), path.kind);
}

void export_path_csv(const PlanarPath& path, const std::string& file) {
  FileWriter out(file);
  std::string line = "index,x,y,cumulative_length\n";
  out.write_bytes(line.data(), line.size());
  char buf[128];
  for (std::size_t i = 0; i < path.vertices.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i, path.vertices[i].x,
                  path.vertices[i].y, path.cumulative_length[i]);
    out.write_bytes(buf, std::strlen(buf));
  }
}

PlanarPath load_path_csv(const std::string& file) {
  const std::string data = read_file(file);
  PlanarPath p;
  std::size_t pos = data.find('\n');
  if (pos == std::string::npos) fail(ErrorCode::io, "empty path csv: " + file);
  ++pos;
  while (pos < data.size()) {
    std::size_t end = data.find('\n', pos);
    if (end == std::string::npos) end = data.size();
    const std::string line = data.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    unsigned long idx;
    double x, y, cl;
    if (std::sscanf(line.c_str(), "%lu,%lf,%lf,%lf", &idx, &x, &y, &cl) != 4)
      fail(ErrorCode::io, "bad path csv line: " + line);
    p.vertices.push_back({x, y});
    p.cumulative_length.push_back(cl);
  }
  p.kind = PathKind::synthetic;
  p.validate();
  return p;
}

}  // namespace lqglab
