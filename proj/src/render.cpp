#include "lqglab/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "lqglab/io_util.hpp"

namespace lqglab::render {

namespace {

struct Rgb {
  unsigned char r, g, b;
};

// Compact viridis-like ramp; linear interpolation between stops.
Rgb palette(double t) {
  static const Rgb stops[] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int k = std::min(3, static_cast<int>(t));
  const double f = t - k;
  return {static_cast<unsigned char>(stops[k].r + f * (stops[k + 1].r - stops[k].r)),
          static_cast<unsigned char>(stops[k].g + f * (stops[k + 1].g - stops[k].g)),
          static_cast<unsigned char>(stops[k].b + f * (stops[k + 1].b - stops[k].b))};
}

struct Mapping {
  Rect world{};
  int pixels = 0;

  int px(double x) const { return static_cast<int>((x - world.x0) / world.width() * (pixels - 1)); }
  int py(double y) const {
    // y grows upward in the plane, downward in the raster
    return pixels - 1 - static_cast<int>((y - world.y0) / world.height() * (pixels - 1));
  }
};

void draw_line(Image& img, const Mapping& map, Vec2 a, Vec2 b, Rgb color) {
  const int x0 = map.px(a.x), y0 = map.py(a.y), x1 = map.px(b.x), y1 = map.py(b.y);
  const int steps = std::max({std::abs(x1 - x0), std::abs(y1 - y0), 1});
  for (int s = 0; s <= steps; ++s) {
    const double t = static_cast<double>(s) / steps;
    img.set(static_cast<int>(std::lround(x0 + t * (x1 - x0))),
            static_cast<int>(std::lround(y0 + t * (y1 - y0))), color.r, color.g, color.b);
  }
}

void draw_circle(Image& img, const Mapping& map, Vec2 c, double radius, Rgb color) {
  const int n = 256;
  for (int k = 0; k < n; ++k) {
    const double a0 = 2.0 * M_PI * k / n;
    const double a1 = 2.0 * M_PI * (k + 1) / n;
    draw_line(img, map, {c.x + radius * std::cos(a0), c.y + radius * std::sin(a0)},
              {c.x + radius * std::cos(a1), c.y + radius * std::sin(a1)}, color);
  }
}

void draw_marker(Image& img, const Mapping& map, Vec2 c, Rgb color) {
  const int x = map.px(c.x), y = map.py(c.y);
  for (int d = -6; d <= 6; ++d) {
    img.set(x + d, y, color.r, color.g, color.b);
    img.set(x, y + d, color.r, color.g, color.b);
  }
}

Rect square_world(Rect bb) {
  const double w = std::max(bb.x1 - bb.x0, bb.y1 - bb.y0);
  const double pad = 0.05 * (w > 0 ? w : 1.0);
  const double cx = 0.5 * (bb.x0 + bb.x1), cy = 0.5 * (bb.y0 + bb.y1);
  const double h = 0.5 * w + pad;
  return {cx - h, cy - h, cx + h, cy + h};
}

}  // namespace

Image render_field(const grf::GridField& field, int target) {
  const int scale = std::max(1, (target + field.n - 1) / field.n);
  const int size = field.n * scale;
  Image img(size, size);
  double lo = field.values[0], hi = field.values[0];
  for (double v : field.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  for (int i = 0; i < field.n; ++i) {
    for (int j = 0; j < field.n; ++j) {
      const Rgb c = palette((field.at(i, j) - lo) / span);
      for (int dy = 0; dy < scale; ++dy)
        for (int dx = 0; dx < scale; ++dx)
          img.set(j * scale + dx, size - 1 - (i * scale + dy), c.r, c.g, c.b);
    }
  }
  return img;
}

Image render_ball(const lfpp::MetricGraph& graph, const lfpp::MetricBall& ball,
                  const std::vector<PlanarPath>& fan, int target) {
  const int scale = std::max(1, (target + graph.side() - 1) / graph.side());
  const int size = graph.side() * scale;
  Image img(size, size, 245);
  const Mapping map{
      {graph.position(0).x, graph.position(0).y, graph.position(graph.vertex_count() - 1).x,
       graph.position(graph.vertex_count() - 1).y},
      size};
  for (std::size_t k = 0; k < ball.member_vertices.size(); ++k) {
    const int v = ball.member_vertices[k];
    const Rgb c = palette(ball.member_distance[k] / ball.radius);
    const int i = v / graph.side(), j = v % graph.side();
    for (int dy = 0; dy < scale; ++dy)
      for (int dx = 0; dx < scale; ++dx)
        img.set(j * scale + dx, size - 1 - (i * scale + dy), c.r, c.g, c.b);
  }
  for (const auto& p : fan)
    for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i)
      draw_line(img, map, p.vertices[i], p.vertices[i + 1], {20, 20, 20});
  draw_marker(img, map, graph.position(ball.center), {230, 40, 40});
  return img;
}

Image render_trace(const PlanarPath& path, const std::vector<AnnulusOverlay>& annuli,
                   const std::vector<Vec2>& markers, int target) {
  Image img(target, target);
  Rect world = square_world(path.bounding_box());
  for (const auto& a : annuli) {
    world.x0 = std::min(world.x0, a.center.x - a.r_out);
    world.y0 = std::min(world.y0, a.center.y - a.r_out);
    world.x1 = std::max(world.x1, a.center.x + a.r_out);
    world.y1 = std::max(world.y1, a.center.y + a.r_out);
  }
  world = square_world(world);
  const Mapping map{world, target};
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i)
    draw_line(img, map, path.vertices[i], path.vertices[i + 1], {40, 60, 160});
  for (const auto& a : annuli) {
    draw_circle(img, map, a.center, a.r_in, {200, 60, 60});
    draw_circle(img, map, a.center, a.r_out, {200, 60, 60});
  }
  for (Vec2 m : markers) draw_marker(img, map, m, {230, 40, 40});
  return img;
}

Image render_crossing_report(const std::vector<std::pair<Vec2, int>>& per_center, int target) {
  if (per_center.empty()) fail(ErrorCode::invalid_parameter, "empty crossing report");
  Rect bb{per_center[0].first.x, per_center[0].first.y, per_center[0].first.x,
          per_center[0].first.y};
  int max_count = 0;
  Vec2 argmax = per_center[0].first;
  for (const auto& [z, c] : per_center) {
    bb.x0 = std::min(bb.x0, z.x);
    bb.y0 = std::min(bb.y0, z.y);
    bb.x1 = std::max(bb.x1, z.x);
    bb.y1 = std::max(bb.y1, z.y);
    if (c > max_count) {
      max_count = c;
      argmax = z;
    }
  }
  Image img(target, target, 245);
  const Mapping map{square_world(bb), target};
  for (const auto& [z, c] : per_center) {
    const Rgb col = palette(max_count > 0 ? static_cast<double>(c) / max_count : 0.0);
    const int x = map.px(z.x), y = map.py(z.y);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) img.set(x + dx, y + dy, col.r, col.g, col.b);
  }
  draw_marker(img, map, argmax, {230, 40, 40});
  return img;
}

namespace {

[[noreturn]] void parse_failure(const std::string& file, std::size_t byte_offset) {
  fail(ErrorCode::io,
       "parse error at byte " + std::to_string(byte_offset) + " of " + file);
}

}  // namespace

void render_file(const std::string& input, const std::string& style, const std::string& out_png) {
  namespace fs = std::filesystem;
  if (style == "field") {
    write_png(render_field(grf::load_field(input)), out_png);
  } else if (style == "ball") {
    // Ball CSV re-rendered as a scatter; geodesic fan overlaid when the
    // sibling fan file exists.
    const std::string data = read_file(input);
    std::vector<std::pair<Vec2, double>> rows;
    std::size_t pos = data.find('\n');
    if (pos == std::string::npos) fail(ErrorCode::io, "empty ball csv");
    ++pos;
    double max_d = 0;
    while (pos < data.size()) {
      std::size_t end = data.find('\n', pos);
      if (end == std::string::npos) end = data.size();
      double x, y, d;
      if (std::sscanf(data.c_str() + pos, "%lf,%lf,%lf", &x, &y, &d) == 3) {
        rows.push_back({{x, y}, d});
        max_d = std::max(max_d, d);
      } else if (end > pos) {
        parse_failure(input, pos);
      }
      pos = end + 1;
    }
    if (rows.empty()) fail(ErrorCode::io, "no rows in ball csv");
    Rect bb{rows[0].first.x, rows[0].first.y, rows[0].first.x, rows[0].first.y};
    for (const auto& [p, d] : rows) {
      bb.x0 = std::min(bb.x0, p.x);
      bb.y0 = std::min(bb.y0, p.y);
      bb.x1 = std::max(bb.x1, p.x);
      bb.y1 = std::max(bb.y1, p.y);
    }
    const int target = 512;
    Image img(target, target, 245);
    const Mapping map{square_world(bb), target};
    for (const auto& [p, d] : rows) {
      const Rgb c = palette(max_d > 0 ? d / max_d : 0.0);
      const int x = map.px(p.x), y = map.py(p.y);
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) img.set(x + dx, y + dy, c.r, c.g, c.b);
    }
    const fs::path fan_path = fs::path(input).parent_path() /
                              (fs::path(input).stem().string() + "_fan.csv");
    if (fs::exists(fan_path)) {
      const std::string fan = read_file(fan_path.string());
      std::size_t fp = fan.find('\n');
      Vec2 prev{};
      long prev_id = -1;
      ++fp;
      while (fp < fan.size() && fp != std::string::npos) {
        std::size_t end = fan.find('\n', fp);
        if (end == std::string::npos) end = fan.size();
        long id, idx;
        double x, y;
        if (std::sscanf(fan.c_str() + fp, "%ld,%ld,%lf,%lf", &id, &idx, &x, &y) == 4) {
          if (id == prev_id && idx > 0) draw_line(img, map, prev, {x, y}, {20, 20, 20});
          prev = {x, y};
          prev_id = id;
        }
        fp = end + 1;
      }
    }
    write_png(img, out_png);
  } else if (style == "trace") {
    // Accepts both path CSVs (index,x,y,cumulative_length) and trace CSVs
    // (index,t,x,y): locate the x and y columns from the header.
    const std::string data = read_file(input);
    std::size_t pos = data.find('\n');
    if (pos == std::string::npos) fail(ErrorCode::io, "empty trace csv");
    const std::string header = data.substr(0, pos);
    int xcol = -1, ycol = -1, col = 0;
    for (std::size_t start = 0; start <= header.size();) {
      std::size_t comma = header.find(',', start);
      const std::string name =
          header.substr(start, (comma == std::string::npos ? header.size() : comma) - start);
      if (name == "x") xcol = col;
      if (name == "y") ycol = col;
      ++col;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (xcol < 0 || ycol < 0) fail(ErrorCode::io, "trace csv lacks x/y columns");
    std::vector<Vec2> pts;
    ++pos;
    while (pos < data.size()) {
      std::size_t end = data.find('\n', pos);
      if (end == std::string::npos) end = data.size();
      double vals[8];
      int got = 0;
      std::size_t field_start = pos;
      for (int ccol = 0; ccol < 8 && field_start <= end; ++ccol) {
        vals[got++] = std::atof(data.c_str() + field_start);
        const std::size_t comma = data.find(',', field_start);
        if (comma == std::string::npos || comma >= end) break;
        field_start = comma + 1;
      }
      if (got > std::max(xcol, ycol))
        pts.push_back({vals[xcol], vals[ycol]});
      else if (end > pos)
        parse_failure(input, pos);
      pos = end + 1;
    }
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 2) fail(ErrorCode::io, "trace csv has fewer than 2 points");
    write_png(render_trace(make_path(std::move(pts), PathKind::synthetic), {}, {}), out_png);
  } else if (style == "crossings") {
    const std::string data = read_file(input);
    std::vector<std::pair<Vec2, int>> rows;
    std::size_t pos = data.find('\n');
    if (pos == std::string::npos) fail(ErrorCode::io, "empty crossing csv");
    ++pos;
    while (pos < data.size()) {
      std::size_t end = data.find('\n', pos);
      if (end == std::string::npos) end = data.size();
      double x, y;
      int c;
      if (std::sscanf(data.c_str() + pos, "%lf,%lf,%d", &x, &y, &c) == 3)
        rows.push_back({{x, y}, c});
      else if (end > pos)
        parse_failure(input, pos);
      pos = end + 1;
    }
    write_png(render_crossing_report(rows), out_png);
  } else {
    fail(ErrorCode::invalid_parameter,
         "unknown render style '" + style + "' (expected field, ball, trace, or crossings)");
  }
}

}  // namespace lqglab::render
