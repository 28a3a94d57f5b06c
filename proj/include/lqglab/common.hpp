#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lqglab {

/// Error categories shared by the C++ core and the C API.
enum class ErrorCode : int {
  ok = 0,
  invalid_parameter = 1,
  out_of_domain = 2,
  resolution = 3,
  numerical = 4,
  degenerate_input = 5,
  io = 6,
  divergent_walker = 7,
};

/// Exception carrying an ErrorCode; the C boundary maps it to an int code
/// plus a retrievable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double a) const { return {x * a, y * a}; }
  bool operator==(const Vec2&) const = default;

  double norm2() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
};

inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
  bool contains_strict(Vec2 p) const { return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1; }
};

}  // namespace lqglab
