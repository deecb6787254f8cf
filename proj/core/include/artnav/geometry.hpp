#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace artnav {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Marker for an unknown value in floating point map layers.
inline constexpr double kUnknown = std::numeric_limits<double>::quiet_NaN();

inline bool is_known(double v) { return !std::isnan(v); }

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

inline double planar_distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace artnav
