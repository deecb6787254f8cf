#include "artnav/grid_traversal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace artnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Clips parameter interval [t0, t1] against lo <= a + t*d <= hi.
bool clip_axis(double a, double d, double lo, double hi, double& t0, double& t1) {
  if (d == 0.0) return a >= lo && a <= hi;
  double ta = (lo - a) / d;
  double tb = (hi - a) / d;
  if (ta > tb) std::swap(ta, tb);
  t0 = std::max(t0, ta);
  t1 = std::min(t1, tb);
  return t0 <= t1;
}

}  // namespace

void traverse_segment(const GridGeometry& grid, Vec2 a, Vec2 b,
                      const std::function<bool(const CellCrossing&)>& visit) {
  const double res = grid.resolution;
  const double lo_x = grid.origin.x - 0.5 * res;
  const double lo_y = grid.origin.y - 0.5 * res;
  const double hi_x = lo_x + grid.size_x * res;
  const double hi_y = lo_y + grid.size_y * res;
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;

  if (dx == 0.0 && dy == 0.0) {
    if (a.x < lo_x || a.x >= hi_x || a.y < lo_y || a.y >= hi_y) return;
    const CellIndex c{static_cast<int>(std::floor((a.x - lo_x) / res)),
                      static_cast<int>(std::floor((a.y - lo_y) / res))};
    visit({c, 0.0, 1.0});
    return;
  }

  double t = 0.0;
  double t_end = 1.0;
  if (!clip_axis(a.x, dx, lo_x, hi_x, t, t_end) || !clip_axis(a.y, dy, lo_y, hi_y, t, t_end)) return;
  if (t >= t_end) return;

  // Cell at the midpoint of the first step avoids ambiguity on boundaries.
  const double probe = t + std::min(1e-9, 0.5 * (t_end - t));
  int ix = static_cast<int>(std::floor((a.x + probe * dx - lo_x) / res));
  int iy = static_cast<int>(std::floor((a.y + probe * dy - lo_y) / res));
  ix = std::clamp(ix, 0, grid.size_x - 1);
  iy = std::clamp(iy, 0, grid.size_y - 1);

  const int step_x = dx > 0.0 ? 1 : (dx < 0.0 ? -1 : 0);
  const int step_y = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);

  while (true) {
    const double next_x = step_x == 0 ? kInf : (lo_x + (ix + (step_x > 0 ? 1 : 0)) * res - a.x) / dx;
    const double next_y = step_y == 0 ? kInf : (lo_y + (iy + (step_y > 0 ? 1 : 0)) * res - a.y) / dy;
    const double t_exit = std::min({next_x, next_y, t_end});
    if (t_exit > t) {
      if (!visit({{ix, iy}, t, t_exit})) return;
    }
    if (t_exit >= t_end) return;
    if (next_x <= next_y) ix += step_x;
    if (next_y <= next_x) iy += step_y;
    if (ix < 0 || iy < 0 || ix >= grid.size_x || iy >= grid.size_y) return;
    t = std::max(t, t_exit);
  }
}

}  // namespace artnav
