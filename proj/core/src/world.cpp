#include "artnav/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "artnav/errors.hpp"
#include "artnav/grid_traversal.hpp"

namespace artnav {

GroundTruthWorld::GroundTruthWorld(int size_x, int size_y, double resolution, Vec2 origin, double ground)
    : size_x_(size_x), size_y_(size_y), resolution_(resolution), origin_(origin) {
  if (size_x <= 0 || size_y <= 0 || !(resolution > 0.0)) {
    throw std::invalid_argument("world: size and resolution must be positive");
  }
  const auto n = static_cast<std::size_t>(size_x) * static_cast<std::size_t>(size_y);
  ground_.assign(n, ground);
  ceiling_bottom_.assign(n, kUnknown);
  ceiling_top_.assign(n, kUnknown);
  steppable_.assign(n, 1);
  max_height_ = ground;
}

std::optional<CellIndex> GroundTruthWorld::cell_at(double x, double y) const {
  const CellIndex c{static_cast<int>(std::floor((x - origin_.x) / resolution_ + 0.5)),
                    static_cast<int>(std::floor((y - origin_.y) / resolution_ + 0.5))};
  if (!contains(c)) return std::nullopt;
  return c;
}

void GroundTruthWorld::set_ceiling(CellIndex c, double bottom, double top) {
  if (!(bottom < top)) throw std::invalid_argument("world: ceiling bottom must lie below its top");
  ceiling_bottom_[idx(c)] = bottom;
  ceiling_top_[idx(c)] = top;
  max_height_ = std::max(max_height_, top);
}

void GroundTruthWorld::clear_ceiling(CellIndex c) {
  ceiling_bottom_[idx(c)] = kUnknown;
  ceiling_top_[idx(c)] = kUnknown;
}

std::optional<double> GroundTruthWorld::ground_at(double x, double y) const {
  const auto c = cell_at(x, y);
  if (!c) return std::nullopt;
  return ground(*c);
}

template <typename F>
void GroundTruthWorld::for_rect(double x0, double y0, double x1, double y1, F&& f) {
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  const int ix0 = std::max(0, static_cast<int>(std::ceil((x0 - origin_.x) / resolution_ - 1e-9)));
  const int ix1 = std::min(size_x_ - 1, static_cast<int>(std::floor((x1 - origin_.x) / resolution_ + 1e-9)));
  const int iy0 = std::max(0, static_cast<int>(std::ceil((y0 - origin_.y) / resolution_ - 1e-9)));
  const int iy1 = std::min(size_y_ - 1, static_cast<int>(std::floor((y1 - origin_.y) / resolution_ + 1e-9)));
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) f(CellIndex{ix, iy});
  }
}

void GroundTruthWorld::fill_ground(double x0, double y0, double x1, double y1, double z, bool steppable) {
  for_rect(x0, y0, x1, y1, [&](CellIndex c) {
    set_ground(c, z);
    set_steppable(c, steppable);
  });
}

void GroundTruthWorld::fill_ramp_x(double x0, double y0, double x1, double y1, double z0, double z1,
                                   bool steppable) {
  if (x0 == x1) throw std::invalid_argument("world: ramp needs x0 != x1");
  for_rect(x0, y0, x1, y1, [&](CellIndex c) {
    const double t = (cell_center(c).x - x0) / (x1 - x0);
    set_ground(c, z0 + t * (z1 - z0));
    set_steppable(c, steppable);
  });
}

void GroundTruthWorld::fill_ceiling(double x0, double y0, double x1, double y1, double bottom, double top) {
  for_rect(x0, y0, x1, y1, [&](CellIndex c) { set_ceiling(c, bottom, top); });
}

void GroundTruthWorld::fill_disk(double cx, double cy, double radius, double z, bool steppable) {
  for_rect(cx - radius, cy - radius, cx + radius, cy + radius, [&](CellIndex c) {
    const Vec2 p = cell_center(c);
    if (std::hypot(p.x - cx, p.y - cy) > radius) return;
    set_ground(c, z);
    set_steppable(c, steppable);
  });
}

void GroundTruthWorld::grow_unsteppable(double radius) {
  const Mask blocked = [&] {
    Mask m(steppable_.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = steppable_[i] ? 0 : 1;
    return m;
  }();
  const Mask grown = dilate(blocked, size_x_, size_y_, radius / resolution_);
  for (std::size_t i = 0; i < grown.size(); ++i) {
    if (grown[i]) steppable_[i] = 0;
  }
}

HeightMap GroundTruthWorld::to_height_map() const {
  HeightMap map(size_x_, size_y_, resolution_, origin_);
  map.set_sensor_z(-1e9);
  for (int iy = 0; iy < size_y_; ++iy) {
    for (int ix = 0; ix < size_x_; ++ix) {
      const CellIndex c{ix, iy};
      map.set_elevation(c, ground(c));
      map.set_observed(c, true);
      map.set_foothold(c, steppable(c) ? 1.0 : 0.0);
      map.set_steppable(c, steppable(c));
    }
  }
  return map;
}

// ---------------------------------------------------------------------------

GroundTruthWorld read_world(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 0;
  const auto fail = [&](const std::string& msg) -> FormatError {
    return FormatError(source + ":" + std::to_string(line_no) + ": " + msg);
  };
  std::vector<std::vector<std::string>> commands;
  std::vector<int> command_lines;
  bool have_magic = false;
  int sx = 0, sy = 0;
  double res = 0.0, base = 0.0;
  Vec2 origin{};
  bool have_size = false, have_res = false, have_origin = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (!have_magic) {
      if (tok.size() != 2 || tok[0] != "awd") throw fail("expected 'awd 1'");
      if (tok[1] != "1") throw fail("unsupported world version " + tok[1]);
      have_magic = true;
      continue;
    }
    const auto num = [&](std::size_t k) {
      try {
        const double v = parse_double(tok[k]);
        if (!std::isfinite(v)) throw FormatError("non-finite value");
        return v;
      } catch (const FormatError& e) {
        throw fail(e.what());
      }
    };
    if (tok[0] == "size") {
      if (tok.size() != 3) throw fail("expected 'size <nx> <ny>'");
      sx = static_cast<int>(num(1));
      sy = static_cast<int>(num(2));
      have_size = true;
    } else if (tok[0] == "resolution") {
      if (tok.size() != 2) throw fail("expected 'resolution <m>'");
      res = num(1);
      have_res = true;
    } else if (tok[0] == "origin") {
      if (tok.size() != 3) throw fail("expected 'origin <x> <y>'");
      origin = {num(1), num(2)};
      have_origin = true;
    } else if (tok[0] == "base") {
      if (tok.size() != 2) throw fail("expected 'base <z>'");
      base = num(1);
    } else {
      commands.push_back(tok);
      command_lines.push_back(line_no);
    }
  }
  if (!have_magic) throw FormatError(source + ": empty world file");
  if (!have_size || !have_res || !have_origin) throw FormatError(source + ": size, resolution and origin are required");
  if (sx <= 0 || sy <= 0 || !(res > 0.0)) throw FormatError(source + ": size and resolution must be positive");

  GroundTruthWorld world(sx, sy, res, origin, base);
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const auto& tok = commands[i];
    line_no = command_lines[i];
    const auto num = [&](std::size_t k) {
      try {
        const double v = parse_double(tok[k]);
        if (!std::isfinite(v)) throw FormatError("non-finite value");
        return v;
      } catch (const FormatError& e) {
        throw fail(e.what());
      }
    };
    const auto step_flag = [&](std::size_t k) {
      if (tok[k] == "step") return true;
      if (tok[k] == "nostep") return false;
      throw fail("expected 'step' or 'nostep', got '" + tok[k] + "'");
    };
    const std::string& cmd = tok[0];
    try {
      if (cmd == "ground") {
        if (tok.size() != 7) throw fail("expected 'ground x0 y0 x1 y1 z step|nostep'");
        world.fill_ground(num(1), num(2), num(3), num(4), num(5), step_flag(6));
      } else if (cmd == "ramp_x") {
        if (tok.size() != 8) throw fail("expected 'ramp_x x0 y0 x1 y1 z0 z1 step|nostep'");
        world.fill_ramp_x(num(1), num(2), num(3), num(4), num(5), num(6), step_flag(7));
      } else if (cmd == "ceiling") {
        if (tok.size() != 7) throw fail("expected 'ceiling x0 y0 x1 y1 bottom top'");
        world.fill_ceiling(num(1), num(2), num(3), num(4), num(5), num(6));
      } else if (cmd == "disk") {
        if (tok.size() != 6) throw fail("expected 'disk cx cy r z step|nostep'");
        world.fill_disk(num(1), num(2), num(3), num(4), step_flag(5));
      } else if (cmd == "grow_unsteppable") {
        if (tok.size() != 2) throw fail("expected 'grow_unsteppable r'");
        world.grow_unsteppable(num(1));
      } else {
        throw fail("unknown command '" + cmd + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw fail(e.what());
    }
  }
  return world;
}

GroundTruthWorld load_world(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open world '" + path.string() + "'");
  return read_world(in, path.string());
}

// ---------------------------------------------------------------------------

void SensorModel::validate() const {
  if (!(mount_height > 0.0) || azimuth_count < 1 || elevation_count < 1 || !(max_range > 0.0) ||
      !(azimuth_min <= azimuth_max) || !(elevation_min <= elevation_max) || elevation_min < -1.5707963267948966 ||
      elevation_max > 1.5707963267948966) {
    throw std::invalid_argument("sensor: invalid fan or range");
  }
}

std::optional<Vec3> raycast(const GroundTruthWorld& world, Vec3 origin, Vec3 direction, double max_range) {
  const double norm = std::sqrt(direction.x * direction.x + direction.y * direction.y + direction.z * direction.z);
  if (!(norm > 0.0)) return std::nullopt;
  const Vec3 d{direction.x / norm * max_range, direction.y / norm * max_range, direction.z / norm * max_range};
  const GridGeometry grid{world.origin(), world.resolution(), world.size_x(), world.size_y()};

  std::optional<double> hit_t;
  CellIndex hit_cell{};
  const double ceiling = world.max_height();
  traverse_segment(grid, {origin.x, origin.y}, {origin.x + d.x, origin.y + d.y}, [&](const CellCrossing& c) {
    const double z_in = origin.z + c.t_in * d.z;
    if (d.z >= 0.0 && z_in > ceiling) return false;
    const double z_out = origin.z + c.t_out * d.z;
    std::optional<double> t;
    const double g = world.ground(c.cell);
    if (z_in <= g) {
      t = c.t_in;
    } else if (z_out <= g) {
      t = c.t_in + (g - z_in) / (z_out - z_in) * (c.t_out - c.t_in);
    }
    const double lo = world.ceiling_bottom(c.cell);
    if (is_known(lo)) {
      const double hi = world.ceiling_top(c.cell);
      std::optional<double> tc;
      if (z_in >= lo && z_in <= hi) {
        tc = c.t_in;
      } else if (z_in < lo && z_out >= lo) {
        tc = c.t_in + (lo - z_in) / (z_out - z_in) * (c.t_out - c.t_in);
      } else if (z_in > hi && z_out <= hi) {
        tc = c.t_in + (hi - z_in) / (z_out - z_in) * (c.t_out - c.t_in);
      }
      if (tc && (!t || *tc < *t)) t = tc;
    }
    if (!t) return true;
    hit_t = *t;
    hit_cell = c.cell;
    return false;
  });
  if (!hit_t) return std::nullopt;

  // Face hits land on a cell boundary; keep the point inside the cell it hit.
  const Vec2 center = world.cell_center(hit_cell);
  const double half = 0.5 * world.resolution() * (1.0 - 1e-6);
  Vec3 p{origin.x + *hit_t * d.x, origin.y + *hit_t * d.y, origin.z + *hit_t * d.z};
  p.x = std::clamp(p.x, center.x - half, center.x + half);
  p.y = std::clamp(p.y, center.y - half, center.y + half);
  return p;
}

PointCloud sense(const GroundTruthWorld& world, double x, double y, double yaw, const SensorModel& sensor) {
  PointCloud cloud;
  const double base = world.ground_at(x, y).value_or(0.0);
  cloud.sensor_origin = {x, y, base + sensor.mount_height};
  const auto lerp = [](double a, double b, int i, int n) { return n == 1 ? a : a + (b - a) * i / (n - 1); };
  for (int j = 0; j < sensor.elevation_count; ++j) {
    const double el = lerp(sensor.elevation_min, sensor.elevation_max, j, sensor.elevation_count);
    for (int i = 0; i < sensor.azimuth_count; ++i) {
      const double az = yaw + lerp(sensor.azimuth_min, sensor.azimuth_max, i, sensor.azimuth_count);
      const Vec3 dir{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
      if (auto p = raycast(world, cloud.sensor_origin, dir, sensor.max_range)) cloud.points.push_back(*p);
    }
  }
  return cloud;
}

bool truth_torso_collision(const GroundTruthWorld& world, const RobotShape& shape, const Pose& pose) {
  const auto r = rotation_matrix(pose.yaw, pose.pitch, pose.roll);
  for (const auto& box : shape.torso_boxes) {
    const Vec3& c = box.center;
    const Vec3& h = box.half_extents;
    const double cx = pose.x + r[0] * c.x + r[1] * c.y + r[2] * c.z;
    const double cy = pose.y + r[3] * c.x + r[4] * c.y + r[5] * c.z;
    const double reach_x = std::abs(r[0]) * h.x + std::abs(r[1]) * h.y + std::abs(r[2]) * h.z;
    const double reach_y = std::abs(r[3]) * h.x + std::abs(r[4]) * h.y + std::abs(r[5]) * h.z;
    const double res = world.resolution();
    const Vec2 o = world.origin();
    const int ix0 = std::max(0, static_cast<int>(std::ceil((cx - reach_x - o.x) / res - 1e-9)));
    const int ix1 = std::min(world.size_x() - 1, static_cast<int>(std::floor((cx + reach_x - o.x) / res + 1e-9)));
    const int iy0 = std::max(0, static_cast<int>(std::ceil((cy - reach_y - o.y) / res - 1e-9)));
    const int iy1 = std::min(world.size_y() - 1, static_cast<int>(std::floor((cy + reach_y - o.y) / res + 1e-9)));
    for (int iy = iy0; iy <= iy1; ++iy) {
      for (int ix = ix0; ix <= ix1; ++ix) {
        const CellIndex cell{ix, iy};
        const Vec2 p = world.cell_center(cell);
        const auto span = column_interval(pose, box, p.x, p.y);
        if (!span) continue;
        if (world.ground(cell) > span->first) return true;
        const double lo = world.ceiling_bottom(cell);
        if (is_known(lo) && lo < span->second && world.ceiling_top(cell) > span->first) return true;
      }
    }
  }
  return false;
}

}  // namespace artnav
