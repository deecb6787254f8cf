#include "artnav/reachability.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "artnav/errors.hpp"
#include "artnav/key_value.hpp"

namespace artnav {

RobotShape RobotShape::anymal_like() {
  RobotShape s;
  s.torso_boxes = {BodyBox{{0.0, 0.0, 0.0}, {0.45, 0.20, 0.15}}};
  const Vec3 limb_half{0.16, 0.14, 0.25};
  s.limb_boxes[static_cast<int>(Limb::kLeftFront)] = {{0.36, 0.22, -0.45}, limb_half};
  s.limb_boxes[static_cast<int>(Limb::kRightFront)] = {{0.36, -0.22, -0.45}, limb_half};
  s.limb_boxes[static_cast<int>(Limb::kLeftHind)] = {{-0.36, 0.22, -0.45}, limb_half};
  s.limb_boxes[static_cast<int>(Limb::kRightHind)] = {{-0.36, -0.22, -0.45}, limb_half};
  s.min_contact_cells = 4;
  return s;
}

void RobotShape::validate() const {
  const auto positive = [](const BodyBox& b) {
    return b.half_extents.x > 0.0 && b.half_extents.y > 0.0 && b.half_extents.z > 0.0;
  };
  if (torso_boxes.empty()) throw std::invalid_argument("robot shape: at least one torso box required");
  if (!std::all_of(torso_boxes.begin(), torso_boxes.end(), positive) ||
      !std::all_of(limb_boxes.begin(), limb_boxes.end(), positive)) {
    throw std::invalid_argument("robot shape: half-extents must be positive");
  }
  if (min_contact_cells < 1) throw std::invalid_argument("robot shape: min_contact_cells must be >= 1");
}

std::array<double, 4> RobotShape::torso_footprint() const {
  std::array<double, 4> r{1e300, -1e300, 1e300, -1e300};
  for (const auto& b : torso_boxes) {
    r[0] = std::min(r[0], b.center.x - b.half_extents.x);
    r[1] = std::max(r[1], b.center.x + b.half_extents.x);
    r[2] = std::min(r[2], b.center.y - b.half_extents.y);
    r[3] = std::max(r[3], b.center.y + b.half_extents.y);
  }
  return r;
}

RobotShape RobotShape::with_shrunk_torso(double amount) const {
  RobotShape s = *this;
  constexpr double kMinHalf = 1e-3;
  for (auto& b : s.torso_boxes) {
    b.half_extents.x = std::max(kMinHalf, b.half_extents.x - 0.5 * amount);
    b.half_extents.y = std::max(kMinHalf, b.half_extents.y - 0.5 * amount);
    b.half_extents.z = std::max(kMinHalf, b.half_extents.z - 0.5 * amount);
  }
  return s;
}

const char* to_string(PoseVerdict v) {
  switch (v) {
    case PoseVerdict::kValid: return "valid";
    case PoseVerdict::kTorsoCollision: return "torso-collision";
    case PoseVerdict::kLimbUnreachable: return "limb-unreachable";
  }
  return "?";
}

std::array<double, 9> rotation_matrix(double yaw, double pitch, double roll) {
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cr = std::cos(roll), sr = std::sin(roll);
  return {cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
          sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
          -sp,     cp * sr,                cp * cr};
}

namespace {

// Visits cells whose centers fall in the world-aligned rectangle [x0,x1]x[y0,y1].
template <typename F>
void for_cells_in_rect(const HeightMap& map, double x0, double x1, double y0, double y1, F&& f) {
  const double res = map.resolution();
  const Vec2 o = map.origin();
  const int ix0 = std::max(0, static_cast<int>(std::ceil((x0 - o.x) / res - 1e-9)));
  const int ix1 = std::min(map.size_x() - 1, static_cast<int>(std::floor((x1 - o.x) / res + 1e-9)));
  const int iy0 = std::max(0, static_cast<int>(std::ceil((y0 - o.y) / res - 1e-9)));
  const int iy1 = std::min(map.size_y() - 1, static_cast<int>(std::floor((y1 - o.y) / res + 1e-9)));
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      if (!f(CellIndex{ix, iy})) return;
    }
  }
}

struct PosedBox {
  std::array<double, 9> rot;
  Vec3 center;
  Vec3 half;
  double reach_x;
  double reach_y;
};

PosedBox pose_box(const Pose& pose, const BodyBox& box, const std::array<double, 9>& r) {
  const Vec3& c = box.center;
  const Vec3& h = box.half_extents;
  PosedBox pb;
  pb.rot = r;
  pb.center = {pose.x + r[0] * c.x + r[1] * c.y + r[2] * c.z,
               pose.y + r[3] * c.x + r[4] * c.y + r[5] * c.z,
               pose.z + r[6] * c.x + r[7] * c.y + r[8] * c.z};
  pb.half = h;
  pb.reach_x = std::abs(r[0]) * h.x + std::abs(r[1]) * h.y + std::abs(r[2]) * h.z;
  pb.reach_y = std::abs(r[3]) * h.x + std::abs(r[4]) * h.y + std::abs(r[5]) * h.z;
  return pb;
}

// Intersection of the vertical line through (cx, cy) with the posed box,
// computed in the box frame as three slabs.
std::optional<std::pair<double, double>> column_through(const PosedBox& b, double cx, double cy) {
  const auto& r = b.rot;
  const double px = cx - b.center.x;
  const double py = cy - b.center.y;
  const double pz = -b.center.z;
  const std::array<double, 3> q0{r[0] * px + r[3] * py + r[6] * pz,
                                 r[1] * px + r[4] * py + r[7] * pz,
                                 r[2] * px + r[5] * py + r[8] * pz};
  const std::array<double, 3> d{r[6], r[7], r[8]};
  const std::array<double, 3> h{b.half.x, b.half.y, b.half.z};
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    if (d[k] == 0.0) {
      if (std::abs(q0[k]) > h[k]) return std::nullopt;
      continue;
    }
    double a = (-h[k] - q0[k]) / d[k];
    double bnd = (h[k] - q0[k]) / d[k];
    if (a > bnd) std::swap(a, bnd);
    lo = std::max(lo, a);
    hi = std::min(hi, bnd);
  }
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

bool box_collides(const HeightMap& map, const PosedBox& b) {
  bool hit = false;
  for_cells_in_rect(map, b.center.x - b.reach_x, b.center.x + b.reach_x, b.center.y - b.reach_y,
                    b.center.y + b.reach_y, [&](CellIndex c) {
                      const double e = map.effective_elevation(c);
                      if (!is_known(e)) return true;
                      const Vec2 p = map.cell_center(c);
                      const auto span = column_through(b, p.x, p.y);
                      if (span && e > span->first) hit = true;
                      return !hit;
                    });
  return hit;
}

int contact_cells(const HeightMap& map, const PosedBox& b, int needed) {
  int count = 0;
  for_cells_in_rect(map, b.center.x - b.reach_x, b.center.x + b.reach_x, b.center.y - b.reach_y,
                    b.center.y + b.reach_y, [&](CellIndex c) {
                      if (!map.steppable(c)) return true;
                      const double e = map.effective_elevation(c);
                      if (!is_known(e)) return true;
                      const Vec2 p = map.cell_center(c);
                      const auto span = column_through(b, p.x, p.y);
                      if (span && e >= span->first && e <= span->second) ++count;
                      return count < needed;
                    });
  return count;
}

}  // namespace

std::optional<std::pair<double, double>> column_interval(const Pose& pose, const BodyBox& box, double cx,
                                                         double cy) {
  return column_through(pose_box(pose, box, rotation_matrix(pose.yaw, pose.pitch, pose.roll)), cx, cy);
}

std::optional<Pose> augment_pose(const HeightMap& map, const RobotShape& shape, double x, double y, double yaw,
                                 double h_torso) {
  yaw = wrap_angle(yaw);
  const auto fp = shape.torso_footprint();
  const double c = std::cos(yaw), s = std::sin(yaw);
  const double reach = std::max(std::hypot(fp[0], fp[2]),
                                std::max(std::hypot(fp[0], fp[3]), std::max(std::hypot(fp[1], fp[2]), std::hypot(fp[1], fp[3]))));

  // Centered least squares for z = a + b*dx + c*dy.
  struct Sample {
    double dx, dy, z;
  };
  std::vector<Sample> samples;
  for_cells_in_rect(map, x - reach, x + reach, y - reach, y + reach, [&](CellIndex cell) {
    if (!map.steppable(cell)) return true;
    const double e = map.effective_elevation(cell);
    if (!is_known(e)) return true;
    const Vec2 p = map.cell_center(cell);
    const double dx = p.x - x, dy = p.y - y;
    const double u = c * dx + s * dy;
    const double v = -s * dx + c * dy;
    if (u >= fp[0] && u <= fp[1] && v >= fp[2] && v <= fp[3]) samples.push_back({dx, dy, e});
    return true;
  });
  if (samples.size() < 3) return std::nullopt;

  double mx = 0.0, my = 0.0, mz = 0.0;
  for (const auto& p : samples) {
    mx += p.dx;
    my += p.dy;
    mz += p.z;
  }
  const double n = static_cast<double>(samples.size());
  mx /= n;
  my /= n;
  mz /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0, sxz = 0.0, syz = 0.0;
  for (const auto& p : samples) {
    const double ux = p.dx - mx, uy = p.dy - my, uz = p.z - mz;
    sxx += ux * ux;
    sxy += ux * uy;
    syy += uy * uy;
    sxz += ux * uz;
    syz += uy * uz;
  }
  const double det = sxx * syy - sxy * sxy;
  if (!(det > 1e-12 * std::max(1e-300, sxx * syy))) return std::nullopt;
  const double gb = (sxz * syy - syz * sxy) / det;
  const double gc = (syz * sxx - sxz * sxy) / det;
  const double ground = mz - gb * mx - gc * my;

  const double gx = gb * c + gc * s;
  const double gy = -gb * s + gc * c;
  Pose pose;
  pose.x = x;
  pose.y = y;
  pose.z = ground + h_torso;
  pose.yaw = yaw;
  pose.pitch = std::clamp(-std::atan(gx), -kMaxTilt, kMaxTilt);
  pose.roll = std::clamp(std::atan(gy / std::sqrt(1.0 + gx * gx)), -kMaxTilt, kMaxTilt);
  return pose;
}

bool torso_in_collision(const HeightMap& map, const RobotShape& shape, const Pose& pose) {
  const auto r = rotation_matrix(pose.yaw, pose.pitch, pose.roll);
  return std::any_of(shape.torso_boxes.begin(), shape.torso_boxes.end(),
                     [&](const BodyBox& b) { return box_collides(map, pose_box(pose, b, r)); });
}

PoseVerdict check_pose(const HeightMap& map, const RobotShape& shape, const Pose& pose) {
  if (torso_in_collision(map, shape, pose)) return PoseVerdict::kTorsoCollision;
  const auto r = rotation_matrix(pose.yaw, pose.pitch, pose.roll);
  for (const auto& limb : shape.limb_boxes) {
    if (contact_cells(map, pose_box(pose, limb, r), shape.min_contact_cells) < shape.min_contact_cells) {
      return PoseVerdict::kLimbUnreachable;
    }
  }
  return PoseVerdict::kValid;
}

// ---------------------------------------------------------------------------

RobotShape read_shape(std::istream& in, const std::string& source) {
  const KeyValueFile kv = KeyValueFile::parse(in, source);
  kv.reject_unknown({"torso_box", "limb_box_lf", "limb_box_rf", "limb_box_lh", "limb_box_rh", "min_contact_cells"});
  RobotShape shape = RobotShape::anymal_like();

  const auto parse_box = [&](const KeyValueEntry& e) {
    std::vector<double> v;
    try {
      v = parse_doubles(e.value);
    } catch (const FormatError& ex) {
      kv.fail(e, ex.what());
    }
    if (v.size() != 6) kv.fail(e, "expected 'cx cy cz hx hy hz'");
    return BodyBox{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
  };

  bool torso_reset = false;
  for (const auto& e : kv.entries()) {
    if (e.key == "torso_box") {
      if (!torso_reset) {
        shape.torso_boxes.clear();
        torso_reset = true;
      }
      shape.torso_boxes.push_back(parse_box(e));
    } else if (e.key == "limb_box_lf") {
      shape.limb_boxes[0] = parse_box(e);
    } else if (e.key == "limb_box_rf") {
      shape.limb_boxes[1] = parse_box(e);
    } else if (e.key == "limb_box_lh") {
      shape.limb_boxes[2] = parse_box(e);
    } else if (e.key == "limb_box_rh") {
      shape.limb_boxes[3] = parse_box(e);
    }
  }
  shape.min_contact_cells = kv.get_int("min_contact_cells", shape.min_contact_cells);
  try {
    shape.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(source + ": " + e.what());
  }
  return shape;
}

RobotShape load_shape(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open shape '" + path.string() + "'");
  return read_shape(in, path.string());
}

void write_shape(std::ostream& out, const RobotShape& shape) {
  const auto box = [&](const char* key, const BodyBox& b) {
    out << key << " = " << format_double(b.center.x) << ' ' << format_double(b.center.y) << ' '
        << format_double(b.center.z) << ' ' << format_double(b.half_extents.x) << ' '
        << format_double(b.half_extents.y) << ' ' << format_double(b.half_extents.z) << '\n';
  };
  for (const auto& b : shape.torso_boxes) box("torso_box", b);
  box("limb_box_lf", shape.limb_boxes[0]);
  box("limb_box_rf", shape.limb_boxes[1]);
  box("limb_box_lh", shape.limb_boxes[2]);
  box("limb_box_rh", shape.limb_boxes[3]);
  out << "min_contact_cells = " << shape.min_contact_cells << '\n';
}

}  // namespace artnav
