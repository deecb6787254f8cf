#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

using artnav::CellIndex;
using artnav::is_known;
using artnav::kUnknown;

Mask dilate(const Mask& m, int sx, int sy, double r) {
  Mask out(m.size(), 0);
  const double r2 = r * r + 1e-9;
  for (int y = 0; y < sy; ++y) {
    for (int x = 0; x < sx; ++x) {
      for (int v = 0; v < sy && !out[y * sx + x]; ++v) {
        for (int u = 0; u < sx; ++u) {
          if (m[v * sx + u] && double((u - x) * (u - x) + (v - y) * (v - y)) <= r2) {
            out[y * sx + x] = 1;
            break;
          }
        }
      }
    }
  }
  return out;
}

Mask erode(const Mask& m, int sx, int sy, double r) {
  Mask complement(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) complement[i] = m[i] ? 0 : 1;
  const Mask grown = dilate(complement, sx, sy, r);
  const double r2 = r * r + 1e-9;
  Mask out(m.size(), 0);
  for (int y = 0; y < sy; ++y) {
    for (int x = 0; x < sx; ++x) {
      // Nearest outside cells sit one step beyond each border.
      const double border = std::min({x + 1, y + 1, sx - x, sy - y});
      const bool near_outside = border * border <= r2;
      out[y * sx + x] = (grown[y * sx + x] || near_outside) ? 0 : 1;
    }
  }
  return out;
}

std::vector<double> virtual_surfaces(const HeightMap& map, const artnav::PointCloud& cloud) {
  std::vector<double> ub(map.upper_bound_layer().begin(), map.upper_bound_layer().end());
  const double h = 0.5 * map.resolution();
  const artnav::Vec3 s = cloud.sensor_origin;
  for (const auto& q : cloud.points) {
    const double dx = q.x - s.x, dy = q.y - s.y;
    if (dx == 0.0 && dy == 0.0) continue;
    const CellIndex end = map.nearest_cell(q.x, q.y);
    for (int iy = 0; iy < map.size_y(); ++iy) {
      for (int ix = 0; ix < map.size_x(); ++ix) {
        if (ix == end.ix && iy == end.iy) continue;
        const artnav::Vec2 c = map.cell_center({ix, iy});
        // Liang-Barsky clip of the planar segment against the cell square.
        double t0 = 0.0, t1 = 1.0;
        const double p[4] = {-dx, dx, -dy, dy};
        const double qq[4] = {s.x - (c.x - h), (c.x + h) - s.x, s.y - (c.y - h), (c.y + h) - s.y};
        bool hit = true;
        for (int k = 0; k < 4 && hit; ++k) {
          if (p[k] == 0.0) {
            if (qq[k] < 0.0) hit = false;
          } else {
            const double t = qq[k] / p[k];
            if (p[k] < 0.0) t0 = std::max(t0, t);
            else t1 = std::min(t1, t);
          }
        }
        if (!hit || !(t1 > t0)) continue;
        const double z = s.z + 0.5 * (t0 + t1) * (q.z - s.z);
        double& u = ub[map.linear({ix, iy})];
        if (!is_known(u) || z < u) u = z;
      }
    }
  }
  return ub;
}

double foothold_score(const HeightMap& map, CellIndex c, const artnav::HeuristicFootholdParams& p) {
  const auto eff = [&](int x, int y) {
    if (!map.contains({x, y})) return kUnknown;
    return map.effective_elevation({x, y});
  };
  const double e = eff(c.ix, c.iy);
  if (!is_known(e)) return kUnknown;
  double slope = 0.0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (!dx && !dy) continue;
      const double n = eff(c.ix + dx, c.iy + dy);
      if (!is_known(n)) continue;
      slope = std::max(slope, std::abs(n - e) / (map.resolution() * std::hypot(dx, dy)));
    }
  }
  std::vector<double> vals;
  for (int dy = -2; dy <= 2; ++dy) {
    for (int dx = -2; dx <= 2; ++dx) {
      const double n = eff(c.ix + dx, c.iy + dy);
      if (is_known(n)) vals.push_back(n);
    }
  }
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= vals.size();
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  const double rough = std::sqrt(var / vals.size());
  const double s = 1.0 - p.w_slope * std::min(slope / p.slope_max, 1.0) - p.w_rough * std::min(rough / p.rough_max, 1.0);
  return std::clamp(s, 0.0, 1.0);
}

namespace {

using M3 = std::array<std::array<double, 3>, 3>;

M3 mul(const M3& a, const M3& b) {
  M3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

M3 rotation(const artnav::Pose& p) {
  const double cy = std::cos(p.yaw), sy = std::sin(p.yaw);
  const double cp = std::cos(p.pitch), sp = std::sin(p.pitch);
  const double cr = std::cos(p.roll), sr = std::sin(p.roll);
  const M3 rz{{{cy, -sy, 0}, {sy, cy, 0}, {0, 0, 1}}};
  const M3 ry{{{cp, 0, sp}, {0, 1, 0}, {-sp, 0, cp}}};
  const M3 rx{{{1, 0, 0}, {0, cr, -sr}, {0, sr, cr}}};
  return mul(rz, mul(ry, rx));
}

}  // namespace

HalfSpaces box_halfspaces(const artnav::Pose& pose, const artnav::BodyBox& box) {
  const M3 r = rotation(pose);
  const double c[3] = {box.center.x, box.center.y, box.center.z};
  const double half[3] = {box.half_extents.x, box.half_extents.y, box.half_extents.z};
  double w[3] = {pose.x, pose.y, pose.z};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) w[i] += r[i][k] * c[k];
  HalfSpaces hs{};
  for (int k = 0; k < 3; ++k) {
    const double axis[3] = {r[0][k], r[1][k], r[2][k]};
    const double proj = axis[0] * w[0] + axis[1] * w[1] + axis[2] * w[2];
    for (int j = 0; j < 3; ++j) {
      hs.n[2 * k][j] = axis[j];
      hs.n[2 * k + 1][j] = -axis[j];
    }
    hs.d[2 * k] = proj + half[k];
    hs.d[2 * k + 1] = -proj + half[k];
  }
  return hs;
}

std::optional<std::pair<double, double>> vertical_span(const HalfSpaces& h, double x, double y) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 6; ++i) {
    const double rhs = h.d[i] - h.n[i][0] * x - h.n[i][1] * y;
    const double nz = h.n[i][2];
    if (nz > 0.0) hi = std::min(hi, rhs / nz);
    else if (nz < 0.0) lo = std::max(lo, rhs / nz);
    else if (rhs < 0.0) return std::nullopt;
  }
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

artnav::PoseVerdict check_pose(const HeightMap& map, const artnav::RobotShape& shape, const artnav::Pose& pose) {
  for (const auto& box : shape.torso_boxes) {
    const HalfSpaces hs = box_halfspaces(pose, box);
    for (int iy = 0; iy < map.size_y(); ++iy) {
      for (int ix = 0; ix < map.size_x(); ++ix) {
        const double e = map.effective_elevation({ix, iy});
        if (!is_known(e)) continue;
        const auto c = map.cell_center({ix, iy});
        const auto span = vertical_span(hs, c.x, c.y);
        if (span && e > span->first) return artnav::PoseVerdict::kTorsoCollision;
      }
    }
  }
  for (const auto& box : shape.limb_boxes) {
    const HalfSpaces hs = box_halfspaces(pose, box);
    int contacts = 0;
    for (int iy = 0; iy < map.size_y(); ++iy) {
      for (int ix = 0; ix < map.size_x(); ++ix) {
        if (!map.steppable({ix, iy})) continue;
        const double e = map.effective_elevation({ix, iy});
        if (!is_known(e)) continue;
        const auto c = map.cell_center({ix, iy});
        const auto span = vertical_span(hs, c.x, c.y);
        if (span && e >= span->first && e <= span->second) ++contacts;
      }
    }
    if (contacts < shape.min_contact_cells) return artnav::PoseVerdict::kLimbUnreachable;
  }
  return artnav::PoseVerdict::kValid;
}

double surrogate_risk(const HeightMap& map, const artnav::RobotShape& shape, const artnav::MotionQuery& q,
                      const artnav::SurrogateParams& p) {
  const auto fp = shape.torso_footprint();
  const double len = std::sqrt(q.dx * q.dx + q.dy * q.dy);
  const int k = len == 0.0 ? 1 : static_cast<int>(std::ceil(len / p.sample_stride)) + 1;
  const double gx = std::cos(q.start_yaw) * q.dx - std::sin(q.start_yaw) * q.dy;
  const double gy = std::sin(q.start_yaw) * q.dx + std::cos(q.start_yaw) * q.dy;
  double survive = 1.0;
  for (int i = 0; i < k; ++i) {
    const double f = k == 1 ? 0.0 : double(i) / (k - 1);
    const double px = q.start.x + f * gx, py = q.start.y + f * gy;
    const double yaw = q.start_yaw + f * q.dyaw;
    double sum = 0.0;
    int n = 0;
    for (int iy = 0; iy < map.size_y(); ++iy) {
      for (int ix = 0; ix < map.size_x(); ++ix) {
        const auto c = map.cell_center({ix, iy});
        const double u = std::cos(yaw) * (c.x - px) + std::sin(yaw) * (c.y - py);
        const double v = -std::sin(yaw) * (c.x - px) + std::cos(yaw) * (c.y - py);
        if (u < fp[0] || u > fp[1] || v < fp[2] || v > fp[3]) continue;
        const double s = map.foothold({ix, iy});
        sum += is_known(s) ? 1.0 - s : 1.0;
        ++n;
      }
    }
    survive *= 1.0 - p.hazard_gain * (sum / n);
  }
  return 1.0 - survive;
}

std::optional<double> shortest_cost(const artnav::NavGraph& g, int from, int to) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.vertex_count(), inf);
  dist[from] = 0.0;
  for (int round = 0; round < g.vertex_count(); ++round) {
    bool changed = false;
    for (const auto& e : g.edges()) {
      if (e.state != artnav::EdgeState::kValid || dist[e.from] == inf) continue;
      if (dist[e.from] + e.combined < dist[e.to]) {
        dist[e.to] = dist[e.from] + e.combined;
        changed = true;
      }
    }
    if (!changed) break;
  }
  if (dist[to] == inf) return std::nullopt;
  return dist[to];
}

HeightMap random_map(std::mt19937_64& rng, int n, double res, double unknown_fraction) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  HeightMap map = HeightMap::centered_at(n, n, res, {0.0, 0.0});
  map.set_sensor_z(0.5);
  const double a = 0.2 * u(rng), fx = 0.5 + u(rng), fy = 0.5 + u(rng);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const auto c = map.cell_center({ix, iy});
      map.set_elevation({ix, iy}, a * std::sin(fx * c.x) * std::cos(fy * c.y));
    }
  }
  const int blocks = 1 + static_cast<int>(u(rng) * 4);
  for (int b = 0; b < blocks; ++b) {
    const int x0 = static_cast<int>(u(rng) * n), y0 = static_cast<int>(u(rng) * n);
    const int w = 1 + static_cast<int>(u(rng) * n / 4), h = 1 + static_cast<int>(u(rng) * n / 4);
    const double z = 0.2 + u(rng) * 0.9;
    for (int iy = y0; iy < std::min(n, y0 + h); ++iy)
      for (int ix = x0; ix < std::min(n, x0 + w); ++ix) map.set_elevation({ix, iy}, z);
  }
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const CellIndex c{ix, iy};
      const double r = u(rng);
      if (r < unknown_fraction) {
        map.set_elevation(c, kUnknown);
        if (u(rng) < 0.5) map.set_upper_bound(c, 0.3 + u(rng));
      }
      const double f = std::min(1.0, 0.2 + 1.2 * u(rng));
      map.set_foothold(c, f);
      map.set_steppable(c, f >= 0.5 && is_known(map.effective_elevation(c)));
    }
  }
  return map;
}

}  // namespace oracle
