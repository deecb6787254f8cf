#include "artnav/map_pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "artnav/errors.hpp"
#include "artnav/grid_traversal.hpp"

namespace artnav {

void CeilingFilterParams::validate() const {
  if (!(h_near > 0.0) || !(slope >= 0.0) || !(h_cap >= h_near) || !std::isfinite(d_0)) {
    throw std::invalid_argument("ceiling filter: need h_near > 0, slope >= 0, h_cap >= h_near");
  }
}

void SafetyParams::validate() const {
  if (!(r_dilate > 0.0) || !(r_dilate < r_erode) || !(s_min > 0.0) || !(s_min < 1.0)) {
    throw std::invalid_argument("safety margin: need 0 < r_dilate < r_erode and 0 < s_min < 1");
  }
}

double ceiling_threshold(double distance_xy, const CeilingFilterParams& p) {
  return std::min(p.h_cap, p.h_near + p.slope * std::max(0.0, distance_xy - p.d_0));
}

PointCloud ceiling_filter(const PointCloud& cloud, double robot_base_z, Vec2 robot_xy,
                          const CeilingFilterParams& p) {
  PointCloud out;
  out.sensor_origin = cloud.sensor_origin;
  out.points.reserve(cloud.points.size());
  for (const Vec3& q : cloud.points) {
    const double dist = std::hypot(q.x - robot_xy.x, q.y - robot_xy.y);
    if (q.z <= robot_base_z + ceiling_threshold(dist, p)) out.points.push_back(q);
  }
  return out;
}

void integrate_cloud(HeightMap& map, const PointCloud& cloud) {
  for (const Vec3& q : cloud.points) {
    const auto cell = map.world_to_cell(q.x, q.y);
    if (!cell) continue;
    const double current = map.elevation(*cell);
    if (!is_known(current) || q.z > current) map.set_elevation(*cell, q.z);
    map.set_observed(*cell, true);
  }
}

void compute_virtual_surfaces(HeightMap& map, const PointCloud& cloud) {
  const GridGeometry grid = GridGeometry::of(map);
  const Vec3 s = cloud.sensor_origin;
  for (const Vec3& q : cloud.points) {
    const CellIndex end_cell = map.nearest_cell(q.x, q.y);
    traverse_segment(grid, {s.x, s.y}, {q.x, q.y}, [&](const CellCrossing& c) {
      if (c.cell == end_cell) return true;
      const double t_mid = 0.5 * (c.t_in + c.t_out);
      const double z = s.z + t_mid * (q.z - s.z);
      const double ub = map.upper_bound(c.cell);
      if (!is_known(ub) || z < ub) map.set_upper_bound(c.cell, z);
      return true;
    });
  }
}

double heuristic_foothold_score(double slope, double roughness, const HeuristicFootholdParams& p) {
  const double s = 1.0 - p.w_slope * std::min(slope / p.slope_max, 1.0) -
                   p.w_rough * std::min(roughness / p.rough_max, 1.0);
  return std::clamp(s, 0.0, 1.0);
}

void score_footholds(HeightMap& map, const FootholdModel& model) {
  if (model.kind == FootholdModel::Kind::kMlp) {
    if (!model.weights) throw std::invalid_argument("foothold model: mlp selected but no weights loaded");
    if (model.weights->input_size() != FootholdModel::kMlpInputs || model.weights->output_size() != 1) {
      throw std::invalid_argument("foothold model: mlp must map 50 inputs to 1 output");
    }
  }

  const int sx = map.size_x();
  const int sy = map.size_y();
  std::vector<double> effective(map.cell_count());
  for (int iy = 0; iy < sy; ++iy) {
    for (int ix = 0; ix < sx; ++ix) effective[map.linear({ix, iy})] = map.effective_elevation({ix, iy});
  }
  const auto eff = [&](int ix, int iy) {
    if (ix < 0 || iy < 0 || ix >= sx || iy >= sy) return kUnknown;
    return effective[map.linear({ix, iy})];
  };

  const double res = map.resolution();
  const double diag = res * std::sqrt(2.0);
  std::vector<double> input(FootholdModel::kMlpInputs);

  for (int iy = 0; iy < sy; ++iy) {
    for (int ix = 0; ix < sx; ++ix) {
      const double e = eff(ix, iy);
      if (!is_known(e)) {
        map.set_foothold({ix, iy}, kUnknown);
        continue;
      }

      double score = 0.0;
      if (model.kind == FootholdModel::Kind::kHeuristic) {
        double slope = 0.0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const double n = eff(ix + dx, iy + dy);
            if (!is_known(n)) continue;
            const double run = (dx != 0 && dy != 0) ? diag : res;
            slope = std::max(slope, std::abs(n - e) / run);
          }
        }
        double sum = 0.0;
        double sum_sq = 0.0;
        int count = 0;
        for (int dy = -2; dy <= 2; ++dy) {
          for (int dx = -2; dx <= 2; ++dx) {
            const double n = eff(ix + dx, iy + dy);
            if (!is_known(n)) continue;
            const double d = n - e;  // centered for numerical stability
            sum += d;
            sum_sq += d * d;
            ++count;
          }
        }
        const double mean = sum / count;
        const double rough = std::sqrt(std::max(0.0, sum_sq / count - mean * mean));
        score = heuristic_foothold_score(slope, rough, model.heuristic);
      } else {
        std::size_t k = 0;
        for (int dy = -2; dy <= 2; ++dy) {
          for (int dx = -2; dx <= 2; ++dx, ++k) {
            const double n = eff(ix + dx, iy + dy);
            input[k] = is_known(n) ? n - e : 0.0;
            input[k + 25] = is_known(n) ? 1.0 : 0.0;
          }
        }
        score = logistic(model.weights->forward(input)[0]);
      }
      map.set_foothold({ix, iy}, score);
    }
  }
}

std::vector<CellIndex> disk_offsets(double radius_cells) {
  std::vector<CellIndex> out;
  const int r = static_cast<int>(std::floor(radius_cells + 1e-9));
  const double r2 = radius_cells * radius_cells * (1.0 + 1e-12) + 1e-12;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (dx * dx + dy * dy <= r2) out.push_back({dx, dy});
    }
  }
  return out;
}

Mask dilate(const Mask& mask, int size_x, int size_y, double radius_cells) {
  const auto disk = disk_offsets(radius_cells);
  Mask out(mask.size(), 0);
  for (int iy = 0; iy < size_y; ++iy) {
    for (int ix = 0; ix < size_x; ++ix) {
      for (const auto& o : disk) {
        const int nx = ix + o.ix;
        const int ny = iy + o.iy;
        if (nx < 0 || ny < 0 || nx >= size_x || ny >= size_y) continue;
        if (mask[static_cast<std::size_t>(ny * size_x + nx)]) {
          out[static_cast<std::size_t>(iy * size_x + ix)] = 1;
          break;
        }
      }
    }
  }
  return out;
}

Mask erode(const Mask& mask, int size_x, int size_y, double radius_cells) {
  const auto disk = disk_offsets(radius_cells);
  Mask out(mask.size(), 0);
  for (int iy = 0; iy < size_y; ++iy) {
    for (int ix = 0; ix < size_x; ++ix) {
      bool keep = true;
      for (const auto& o : disk) {
        const int nx = ix + o.ix;
        const int ny = iy + o.iy;
        if (nx < 0 || ny < 0 || nx >= size_x || ny >= size_y ||
            !mask[static_cast<std::size_t>(ny * size_x + nx)]) {
          keep = false;
          break;
        }
      }
      out[static_cast<std::size_t>(iy * size_x + ix)] = keep ? 1 : 0;
    }
  }
  return out;
}

void apply_safety_margin(HeightMap& map, const SafetyParams& p, bool morphology) {
  const int sx = map.size_x();
  const int sy = map.size_y();
  Mask mask(map.cell_count(), 0);
  for (int iy = 0; iy < sy; ++iy) {
    for (int ix = 0; ix < sx; ++ix) {
      const CellIndex c{ix, iy};
      const double score = map.foothold(c);
      mask[map.linear(c)] = (is_known(score) && score >= p.s_min && is_known(map.effective_elevation(c))) ? 1 : 0;
    }
  }
  if (morphology) {
    const double res = map.resolution();
    mask = erode(dilate(mask, sx, sy, p.r_dilate / res), sx, sy, p.r_erode / res);
    // Closing may bridge cells with no terrain estimate; those stay unsteppable.
    for (int iy = 0; iy < sy; ++iy) {
      for (int ix = 0; ix < sx; ++ix) {
        if (!is_known(map.effective_elevation({ix, iy}))) mask[map.linear({ix, iy})] = 0;
      }
    }
  }
  std::copy(mask.begin(), mask.end(), map.steppable_layer().begin());
}

HeightMap process_frame(const HeightMap& map, const PointCloud& cloud, const RobotFrame& robot,
                        const PipelineParams& params) {
  HeightMap out = map.recentered(robot.xy);
  if (!cloud.points.empty()) {
    const PointCloud filtered = params.flags.ceiling_filter
                                    ? ceiling_filter(cloud, robot.base_z, robot.xy, params.ceiling)
                                    : cloud;
    out.set_sensor_z(filtered.sensor_origin.z);
    integrate_cloud(out, filtered);
    if (params.flags.virtual_surfaces) compute_virtual_surfaces(out, filtered);
  }
  if (!params.flags.virtual_surfaces) {
    // Keeps the ablation exact: bounds recorded earlier must not leak in.
    for (double& ub : out.upper_bound_layer()) ub = kUnknown;
  }
  score_footholds(out, params.foothold);
  apply_safety_margin(out, params.safety, params.flags.safety_margin);
  return out;
}

// ---------------------------------------------------------------------------

PointCloud read_pts(std::istream& in) {
  PointCloud cloud;
  std::string line;
  int line_no = 0;
  bool have_sensor = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const auto num = [&](const std::string& t) {
      double v = 0.0;
      try {
        v = parse_double(t);
      } catch (const FormatError& e) {
        throw FormatError("pts line " + std::to_string(line_no) + ": " + e.what());
      }
      if (!std::isfinite(v)) throw FormatError("pts line " + std::to_string(line_no) + ": non-finite coordinate");
      return v;
    };
    if (!have_sensor) {
      if (tok.size() != 4 || tok[0] != "sensor") {
        throw FormatError("pts line " + std::to_string(line_no) + ": expected 'sensor <x> <y> <z>'");
      }
      cloud.sensor_origin = {num(tok[1]), num(tok[2]), num(tok[3])};
      have_sensor = true;
      continue;
    }
    if (tok.size() != 3) throw FormatError("pts line " + std::to_string(line_no) + ": expected 'x y z'");
    cloud.points.push_back({num(tok[0]), num(tok[1]), num(tok[2])});
  }
  if (!have_sensor) throw FormatError("pts: missing sensor line");
  return cloud;
}

void write_pts(std::ostream& out, const PointCloud& cloud) {
  out << "sensor " << format_double(cloud.sensor_origin.x) << ' ' << format_double(cloud.sensor_origin.y) << ' '
      << format_double(cloud.sensor_origin.z) << '\n';
  for (const auto& p : cloud.points) {
    out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z) << '\n';
  }
}

PointCloud load_pts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open point cloud '" + path.string() + "'");
  return read_pts(in);
}

void save_pts(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  write_pts(out, cloud);
}

}  // namespace artnav
