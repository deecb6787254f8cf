#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "artnav/geometry.hpp"
#include "artnav/map_pipeline.hpp"
#include "artnav/reachability.hpp"
#include "artnav/terrain_map.hpp"

namespace artnav {

/// Dense truth terrain. Each cell is a solid column up to `ground`; an optional
/// overhang slab occupies [ceiling_bottom, ceiling_top]. `steppable` marks
/// cells a foot may safely use.
class GroundTruthWorld {
 public:
  GroundTruthWorld() = default;
  GroundTruthWorld(int size_x, int size_y, double resolution, Vec2 origin, double ground = 0.0);

  int size_x() const { return size_x_; }
  int size_y() const { return size_y_; }
  double resolution() const { return resolution_; }
  Vec2 origin() const { return origin_; }
  bool contains(CellIndex c) const { return c.ix >= 0 && c.iy >= 0 && c.ix < size_x_ && c.iy < size_y_; }
  Vec2 cell_center(CellIndex c) const { return {origin_.x + resolution_ * c.ix, origin_.y + resolution_ * c.iy}; }
  /// Cell containing the point; cells are centered on their grid coordinates.
  std::optional<CellIndex> cell_at(double x, double y) const;

  double ground(CellIndex c) const { return ground_[idx(c)]; }
  double ceiling_bottom(CellIndex c) const { return ceiling_bottom_[idx(c)]; }
  double ceiling_top(CellIndex c) const { return ceiling_top_[idx(c)]; }
  bool steppable(CellIndex c) const { return steppable_[idx(c)] != 0; }
  void set_ground(CellIndex c, double z) {
    ground_[idx(c)] = z;
    if (z > max_height_) max_height_ = z;
  }
  void set_ceiling(CellIndex c, double bottom, double top);
  void clear_ceiling(CellIndex c);
  void set_steppable(CellIndex c, bool v) { steppable_[idx(c)] = v ? 1 : 0; }

  /// Upper bound on all solid geometry; never lowered.
  double max_height() const { return max_height_; }

  /// Ground height under a point; points outside the world return nullopt.
  std::optional<double> ground_at(double x, double y) const;

  // Rectangle painters. Rectangles are [x0,x1] x [y0,y1] over cell centers.
  void fill_ground(double x0, double y0, double x1, double y1, double z, bool steppable);
  /// Linear ramp along x from z0 at x0 to z1 at x1.
  void fill_ramp_x(double x0, double y0, double x1, double y1, double z0, double z1, bool steppable);
  void fill_ceiling(double x0, double y0, double x1, double y1, double bottom, double top);
  void fill_disk(double cx, double cy, double radius, double z, bool steppable);
  /// Marks cells within `radius` of any unsteppable cell unsteppable too.
  void grow_unsteppable(double radius);

  /// Truth map at the world's own grid: ground as elevation, truth mask as
  /// steppable, foothold 1/0 by mask.
  HeightMap to_height_map() const;

 private:
  std::size_t idx(CellIndex c) const {
    return static_cast<std::size_t>(c.iy) * static_cast<std::size_t>(size_x_) + static_cast<std::size_t>(c.ix);
  }
  template <typename F>
  void for_rect(double x0, double y0, double x1, double y1, F&& f);

  int size_x_ = 0;
  int size_y_ = 0;
  double resolution_ = 0.04;
  Vec2 origin_{};
  std::vector<double> ground_;
  std::vector<double> ceiling_bottom_;
  std::vector<double> ceiling_top_;
  std::vector<std::uint8_t> steppable_;
  double max_height_ = -std::numeric_limits<double>::infinity();
};

/// Line-oriented `awd 1` world file: header keys size, resolution, origin,
/// followed by drawing commands (ground, ramp_x, ceiling, disk, grow_unsteppable).
GroundTruthWorld read_world(std::istream& in, const std::string& source = "<stream>");
GroundTruthWorld load_world(const std::filesystem::path& path);

struct SensorModel {
  double mount_height = 0.55;  // sensor above the robot base [m]
  double azimuth_min = -3.12413936106985;  // relative to robot yaw [rad], -179 deg
  double azimuth_max = 3.141592653589793;
  int azimuth_count = 360;
  double elevation_min = -1.3962634015954636;  // -80 deg
  double elevation_max = 0.4363323129985824;   // 25 deg
  int elevation_count = 211;
  double max_range = 6.0;  // [m]

  void validate() const;
};

/// First intersection of a ray with the world, within max_range.
std::optional<Vec3> raycast(const GroundTruthWorld& world, Vec3 origin, Vec3 direction, double max_range);

/// Raycasts the sensor fan from the robot at (x, y, yaw) standing on the truth ground.
PointCloud sense(const GroundTruthWorld& world, double x, double y, double yaw, const SensorModel& sensor);

/// Torso collision against truth geometry: ground columns and overhang slabs.
bool truth_torso_collision(const GroundTruthWorld& world, const RobotShape& shape, const Pose& pose);

}  // namespace artnav
