#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "artnav/geometry.hpp"
#include "artnav/terrain_map.hpp"

namespace artnav {

/// Body pose. Rotation is yaw-pitch-roll (Z-Y-X); positive pitch tilts the
/// nose down, so walking up a slope gives a negative pitch.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;
  double roll = 0.0;
  double pitch = 0.0;

  Vec2 xy() const { return {x, y}; }
};

/// Box aligned with the body frame.
struct BodyBox {
  Vec3 center;
  Vec3 half_extents;
};

enum class Limb { kLeftFront = 0, kRightFront = 1, kLeftHind = 2, kRightHind = 3 };

/// Reachability abstraction: torso volumes must be free of geometry, every limb
/// volume must touch steppable geometry.
struct RobotShape {
  std::vector<BodyBox> torso_boxes;
  std::array<BodyBox, 4> limb_boxes{};
  int min_contact_cells = 4;

  static RobotShape anymal_like();
  void validate() const;

  /// Body-frame bounding rectangle of all torso boxes: {min_x, max_x, min_y, max_y}.
  std::array<double, 4> torso_footprint() const;

  /// Copy with torso boxes reduced by `amount` in every dimension (half-extents by amount/2).
  RobotShape with_shrunk_torso(double amount) const;
};

inline constexpr double kDefaultTorsoHeight = 0.55;
inline constexpr double kMaxTilt = 0.6;

enum class PoseVerdict { kValid, kTorsoCollision, kLimbUnreachable };

const char* to_string(PoseVerdict v);

/// Row-major rotation matrix for (yaw, pitch, roll).
std::array<double, 9> rotation_matrix(double yaw, double pitch, double roll);

/// Lifts a planar sample to a 3D pose from a least-squares plane through the
/// steppable cells under the torso footprint. Nullopt when fewer than three
/// supporting cells exist or they do not determine a plane.
std::optional<Pose> augment_pose(const HeightMap& map, const RobotShape& shape, double x, double y, double yaw,
                                 double h_torso = kDefaultTorsoHeight);

/// Vertical extent of a posed box along the world column through (cx, cy).
/// Nullopt if the column misses the box.
std::optional<std::pair<double, double>> column_interval(const Pose& pose, const BodyBox& box, double cx,
                                                         double cy);

PoseVerdict check_pose(const HeightMap& map, const RobotShape& shape, const Pose& pose);

/// Torso part of check_pose only.
bool torso_in_collision(const HeightMap& map, const RobotShape& shape, const Pose& pose);

/// `shape.cfg`: `torso_box = cx cy cz hx hy hz` (repeatable),
/// `limb_box_<lf|rf|lh|rh> = ...`, `min_contact_cells = n`.
RobotShape read_shape(std::istream& in, const std::string& source = "<stream>");
RobotShape load_shape(const std::filesystem::path& path);
void write_shape(std::ostream& out, const RobotShape& shape);

}  // namespace artnav
