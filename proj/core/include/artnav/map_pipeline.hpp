#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "artnav/geometry.hpp"
#include "artnav/mlp.hpp"
#include "artnav/terrain_map.hpp"

namespace artnav {

struct PointCloud {
  Vec3 sensor_origin;
  std::vector<Vec3> points;
};

/// Distance-dependent ceiling threshold, measured from the robot base height.
struct CeilingFilterParams {
  double h_near = 0.8;  // threshold close to the robot [m]
  double d_0 = 1.0;     // distance at which the threshold starts to rise [m]
  double slope = 0.3;   // rise rate [m/m]
  double h_cap = 2.5;   // maximum threshold [m]

  void validate() const;
};

struct SafetyParams {
  double r_dilate = 0.06;  // [m]
  double r_erode = 0.15;   // [m]
  double s_min = 0.5;      // foothold score steppable cutoff

  void validate() const;
};

struct HeuristicFootholdParams {
  double w_slope = 0.7;
  double w_rough = 0.5;
  double slope_max = 0.83909963117728;  // tan(40 deg)
  double rough_max = 0.05;              // [m]
};

/// Foothold scoring model. The heuristic scores slope and roughness; the mlp
/// variant reads the 5x5 effective-elevation neighborhood relative to the
/// center cell (unknown -> 0) plus a 25-value known mask and maps its single
/// output through a logistic.
struct FootholdModel {
  enum class Kind { kHeuristic, kMlp };
  Kind kind = Kind::kHeuristic;
  HeuristicFootholdParams heuristic;
  std::optional<Mlp> weights;

  static constexpr int kMlpInputs = 50;
};

struct PipelineFlags {
  bool ceiling_filter = true;
  bool virtual_surfaces = true;
  bool safety_margin = true;
};

struct PipelineParams {
  CeilingFilterParams ceiling;
  SafetyParams safety;
  FootholdModel foothold;
  PipelineFlags flags;
};

/// Robot state the pipeline needs: planar position and base (ground) height.
struct RobotFrame {
  Vec2 xy;
  double base_z = 0.0;
};

double ceiling_threshold(double distance_xy, const CeilingFilterParams& p);

/// Keeps points with z <= base_z + threshold(dist); order preserved.
PointCloud ceiling_filter(const PointCloud& cloud, double robot_base_z, Vec2 robot_xy,
                          const CeilingFilterParams& p);

/// Max-fusion of point heights into the elevation layer; marks cells observed.
void integrate_cloud(HeightMap& map, const PointCloud& cloud);

/// Lowers per-cell upper bounds to the height at which each sensor ray passes
/// over the cell (ray parameter at the midpoint of the cell's entry and exit).
/// The cell containing the ray end point is not bounded by its own ray.
void compute_virtual_surfaces(HeightMap& map, const PointCloud& cloud);

/// Fills the foothold layer for every cell with known effective elevation.
/// Throws std::invalid_argument when an mlp model has no weights.
void score_footholds(HeightMap& map, const FootholdModel& model);

double heuristic_foothold_score(double slope, double roughness, const HeuristicFootholdParams& p);

/// Steppable threshold mask, optionally followed by dilate-then-erode.
void apply_safety_margin(HeightMap& map, const SafetyParams& p, bool morphology = true);

using Mask = std::vector<std::uint8_t>;

/// Cell offsets (dx, dy) whose center distance is <= radius_cells.
std::vector<CellIndex> disk_offsets(double radius_cells);
/// Binary dilation; cells outside the grid contribute nothing.
Mask dilate(const Mask& mask, int size_x, int size_y, double radius_cells);
/// Binary erosion; cells outside the grid count as unset.
Mask erode(const Mask& mask, int size_x, int size_y, double radius_cells);

/// Full per-frame update: recenter on the robot, then ceiling filter,
/// integration, virtual surfaces, foothold scoring and the safety margin.
HeightMap process_frame(const HeightMap& map, const PointCloud& cloud, const RobotFrame& robot,
                        const PipelineParams& params);

/// `.pts` files: `sensor <x> <y> <z>` followed by one `x y z` per line.
PointCloud read_pts(std::istream& in);
void write_pts(std::ostream& out, const PointCloud& cloud);
PointCloud load_pts(const std::filesystem::path& path);
void save_pts(const std::filesystem::path& path, const PointCloud& cloud);

}  // namespace artnav
