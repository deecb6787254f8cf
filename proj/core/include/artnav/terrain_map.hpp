#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "artnav/geometry.hpp"

namespace artnav {

struct CellIndex {
  int ix = 0;
  int iy = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Layered 2.5D grid centered around the robot.
///
/// Cell (0,0) has its center at origin(); cell (ix, iy) has its center at
/// origin + resolution * (ix, iy). Floating point layers use kUnknown (NaN)
/// for missing data.
///
/// The effective elevation of a cell is its observed elevation if known,
/// otherwise its virtual upper bound if that bound lies at or above the
/// sensor height of the last integrated frame, otherwise unknown.
class HeightMap {
 public:
  static constexpr int kDefaultCells = 200;
  static constexpr double kDefaultResolution = 0.04;

  /// 8 m x 8 m at 4 cm, centered on the world origin.
  HeightMap();
  HeightMap(int size_x, int size_y, double resolution, Vec2 origin);

  /// Builds a map whose grid center is the given world point.
  static HeightMap centered_at(int size_x, int size_y, double resolution, Vec2 center);

  int size_x() const { return size_x_; }
  int size_y() const { return size_y_; }
  std::size_t cell_count() const { return elevation_.size(); }
  double resolution() const { return resolution_; }
  Vec2 origin() const { return origin_; }
  Vec2 grid_center() const;
  double sensor_z() const { return sensor_z_; }
  void set_sensor_z(double z) { sensor_z_ = z; }

  bool contains(CellIndex c) const {
    return c.ix >= 0 && c.iy >= 0 && c.ix < size_x_ && c.iy < size_y_;
  }
  std::size_t linear(CellIndex c) const {
    return static_cast<std::size_t>(c.iy) * static_cast<std::size_t>(size_x_) +
           static_cast<std::size_t>(c.ix);
  }
  Vec2 cell_center(CellIndex c) const {
    return {origin_.x + resolution_ * c.ix, origin_.y + resolution_ * c.iy};
  }

  /// Unclamped nearest-center cell coordinates; may lie outside the grid.
  CellIndex nearest_cell(double x, double y) const;
  /// Nearest cell, or nullopt when the point falls outside the grid.
  std::optional<CellIndex> world_to_cell(double x, double y) const;

  double elevation(CellIndex c) const { return elevation_[linear(c)]; }
  double foothold(CellIndex c) const { return foothold_[linear(c)]; }
  double upper_bound(CellIndex c) const { return upper_bound_[linear(c)]; }
  bool observed(CellIndex c) const { return observed_[linear(c)] != 0; }
  bool steppable(CellIndex c) const { return steppable_[linear(c)] != 0; }

  void set_elevation(CellIndex c, double v) { elevation_[linear(c)] = v; }
  void set_foothold(CellIndex c, double v);
  void set_upper_bound(CellIndex c, double v) { upper_bound_[linear(c)] = v; }
  void set_observed(CellIndex c, bool v) { observed_[linear(c)] = v ? 1 : 0; }
  void set_steppable(CellIndex c, bool v) { steppable_[linear(c)] = v ? 1 : 0; }

  /// Upper bound known and not below the frame's sensor height.
  bool upper_bound_eligible(CellIndex c) const {
    const double ub = upper_bound(c);
    return is_known(ub) && ub >= sensor_z_;
  }
  double effective_elevation(CellIndex c) const {
    const double e = elevation(c);
    if (is_known(e)) return e;
    return upper_bound_eligible(c) ? upper_bound(c) : kUnknown;
  }

  /// Bilinear interpolation of the elevation layer with nearest-known
  /// fallback when part of the 2x2 neighborhood is unknown.
  double elevation_at(double x, double y) const;

  /// Copy shifted by whole cells so that new_center lies within half a cell
  /// of the grid center. Newly exposed cells are unknown.
  HeightMap recentered(Vec2 new_center) const;

  std::span<const double> elevation_layer() const { return elevation_; }
  std::span<const double> foothold_layer() const { return foothold_; }
  std::span<const double> upper_bound_layer() const { return upper_bound_; }
  std::span<const std::uint8_t> observed_layer() const { return observed_; }
  std::span<const std::uint8_t> steppable_layer() const { return steppable_; }
  std::span<double> elevation_layer() { return elevation_; }
  std::span<double> foothold_layer() { return foothold_; }
  std::span<double> upper_bound_layer() { return upper_bound_; }
  std::span<std::uint8_t> observed_layer() { return observed_; }
  std::span<std::uint8_t> steppable_layer() { return steppable_; }

  /// Bitwise comparison of geometry and all layers; unknown equals unknown.
  friend bool operator==(const HeightMap& a, const HeightMap& b);

 private:
  int size_x_ = 0;
  int size_y_ = 0;
  double resolution_ = kDefaultResolution;
  Vec2 origin_{};
  double sensor_z_ = 0.0;
  std::vector<double> elevation_;
  std::vector<double> foothold_;
  std::vector<double> upper_bound_;
  std::vector<std::uint8_t> observed_;
  std::vector<std::uint8_t> steppable_;
};

/// Writes the line-oriented `ahm 1` text format.
void write_map(std::ostream& out, const HeightMap& map);
HeightMap read_map(std::istream& in);
void save_map(const std::filesystem::path& path, const HeightMap& map);
HeightMap load_map(const std::filesystem::path& path);

/// Shortest decimal representation that parses back to the same double;
/// "nan" for unknown.
std::string format_double(double v);
/// Parses a token written by format_double. Throws FormatError.
double parse_double(std::string_view token);

}  // namespace artnav
