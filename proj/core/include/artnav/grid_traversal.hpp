#pragma once

#include <functional>

#include "artnav/geometry.hpp"
#include "artnav/terrain_map.hpp"

namespace artnav {

/// Geometry of a regular grid whose cell (0,0) is centered at origin.
struct GridGeometry {
  Vec2 origin;
  double resolution = 0.0;
  int size_x = 0;
  int size_y = 0;

  static GridGeometry of(const HeightMap& map) {
    return {map.origin(), map.resolution(), map.size_x(), map.size_y()};
  }
};

/// One cell crossed by a segment, with the segment parameters at entry and exit.
struct CellCrossing {
  CellIndex cell;
  double t_in = 0.0;
  double t_out = 0.0;
};

/// Visits, in order, every in-grid cell whose interior the planar segment
/// a -> b passes through (incremental boundary-crossing walk). Parameters are
/// fractions of the full segment in [0, 1]. A segment of zero planar length
/// yields the single cell containing a. The visitor returns false to stop.
void traverse_segment(const GridGeometry& grid, Vec2 a, Vec2 b,
                      const std::function<bool(const CellCrossing&)>& visit);

}  // namespace artnav
