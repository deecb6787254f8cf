#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "artnav/planner.hpp"
#include "artnav/reachability.hpp"
#include "artnav/terrain_map.hpp"

namespace artnav {

struct EvalRecord {
  std::string token;
  int n_poses = 0;
  int colliding = 0;               // colliding poses, first pose excluded
  bool collision = false;
  std::optional<bool> severe;      // only for paths with at least 3 poses
  std::vector<double> segment_cost;
  std::vector<double> segment_risk;
  std::vector<Vec2> segment_mid;   // segment midpoints, for the heat map
  double planning_ms = kUnknown;
};

struct EvalOptions {
  double shrink = 0.10;       // torso reduction per dimension [m]
  double risk_cutoff = 0.5;   // reported alongside; costs are taken from the path file
  unsigned threads = 1;
};

/// Torso-only collision check of every pose but the first, against the map
/// the path was planned on, with torso boxes shrunk by `shrink`. Roll and pitch
/// are re-derived from the map where possible.
EvalRecord evaluate_path(const HeightMap& map, const RobotShape& shape, const NavPath& path, double shrink);

struct EvalSummary {
  int n_paths = 0;
  int n_collision = 0;
  int n_severe_eligible = 0;
  int n_severe = 0;
  double collision_pct = 0.0;
  double severe_pct = 0.0;
  double mean_cost = 0.0;
  double p95_cost = 0.0;
  double mean_risk = 0.0;
  double p95_risk = 0.0;
  int n_over_cutoff = 0;  // segments with risk above the cutoff
};

/// Nearest-rank percentile (q in (0, 1]) of an unsorted sample; 0 when empty.
double percentile(std::vector<double> values, double q);

EvalSummary summarize(const std::vector<EvalRecord>& records, double risk_cutoff);

/// Pairs `path_<t>.csv` in paths_dir with `map_<t>.ahm` in maps_dir and
/// evaluates every pair. Unpaired files are a FormatError. Records are
/// ordered by numeric timestamp token.
std::vector<EvalRecord> evaluate_bundle(const std::filesystem::path& paths_dir, const std::filesystem::path& maps_dir,
                                        const RobotShape& shape, const EvalOptions& options);

void write_eval_csv(std::ostream& out, const std::vector<EvalRecord>& records);
void write_eval_summary(std::ostream& out, const EvalSummary& s);

/// Grayscale PGM of segment cost binned at `cell` meters and smoothed with a
/// Gaussian of standard deviation `sigma`. The header comment records the
/// value that maps to 255.
void write_cost_heatmap(std::ostream& out, const std::vector<EvalRecord>& records, double cell = 0.25,
                        double sigma = 2.0);

}  // namespace artnav
