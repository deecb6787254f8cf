#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "artnav/follower.hpp"
#include "artnav/map_pipeline.hpp"
#include "artnav/planner.hpp"
#include "artnav/reachability.hpp"
#include "artnav/world.hpp"

namespace artnav {

/// Sampling iterations granted per second of sampling budget when the
/// simulation replaces wall time by an iteration count.
inline constexpr double kSimIterationsPerSecond = 1000.0;

struct ScenarioConfig {
  GroundTruthWorld world;
  std::string name;
  Pose start;
  /// Exploration path; a single-goal scenario holds one pose. Poses with an
  /// unknown yaw accept any heading.
  std::vector<Pose> exploration;
  double duration = 60.0;           // [s] simulated
  double dt = 0.02;                 // [s]
  double map_update_period = 0.2;   // [s]
  double replan_period = 2.0;       // [s]
  int infeasible_patience = 3;      // consecutive failed replans before giving up
  int map_cells = 200;
  double map_resolution = 0.04;
  SensorModel sensor;
  FollowerParams follower;
  PipelineParams pipeline;
  PlannerConfig planner;
  RobotShape shape = RobotShape::anymal_like();
  double deviation_threshold = 0.2;  // [m]
  double progress_epsilon = 0.1;     // [m] improvement counting as progress
  std::uint64_t seed = 1;
  bool record_maps = false;

  void validate() const;
};

/// `.scn` key-value file; relative paths resolve against its directory.
ScenarioConfig read_scenario(std::istream& in, const std::string& source = "<stream>",
                             const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);

struct TrajectorySample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

struct PlanRecord {
  double t = 0.0;
  long step = 0;
  PlanStats stats;
  GoalOutcome outcome = GoalOutcome::kInfeasible;
  int goal_index = -1;
  std::optional<NavPath> path;
  std::optional<HeightMap> map;  // kept when maps are recorded
};

enum class ScenarioOutcome { kGoalReached, kInfeasible, kTimeout };

const char* to_string(ScenarioOutcome o);

struct ScenarioReport {
  std::string name;
  ScenarioOutcome outcome = ScenarioOutcome::kTimeout;
  double sim_time = 0.0;
  long steps = 0;
  std::vector<TrajectorySample> trajectory;
  std::vector<PlanRecord> plans;
  long collision_steps = 0;     // steps with the torso intersecting truth geometry
  long unsafe_steps = 0;        // steps with the base over truth-unsteppable terrain
  int deviation_events = 0;     // excursions beyond the deviation threshold
  double max_deviation = 0.0;   // [m] from the latest published path
  int max_stall_cycles = 0;     // consecutive replans without progress toward the goal
  double distance_travelled = 0.0;
  double final_goal_distance = 0.0;
};

ScenarioReport run_scenario(const ScenarioConfig& config);

/// Writes trajectory.csv, plans.csv, summary.txt and, per published path,
/// paths/path_<ms>.csv plus paths/map_<ms>.ahm when maps were recorded.
void write_report(const std::filesystem::path& dir, const ScenarioReport& report);
void write_summary(std::ostream& out, const ScenarioReport& report);

/// Timestamp token used in recorded file names: simulated milliseconds.
std::string time_token(double t);

}  // namespace artnav
