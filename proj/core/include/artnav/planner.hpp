#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "artnav/motion_cost.hpp"
#include "artnav/reachability.hpp"
#include "artnav/terrain_map.hpp"

namespace artnav {

using Rng = std::mt19937_64;

struct PlannerBudgets {
  int max_vertices = 1000;          // N
  int max_unchecked_edges = 20000;  // M
  double max_sampling_time = 2.0;   // T [s]
  double risk_threshold = 0.5;      // R
  /// Optional cap on sampling iterations; 0 disables it. Simulation uses this
  /// instead of wall time so runs are reproducible.
  long max_iterations = 0;

  void validate() const;
};

struct PlannerConfig {
  PlannerBudgets budgets;
  CostWeights weights;
  SurrogateParams surrogate;
  std::string backend = "surrogate";  // surrogate | mlp
  std::filesystem::path mlp_weights;
  double connect_radius = 1.0;        // [m]
  int max_neighbors = 10;
  double density_cell = 0.5;          // [m]
  int density_cap = 5;
  double snap_radius = 0.3;           // [m]
  double snap_yaw = 0.5235987755982988;  // [rad]
  int snap_attempts = 100;
  double torso_height = kDefaultTorsoHeight;
  unsigned threads = 0;               // validation workers, 0 = hardware concurrency

  void validate() const;
  unsigned worker_count() const;
};

/// `planner.cfg` key-value file. Relative weight paths resolve against the file's directory.
PlannerConfig read_planner_config(std::istream& in, const std::string& source = "<stream>",
                                  const std::filesystem::path& base_dir = {});
PlannerConfig load_planner_config(const std::filesystem::path& path);
void write_planner_config(std::ostream& out, const PlannerConfig& config);

std::unique_ptr<CostBackend> make_backend(const PlannerConfig& config, const RobotShape& shape);

enum class EdgeState { kUnchecked, kValid, kPruned };

struct Edge {
  int from = 0;
  int to = 0;
  EdgeState state = EdgeState::kUnchecked;
  MotionCost cost;
  double combined = 0.0;
};

/// Graph of valid poses with directed edges. Vertex ids are insertion indices.
class NavGraph {
 public:
  explicit NavGraph(double connect_radius = 1.0, double density_cell = 0.5);

  int add_vertex(const Pose& p);
  /// Adds unchecked edges both ways to the nearest existing vertices within the
  /// connection radius (ties by id). Returns the number of directed edges added.
  int connect_vertex(int v, int max_neighbors);
  /// Adds a single unchecked edge; used by tests to build graphs by hand.
  int add_edge(int from, int to);

  /// Vertex count in the density bucket containing (x, y).
  int density_at(double x, double y) const;
  /// Ids within `radius` of (x, y), sorted by distance then id.
  std::vector<int> neighbors_within(double x, double y, double radius) const;

  const std::vector<Pose>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::vector<Edge>& edges() { return edges_; }
  const std::vector<int>& out_edges(int v) const { return out_[static_cast<std::size_t>(v)]; }
  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int count_edges(EdgeState s) const;
  double connect_radius() const { return connect_radius_; }

 private:
  static std::int64_t bucket_key(std::int64_t bx, std::int64_t by) { return (bx << 32) ^ (by & 0xffffffff); }

  double connect_radius_;
  double density_cell_;
  std::vector<Pose> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_;
  std::unordered_map<std::int64_t, std::vector<int>> spatial_;
  std::unordered_map<std::int64_t, int> density_;
};

struct NavPath {
  std::vector<Pose> poses;
  std::vector<MotionCost> segments;
  std::vector<double> segment_cost;
  double total_cost = 0.0;

  double length() const;
};

/// Draws a planar pose over the map extent, applies the density rejection,
/// then augment_pose and check_pose. Nullopt when any stage rejects.
std::optional<Pose> sample_vertex(const HeightMap& map, const RobotShape& shape, const NavGraph& graph, Rng& rng,
                                  const PlannerConfig& config);

/// Accepts the guess if valid, otherwise tries random candidates around it.
std::optional<Pose> snap_pose(const HeightMap& map, const RobotShape& shape, double x, double y, double yaw,
                              Rng& rng, const PlannerConfig& config);

struct BuildStats {
  double sampling_ms = 0.0;
  long iterations = 0;
};

/// Fresh graph seeded with start (id 0) and goals (ids 1..), then lazy sampling
/// until a budget is hit. Edges are left unchecked.
NavGraph build_graph(const HeightMap& map, const RobotShape& shape, const Pose& start,
                     const std::vector<Pose>& goals, const PlannerConfig& config, Rng& rng,
                     BuildStats* stats = nullptr);

/// Evaluates every unchecked edge in one batch; prunes edges whose risk
/// exceeds the threshold. Returns the number of pruned edges. On a backend
/// error the graph is left unchanged.
int validate_graph(NavGraph& graph, const HeightMap& map, const CostBackend& backend, const CostWeights& weights,
                   double risk_threshold, unsigned threads = 1);

/// Query describing the transition along an edge.
MotionQuery edge_query(const Pose& from, const Pose& to);

/// A* over valid edges. `heuristic_per_meter` scales planar distance to the
/// goal; it must not exceed the cheapest cost per meter of any edge.
std::optional<NavPath> astar(const NavGraph& graph, int start_id, int goal_id, double heuristic_per_meter);

enum class PlanFailure { kNone, kStartInvalid, kGoalInvalid, kUnreachable };

const char* to_string(PlanFailure f);

struct PlanStats {
  double sampling_ms = 0.0;
  double validation_ms = 0.0;
  double search_ms = 0.0;
  double total_ms = 0.0;
  int n_vertices = 0;
  int n_edges = 0;
  int n_pruned = 0;
  long iterations = 0;
};

struct PlanResult {
  std::optional<NavPath> path;
  PlanFailure failure = PlanFailure::kNone;
  PlanStats stats;
};

PlanResult plan(const HeightMap& map, const RobotShape& shape, const Pose& start_guess, const Pose& goal_guess,
                const PlannerConfig& config, const CostBackend& backend, Rng& rng);

enum class GoalOutcome { kGoal, kExhausted, kInfeasible };

const char* to_string(GoalOutcome o);

struct GoalSelection {
  GoalOutcome outcome = GoalOutcome::kInfeasible;
  int goal_index = -1;  // index into the exploration path
  std::optional<NavPath> path;
  PlanStats stats;
};

/// Plans toward the farthest pose of exploration[next_index..] that can be
/// reached, trying poses farthest-first against one shared graph. Poses before
/// the returned goal index count as reached. Exhausted when next_index is past
/// the end of the path.
GoalSelection select_goal(const HeightMap& map, const RobotShape& shape, const Pose& start_guess,
                          const std::vector<Pose>& exploration, int next_index, const PlannerConfig& config,
                          const CostBackend& backend, Rng& rng);

/// `x,y,yaw` per line (yaw in radians, optional); an optional header line is skipped.
std::vector<Pose> read_pose_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<Pose> load_pose_csv(const std::filesystem::path& path);

/// `x,y,z,yaw,seg_ct,seg_ce,seg_cr,seg_cost`; segment columns of a pose hold
/// the costs of the segment ending at that pose (zeros for the first pose).
void write_path_csv(std::ostream& out, const NavPath& path);
NavPath read_path_csv(std::istream& in, const std::string& source = "<stream>");

}  // namespace artnav
