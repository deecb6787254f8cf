#include "artnav/planner.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "artnav/errors.hpp"
#include "artnav/key_value.hpp"

namespace artnav {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::int64_t floor_index(double v, double cell) { return static_cast<std::int64_t>(std::floor(v / cell)); }

}  // namespace

void PlannerBudgets::validate() const {
  if (max_vertices < 2 || max_unchecked_edges < 1 || !(max_sampling_time > 0.0) || !(risk_threshold >= 0.0) ||
      !(risk_threshold <= 1.0) || max_iterations < 0) {
    throw std::invalid_argument("planner budgets: need N >= 2, M >= 1, T > 0, 0 <= R <= 1");
  }
}

void PlannerConfig::validate() const {
  budgets.validate();
  surrogate.validate();
  if (backend != "surrogate" && backend != "mlp") throw std::invalid_argument("planner: unknown backend '" + backend + "'");
  if (backend == "mlp" && mlp_weights.empty()) throw std::invalid_argument("planner: mlp backend needs mlp_weights");
  if (!(connect_radius > 0.0) || max_neighbors < 1) {
    throw std::invalid_argument("planner: connect_radius must be positive and max_neighbors >= 1");
  }
  if (!(density_cell > 0.0) || density_cap < 1) {
    throw std::invalid_argument("planner: density_cell must be positive and density_cap >= 1");
  }
  if (!(snap_radius >= 0.0) || !(snap_yaw >= 0.0) || snap_attempts < 0) {
    throw std::invalid_argument("planner: snapping tolerances must be non-negative");
  }
  if (!(torso_height > 0.0)) throw std::invalid_argument("planner: torso_height must be positive");
}

unsigned PlannerConfig::worker_count() const {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

PlannerConfig read_planner_config(std::istream& in, const std::string& source, const std::filesystem::path& base_dir) {
  const KeyValueFile kv = KeyValueFile::parse(in, source);
  kv.reject_unknown({"max_vertices", "max_unchecked_edges", "max_sampling_time", "risk_threshold", "max_iterations",
                     "w_t", "w_e", "w_r", "v_max", "omega_max", "t_norm", "energy_ratio", "hazard_gain",
                     "sample_stride", "backend", "mlp_weights", "connect_radius", "max_neighbors", "density_cell",
                     "density_cap", "snap_radius", "snap_yaw_deg", "snap_attempts", "torso_height", "threads"});
  PlannerConfig c;
  c.budgets.max_vertices = kv.get_int("max_vertices", c.budgets.max_vertices);
  c.budgets.max_unchecked_edges = kv.get_int("max_unchecked_edges", c.budgets.max_unchecked_edges);
  c.budgets.max_sampling_time = kv.get_double("max_sampling_time", c.budgets.max_sampling_time);
  c.budgets.risk_threshold = kv.get_double("risk_threshold", c.budgets.risk_threshold);
  c.budgets.max_iterations = kv.get_int("max_iterations", static_cast<int>(c.budgets.max_iterations));
  c.surrogate.v_max = kv.get_double("v_max", c.surrogate.v_max);
  c.surrogate.omega_max = kv.get_double("omega_max", c.surrogate.omega_max);
  c.surrogate.t_norm = kv.get_double("t_norm", c.surrogate.t_norm);
  c.surrogate.energy_ratio = kv.get_double("energy_ratio", c.surrogate.energy_ratio);
  c.surrogate.hazard_gain = kv.get_double("hazard_gain", c.surrogate.hazard_gain);
  c.surrogate.sample_stride = kv.get_double("sample_stride", c.surrogate.sample_stride);
  c.backend = kv.get("backend").value_or(c.backend);
  if (const auto w = kv.get("mlp_weights")) {
    std::filesystem::path p(*w);
    c.mlp_weights = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  c.connect_radius = kv.get_double("connect_radius", c.connect_radius);
  c.max_neighbors = kv.get_int("max_neighbors", c.max_neighbors);
  c.density_cell = kv.get_double("density_cell", c.density_cell);
  c.density_cap = kv.get_int("density_cap", c.density_cap);
  c.snap_radius = kv.get_double("snap_radius", c.snap_radius);
  c.snap_yaw = deg_to_rad(kv.get_double("snap_yaw_deg", 30.0));
  c.snap_attempts = kv.get_int("snap_attempts", c.snap_attempts);
  c.torso_height = kv.get_double("torso_height", c.torso_height);
  const int threads = kv.get_int("threads", 0);
  if (threads < 0) throw FormatError(source + ": threads must be >= 0");
  c.threads = static_cast<unsigned>(threads);
  try {
    c.weights = CostWeights(kv.get_double("w_t", 1.0), kv.get_double("w_e", 0.0), kv.get_double("w_r", 5.0));
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(source + ": " + e.what());
  }
  return c;
}

PlannerConfig load_planner_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open planner config '" + path.string() + "'");
  return read_planner_config(in, path.string(), path.parent_path());
}

void write_planner_config(std::ostream& out, const PlannerConfig& c) {
  out << "max_vertices = " << c.budgets.max_vertices << '\n'
      << "max_unchecked_edges = " << c.budgets.max_unchecked_edges << '\n'
      << "max_sampling_time = " << format_double(c.budgets.max_sampling_time) << '\n'
      << "risk_threshold = " << format_double(c.budgets.risk_threshold) << '\n'
      << "max_iterations = " << c.budgets.max_iterations << '\n'
      << "w_t = " << format_double(c.weights.w_t()) << '\n'
      << "w_e = " << format_double(c.weights.w_e()) << '\n'
      << "w_r = " << format_double(c.weights.w_r()) << '\n'
      << "v_max = " << format_double(c.surrogate.v_max) << '\n'
      << "omega_max = " << format_double(c.surrogate.omega_max) << '\n'
      << "t_norm = " << format_double(c.surrogate.t_norm) << '\n'
      << "energy_ratio = " << format_double(c.surrogate.energy_ratio) << '\n'
      << "hazard_gain = " << format_double(c.surrogate.hazard_gain) << '\n'
      << "sample_stride = " << format_double(c.surrogate.sample_stride) << '\n'
      << "backend = " << c.backend << '\n';
  if (!c.mlp_weights.empty()) out << "mlp_weights = " << c.mlp_weights.string() << '\n';
  out << "connect_radius = " << format_double(c.connect_radius) << '\n'
      << "max_neighbors = " << c.max_neighbors << '\n'
      << "density_cell = " << format_double(c.density_cell) << '\n'
      << "density_cap = " << c.density_cap << '\n'
      << "snap_radius = " << format_double(c.snap_radius) << '\n'
      << "snap_yaw_deg = " << format_double(c.snap_yaw * 180.0 / std::numbers::pi) << '\n'
      << "snap_attempts = " << c.snap_attempts << '\n'
      << "torso_height = " << format_double(c.torso_height) << '\n'
      << "threads = " << c.threads << '\n';
}

std::unique_ptr<CostBackend> make_backend(const PlannerConfig& config, const RobotShape& shape) {
  if (config.backend == "mlp") return load_mlp(config.mlp_weights);
  return std::make_unique<SurrogateBackend>(config.surrogate, shape);
}

// ---------------------------------------------------------------------------

NavGraph::NavGraph(double connect_radius, double density_cell)
    : connect_radius_(connect_radius), density_cell_(density_cell) {
  if (!(connect_radius > 0.0) || !(density_cell > 0.0)) {
    throw std::invalid_argument("graph: radius and density cell must be positive");
  }
}

int NavGraph::add_vertex(const Pose& p) {
  const int id = vertex_count();
  vertices_.push_back(p);
  out_.emplace_back();
  spatial_[bucket_key(floor_index(p.x, connect_radius_), floor_index(p.y, connect_radius_))].push_back(id);
  ++density_[bucket_key(floor_index(p.x, density_cell_), floor_index(p.y, density_cell_))];
  return id;
}

int NavGraph::add_edge(int from, int to) {
  if (from == to) throw std::invalid_argument("graph: self edges are not allowed");
  if (from < 0 || to < 0 || from >= vertex_count() || to >= vertex_count()) {
    throw std::out_of_range("graph: edge endpoint out of range");
  }
  const int id = edge_count();
  edges_.push_back(Edge{from, to, EdgeState::kUnchecked, {}, 0.0});
  out_[static_cast<std::size_t>(from)].push_back(id);
  return id;
}

std::vector<int> NavGraph::neighbors_within(double x, double y, double radius) const {
  std::vector<std::pair<double, int>> found;
  const std::int64_t bx0 = floor_index(x - radius, connect_radius_);
  const std::int64_t bx1 = floor_index(x + radius, connect_radius_);
  const std::int64_t by0 = floor_index(y - radius, connect_radius_);
  const std::int64_t by1 = floor_index(y + radius, connect_radius_);
  for (std::int64_t by = by0; by <= by1; ++by) {
    for (std::int64_t bx = bx0; bx <= bx1; ++bx) {
      const auto it = spatial_.find(bucket_key(bx, by));
      if (it == spatial_.end()) continue;
      for (int id : it->second) {
        const Pose& p = vertices_[static_cast<std::size_t>(id)];
        const double d = std::hypot(p.x - x, p.y - y);
        if (d <= radius) found.emplace_back(d, id);
      }
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<int> ids;
  ids.reserve(found.size());
  for (const auto& f : found) ids.push_back(f.second);
  return ids;
}

int NavGraph::connect_vertex(int v, int max_neighbors) {
  const Pose& p = vertices_.at(static_cast<std::size_t>(v));
  int added = 0;
  int linked = 0;
  for (int u : neighbors_within(p.x, p.y, connect_radius_)) {
    if (u == v) continue;
    if (linked == max_neighbors) break;
    add_edge(v, u);
    add_edge(u, v);
    added += 2;
    ++linked;
  }
  return added;
}

int NavGraph::density_at(double x, double y) const {
  const auto it = density_.find(bucket_key(floor_index(x, density_cell_), floor_index(y, density_cell_)));
  return it == density_.end() ? 0 : it->second;
}

int NavGraph::count_edges(EdgeState s) const {
  return static_cast<int>(std::count_if(edges_.begin(), edges_.end(), [s](const Edge& e) { return e.state == s; }));
}

double NavPath::length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < poses.size(); ++i) len += planar_distance(poses[i - 1].xy(), poses[i].xy());
  return len;
}

// ---------------------------------------------------------------------------

namespace {

std::optional<Pose> valid_pose_at(const HeightMap& map, const RobotShape& shape, double x, double y, double yaw,
                                  double h_torso) {
  auto pose = augment_pose(map, shape, x, y, yaw, h_torso);
  if (!pose || check_pose(map, shape, *pose) != PoseVerdict::kValid) return std::nullopt;
  return pose;
}

std::optional<Pose> snap_with_tolerance(const HeightMap& map, const RobotShape& shape, double x, double y,
                                        double yaw, double yaw_tolerance, Rng& rng, const PlannerConfig& config) {
  if (auto p = valid_pose_at(map, shape, x, y, yaw, config.torso_height)) return p;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < config.snap_attempts; ++i) {
    const double r = config.snap_radius * std::sqrt(unit(rng));
    const double a = 2.0 * std::numbers::pi * unit(rng);
    const double dyaw = yaw_tolerance * (2.0 * unit(rng) - 1.0);
    if (auto p = valid_pose_at(map, shape, x + r * std::cos(a), y + r * std::sin(a), yaw + dyaw,
                               config.torso_height)) {
      return p;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Pose> sample_vertex(const HeightMap& map, const RobotShape& shape, const NavGraph& graph, Rng& rng,
                                  const PlannerConfig& config) {
  const double res = map.resolution();
  const Vec2 o = map.origin();
  std::uniform_real_distribution<double> ux(o.x - 0.5 * res, o.x + (map.size_x() - 0.5) * res);
  std::uniform_real_distribution<double> uy(o.y - 0.5 * res, o.y + (map.size_y() - 0.5) * res);
  std::uniform_real_distribution<double> uyaw(-std::numbers::pi, std::numbers::pi);
  const double x = ux(rng);
  const double y = uy(rng);
  const double yaw = wrap_angle(uyaw(rng));

  const int n = graph.density_at(x, y);
  if (n > 0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < static_cast<double>(n) / config.density_cap) return std::nullopt;
  }
  return valid_pose_at(map, shape, x, y, yaw, config.torso_height);
}

std::optional<Pose> snap_pose(const HeightMap& map, const RobotShape& shape, double x, double y, double yaw,
                              Rng& rng, const PlannerConfig& config) {
  return snap_with_tolerance(map, shape, x, y, yaw, config.snap_yaw, rng, config);
}

NavGraph build_graph(const HeightMap& map, const RobotShape& shape, const Pose& start, const std::vector<Pose>& goals,
                     const PlannerConfig& config, Rng& rng, BuildStats* stats) {
  const auto t0 = Clock::now();
  NavGraph graph(config.connect_radius, config.density_cell);
  graph.connect_vertex(graph.add_vertex(start), config.max_neighbors);
  for (const Pose& g : goals) graph.connect_vertex(graph.add_vertex(g), config.max_neighbors);

  const PlannerBudgets& b = config.budgets;
  const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(b.max_sampling_time));
  int unchecked = graph.edge_count();
  long iterations = 0;
  while (graph.vertex_count() < b.max_vertices && unchecked < b.max_unchecked_edges && Clock::now() < deadline &&
         (b.max_iterations == 0 || iterations < b.max_iterations)) {
    ++iterations;
    if (auto p = sample_vertex(map, shape, graph, rng, config)) {
      unchecked += graph.connect_vertex(graph.add_vertex(*p), config.max_neighbors);
    }
  }
  if (stats) {
    stats->sampling_ms = elapsed_ms(t0);
    stats->iterations = iterations;
  }
  return graph;
}

MotionQuery edge_query(const Pose& from, const Pose& to) {
  const double c = std::cos(from.yaw), s = std::sin(from.yaw);
  const double wx = to.x - from.x;
  const double wy = to.y - from.y;
  MotionQuery q;
  q.start = from.xy();
  q.start_yaw = from.yaw;
  q.dx = c * wx + s * wy;
  q.dy = -s * wx + c * wy;
  q.dyaw = wrap_angle(to.yaw - from.yaw);
  return q;
}

int validate_graph(NavGraph& graph, const HeightMap& map, const CostBackend& backend, const CostWeights& weights,
                   double risk_threshold, unsigned threads) {
  std::vector<int> ids;
  std::vector<MotionQuery> queries;
  const auto& verts = graph.vertices();
  for (int i = 0; i < graph.edge_count(); ++i) {
    const Edge& e = graph.edges()[static_cast<std::size_t>(i)];
    if (e.state != EdgeState::kUnchecked) continue;
    ids.push_back(i);
    queries.push_back(edge_query(verts[static_cast<std::size_t>(e.from)], verts[static_cast<std::size_t>(e.to)]));
  }
  const auto costs = batch_evaluate(backend, map, queries, threads);
  int pruned = 0;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    Edge& e = graph.edges()[static_cast<std::size_t>(ids[k])];
    e.cost = costs[k];
    if (exceeds_risk(costs[k], risk_threshold)) {
      e.state = EdgeState::kPruned;
      ++pruned;
    } else {
      e.state = EdgeState::kValid;
      e.combined = combine(costs[k], weights);
    }
  }
  return pruned;
}

std::optional<NavPath> astar(const NavGraph& graph, int start_id, int goal_id, double heuristic_per_meter) {
  const int n = graph.vertex_count();
  if (start_id < 0 || goal_id < 0 || start_id >= n || goal_id >= n) return std::nullopt;
  const auto& verts = graph.vertices();
  const Vec2 goal_xy = verts[static_cast<std::size_t>(goal_id)].xy();
  const auto h = [&](int v) { return heuristic_per_meter * planar_distance(verts[static_cast<std::size_t>(v)].xy(), goal_xy); };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> g(static_cast<std::size_t>(n), kInf);
  std::vector<int> parent_edge(static_cast<std::size_t>(n), -1);
  using Entry = std::tuple<double, int, double>;  // f, vertex, g at push
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g[static_cast<std::size_t>(start_id)] = 0.0;
  open.emplace(h(start_id), start_id, 0.0);

  bool found = false;
  while (!open.empty()) {
    const auto [f, v, gv] = open.top();
    open.pop();
    if (gv > g[static_cast<std::size_t>(v)]) continue;
    if (v == goal_id) {
      found = true;
      break;
    }
    for (int eid : graph.out_edges(v)) {
      const Edge& e = graph.edges()[static_cast<std::size_t>(eid)];
      if (e.state != EdgeState::kValid) continue;
      const double cand = gv + e.combined;
      if (cand < g[static_cast<std::size_t>(e.to)]) {
        g[static_cast<std::size_t>(e.to)] = cand;
        parent_edge[static_cast<std::size_t>(e.to)] = eid;
        open.emplace(cand + h(e.to), e.to, cand);
      }
    }
  }
  if (!found) return std::nullopt;

  std::vector<int> chain;
  for (int v = goal_id; v != start_id;) {
    const int eid = parent_edge[static_cast<std::size_t>(v)];
    chain.push_back(eid);
    v = graph.edges()[static_cast<std::size_t>(eid)].from;
  }
  std::reverse(chain.begin(), chain.end());

  NavPath path;
  path.poses.push_back(verts[static_cast<std::size_t>(start_id)]);
  for (int eid : chain) {
    const Edge& e = graph.edges()[static_cast<std::size_t>(eid)];
    path.poses.push_back(verts[static_cast<std::size_t>(e.to)]);
    path.segments.push_back(e.cost);
    path.segment_cost.push_back(e.combined);
  }
  path.total_cost = g[static_cast<std::size_t>(goal_id)];
  return path;
}

const char* to_string(PlanFailure f) {
  switch (f) {
    case PlanFailure::kNone: return "none";
    case PlanFailure::kStartInvalid: return "start-invalid";
    case PlanFailure::kGoalInvalid: return "goal-invalid";
    case PlanFailure::kUnreachable: return "unreachable";
  }
  return "?";
}

const char* to_string(GoalOutcome o) {
  switch (o) {
    case GoalOutcome::kGoal: return "goal";
    case GoalOutcome::kExhausted: return "exhausted";
    case GoalOutcome::kInfeasible: return "infeasible";
  }
  return "?";
}

namespace {

// Shared body of plan() and select_goal(): graph over start and the given
// goals, validated once. Returns the graph; fills timing and counts.
NavGraph build_and_validate(const HeightMap& map, const RobotShape& shape, const Pose& start,
                            const std::vector<Pose>& goals, const PlannerConfig& config, const CostBackend& backend,
                            Rng& rng, PlanStats& stats) {
  BuildStats build;
  NavGraph graph = build_graph(map, shape, start, goals, config, rng, &build);
  stats.sampling_ms = build.sampling_ms;
  stats.iterations = build.iterations;
  const auto tv = Clock::now();
  stats.n_pruned = validate_graph(graph, map, backend, config.weights, config.budgets.risk_threshold,
                                  config.worker_count());
  stats.validation_ms = elapsed_ms(tv);
  stats.n_vertices = graph.vertex_count();
  stats.n_edges = graph.edge_count();
  return graph;
}

}  // namespace

PlanResult plan(const HeightMap& map, const RobotShape& shape, const Pose& start_guess, const Pose& goal_guess,
                const PlannerConfig& config, const CostBackend& backend, Rng& rng) {
  const auto t0 = Clock::now();
  PlanResult result;
  const auto start = snap_pose(map, shape, start_guess.x, start_guess.y, start_guess.yaw, rng, config);
  const auto goal =
      start ? snap_pose(map, shape, goal_guess.x, goal_guess.y, goal_guess.yaw, rng, config) : std::nullopt;
  if (!start || !goal) {
    result.failure = start ? PlanFailure::kGoalInvalid : PlanFailure::kStartInvalid;
    result.stats.total_ms = elapsed_ms(t0);
    return result;
  }

  NavGraph graph = build_and_validate(map, shape, *start, {*goal}, config, backend, rng, result.stats);
  const auto ts = Clock::now();
  result.path = astar(graph, 0, 1, config.weights.w_t() * backend.time_lower_bound_per_meter());
  result.stats.search_ms = elapsed_ms(ts);
  if (!result.path) result.failure = PlanFailure::kUnreachable;
  result.stats.total_ms = elapsed_ms(t0);
  return result;
}

GoalSelection select_goal(const HeightMap& map, const RobotShape& shape, const Pose& start_guess,
                          const std::vector<Pose>& exploration, int next_index, const PlannerConfig& config,
                          const CostBackend& backend, Rng& rng) {
  const auto t0 = Clock::now();
  GoalSelection sel;
  if (next_index >= static_cast<int>(exploration.size())) {
    sel.outcome = GoalOutcome::kExhausted;
    return sel;
  }
  const auto start = snap_pose(map, shape, start_guess.x, start_guess.y, start_guess.yaw, rng, config);
  if (!start) {
    sel.stats.total_ms = elapsed_ms(t0);
    return sel;
  }

  std::vector<Pose> goals;
  std::vector<int> goal_source;
  for (int i = std::max(0, next_index); i < static_cast<int>(exploration.size()); ++i) {
    const Pose& p = exploration[static_cast<std::size_t>(i)];
    // A pose without a heading accepts any yaw; try facing away from the robot first.
    const bool free_yaw = !is_known(p.yaw);
    const double yaw = free_yaw ? std::atan2(p.y - start->y, p.x - start->x) : p.yaw;
    if (auto g = snap_with_tolerance(map, shape, p.x, p.y, yaw, free_yaw ? std::numbers::pi : config.snap_yaw, rng,
                                     config)) {
      goals.push_back(*g);
      goal_source.push_back(i);
    }
  }
  if (goals.empty()) {
    sel.stats.total_ms = elapsed_ms(t0);
    return sel;
  }

  NavGraph graph = build_and_validate(map, shape, *start, goals, config, backend, rng, sel.stats);
  const auto ts = Clock::now();
  const double hpm = config.weights.w_t() * backend.time_lower_bound_per_meter();
  for (int k = static_cast<int>(goals.size()) - 1; k >= 0; --k) {
    if (auto path = astar(graph, 0, k + 1, hpm)) {
      sel.outcome = GoalOutcome::kGoal;
      sel.goal_index = goal_source[static_cast<std::size_t>(k)];
      sel.path = std::move(path);
      break;
    }
  }
  sel.stats.search_ms = elapsed_ms(ts);
  sel.stats.total_ms = elapsed_ms(t0);
  return sel;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  return out;
}

bool is_header(const std::vector<std::string>& cells) {
  return !cells.empty() && !cells[0].empty() && (std::isalpha(static_cast<unsigned char>(cells[0][0])) != 0) &&
         cells[0] != "nan" && cells[0] != "inf";
}

double csv_number(const std::string& token, const std::string& source, int line_no) {
  try {
    return parse_double(token);
  } catch (const FormatError& e) {
    throw FormatError(source + ":" + std::to_string(line_no) + ": " + e.what());
  }
}

}  // namespace

std::vector<Pose> read_pose_csv(std::istream& in, const std::string& source) {
  std::vector<Pose> poses;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (poses.empty() && line_no == 1 && is_header(cells)) continue;
    if (cells.size() != 2 && cells.size() != 3) {
      throw FormatError(source + ":" + std::to_string(line_no) + ": expected 'x,y[,yaw]'");
    }
    Pose p;
    p.x = csv_number(cells[0], source, line_no);
    p.y = csv_number(cells[1], source, line_no);
    p.yaw = cells.size() == 3 ? csv_number(cells[2], source, line_no) : kUnknown;
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw FormatError(source + ":" + std::to_string(line_no) + ": coordinates must be finite");
    }
    if (is_known(p.yaw)) p.yaw = wrap_angle(p.yaw);
    poses.push_back(p);
  }
  return poses;
}

std::vector<Pose> load_pose_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open pose file '" + path.string() + "'");
  return read_pose_csv(in, path.string());
}

void write_path_csv(std::ostream& out, const NavPath& path) {
  out << "x,y,z,yaw,seg_ct,seg_ce,seg_cr,seg_cost\n";
  for (std::size_t i = 0; i < path.poses.size(); ++i) {
    const Pose& p = path.poses[i];
    const MotionCost c = i == 0 ? MotionCost{} : path.segments[i - 1];
    const double cost = i == 0 ? 0.0 : path.segment_cost[i - 1];
    out << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.z) << ','
        << format_double(p.yaw) << ',' << format_double(c.c_t) << ',' << format_double(c.c_e) << ','
        << format_double(c.c_r) << ',' << format_double(cost) << '\n';
  }
}

NavPath read_path_csv(std::istream& in, const std::string& source) {
  NavPath path;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (line_no == 1 && is_header(cells)) continue;
    if (cells.size() != 8) throw FormatError(source + ":" + std::to_string(line_no) + ": expected 8 columns");
    std::array<double, 8> v{};
    for (std::size_t k = 0; k < 8; ++k) v[k] = csv_number(cells[k], source, line_no);
    Pose p;
    p.x = v[0];
    p.y = v[1];
    p.z = v[2];
    p.yaw = v[3];
    path.poses.push_back(p);
    if (path.poses.size() > 1) {
      path.segments.push_back({v[4], v[5], v[6]});
      path.segment_cost.push_back(v[7]);
      path.total_cost += v[7];
    }
  }
  return path;
}

}  // namespace artnav
