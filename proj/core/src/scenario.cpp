#include "artnav/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "artnav/errors.hpp"
#include "artnav/key_value.hpp"

namespace artnav {

void ScenarioConfig::validate() const {
  if (exploration.empty()) throw std::invalid_argument("scenario: a goal or exploration path is required");
  if (!(duration > 0.0) || !(dt > 0.0) || !(map_update_period > 0.0) || !(replan_period > 0.0)) {
    throw std::invalid_argument("scenario: duration, dt and periods must be positive");
  }
  if (infeasible_patience < 1) throw std::invalid_argument("scenario: infeasible_patience must be >= 1");
  if (map_cells < 8 || !(map_resolution > 0.0)) throw std::invalid_argument("scenario: invalid map geometry");
  if (world.size_x() == 0) throw std::invalid_argument("scenario: world is required");
  sensor.validate();
  follower.validate();
  planner.validate();
  shape.validate();
  pipeline.ceiling.validate();
  pipeline.safety.validate();
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  const std::filesystem::path p(value);
  return p.is_relative() && !base.empty() ? base / p : p;
}

Pose parse_pose(const KeyValueFile& kv, const KeyValueEntry& e, bool yaw_required) {
  std::vector<double> v;
  try {
    v = parse_doubles(e.value);
  } catch (const FormatError& ex) {
    kv.fail(e, ex.what());
  }
  if (v.size() != 3 && !(v.size() == 2 && !yaw_required)) {
    kv.fail(e, yaw_required ? "expected 'x y yaw'" : "expected 'x y [yaw]'");
  }
  Pose p;
  p.x = v[0];
  p.y = v[1];
  p.yaw = v.size() == 3 ? wrap_angle(v[2]) : kUnknown;
  return p;
}

}  // namespace

ScenarioConfig read_scenario(std::istream& in, const std::string& source, const std::filesystem::path& base_dir) {
  const KeyValueFile kv = KeyValueFile::parse(in, source);
  kv.reject_unknown({"name", "world", "start", "goal", "exploration", "duration", "dt", "map_update_period",
                     "replan_period", "infeasible_patience", "map_cells", "map_resolution", "sensor_*", "follower_*",
                     "latency", "goal_tolerance", "goal_yaw_tolerance", "virtual_surfaces", "safety_margin",
                     "ceiling_filter", "ceiling_*", "safety_*", "planner", "shape", "deviation_threshold",
                     "progress_epsilon", "seed", "record_maps"});
  ScenarioConfig c;
  c.name = kv.get("name").value_or(std::filesystem::path(source).stem().string());
  const auto world = kv.get("world");
  if (!world) throw FormatError(source + ": missing 'world'");
  c.world = load_world(resolve(base_dir, *world));

  if (const auto p = kv.get("planner")) c.planner = load_planner_config(resolve(base_dir, *p));
  if (const auto s = kv.get("shape")) c.shape = load_shape(resolve(base_dir, *s));

  bool have_start = false;
  for (const auto& e : kv.entries()) {
    if (e.key == "start") {
      c.start = parse_pose(kv, e, true);
      have_start = true;
    } else if (e.key == "goal") {
      c.exploration = {parse_pose(kv, e, false)};
    } else if (e.key == "exploration") {
      c.exploration = load_pose_csv(resolve(base_dir, e.value));
    }
  }
  if (!have_start) throw FormatError(source + ": missing 'start'");

  c.duration = kv.get_double("duration", c.duration);
  c.dt = kv.get_double("dt", c.dt);
  c.map_update_period = kv.get_double("map_update_period", c.map_update_period);
  c.replan_period = kv.get_double("replan_period", c.replan_period);
  c.infeasible_patience = kv.get_int("infeasible_patience", c.infeasible_patience);
  c.map_cells = kv.get_int("map_cells", c.map_cells);
  c.map_resolution = kv.get_double("map_resolution", c.map_resolution);

  c.sensor.mount_height = kv.get_double("sensor_mount_height", c.sensor.mount_height);
  c.sensor.max_range = kv.get_double("sensor_max_range", c.sensor.max_range);
  const auto fan = [&](const std::string& key, double& lo, double& hi, int& count) {
    const auto v = kv.get(key);
    if (!v) return;
    const auto d = parse_doubles(*v);
    if (d.size() != 3) throw FormatError(source + ": " + key + ": expected 'min_deg max_deg count'");
    lo = deg_to_rad(d[0]);
    hi = deg_to_rad(d[1]);
    count = static_cast<int>(d[2]);
  };
  fan("sensor_azimuth_deg", c.sensor.azimuth_min, c.sensor.azimuth_max, c.sensor.azimuth_count);
  fan("sensor_elevation_deg", c.sensor.elevation_min, c.sensor.elevation_max, c.sensor.elevation_count);

  FollowerParams& f = c.follower;
  f.lookahead = kv.get_double("follower_lookahead", f.lookahead);
  f.angular_weight = kv.get_double("follower_angular_weight", f.angular_weight);
  f.kp_lin = kv.get_double("follower_kp_lin", f.kp_lin);
  f.kp_ang = kv.get_double("follower_kp_ang", f.kp_ang);
  f.v_max = kv.get_double("follower_v_max", c.planner.surrogate.v_max);
  f.omega_max = kv.get_double("follower_omega_max", c.planner.surrogate.omega_max);
  f.goal_tolerance = kv.get_double("goal_tolerance", f.goal_tolerance);
  f.goal_yaw_tolerance = kv.get_double("goal_yaw_tolerance", f.goal_yaw_tolerance);
  f.latency = kv.get_double("latency", f.latency);

  PipelineParams& pp = c.pipeline;
  pp.flags.virtual_surfaces = kv.get_bool("virtual_surfaces", true);
  pp.flags.safety_margin = kv.get_bool("safety_margin", true);
  pp.flags.ceiling_filter = kv.get_bool("ceiling_filter", true);
  pp.ceiling.h_near = kv.get_double("ceiling_h_near", pp.ceiling.h_near);
  pp.ceiling.d_0 = kv.get_double("ceiling_d0", pp.ceiling.d_0);
  pp.ceiling.slope = kv.get_double("ceiling_slope", pp.ceiling.slope);
  pp.ceiling.h_cap = kv.get_double("ceiling_h_cap", pp.ceiling.h_cap);
  pp.safety.r_dilate = kv.get_double("safety_r_dilate", pp.safety.r_dilate);
  pp.safety.r_erode = kv.get_double("safety_r_erode", pp.safety.r_erode);
  pp.safety.s_min = kv.get_double("safety_s_min", pp.safety.s_min);

  c.deviation_threshold = kv.get_double("deviation_threshold", c.deviation_threshold);
  c.progress_epsilon = kv.get_double("progress_epsilon", c.progress_epsilon);
  const int seed = kv.get_int("seed", 1);
  if (seed < 0) throw FormatError(source + ": seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.record_maps = kv.get_bool("record_maps", false);

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(source + ": " + e.what());
  }
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open scenario '" + path.string() + "'");
  return read_scenario(in, path.string(), path.parent_path());
}

const char* to_string(ScenarioOutcome o) {
  switch (o) {
    case ScenarioOutcome::kGoalReached: return "goal-reached";
    case ScenarioOutcome::kInfeasible: return "infeasible";
    case ScenarioOutcome::kTimeout: return "timeout";
  }
  return "?";
}

std::string time_token(double t) { return std::to_string(std::llround(t * 1000.0)); }

// ---------------------------------------------------------------------------

ScenarioReport run_scenario(const ScenarioConfig& config) {
  config.validate();
  ScenarioReport report;
  report.name = config.name;

  PlannerConfig planner = config.planner;
  if (planner.budgets.max_iterations == 0) {
    planner.budgets.max_iterations =
        static_cast<long>(std::ceil(planner.budgets.max_sampling_time * kSimIterationsPerSecond));
  }
  planner.budgets.max_sampling_time = 1e9;
  const auto backend = make_backend(planner, config.shape);
  Rng rng(config.seed);

  const GroundTruthWorld& world = config.world;
  const HeightMap truth = world.to_height_map();
  const auto steps_of = [&](double period) {
    return std::max<long>(1, std::lround(period / config.dt));
  };
  const long total_steps = static_cast<long>(std::ceil(config.duration / config.dt - 1e-9));
  const long map_steps = steps_of(config.map_update_period);
  const long replan_steps = steps_of(config.replan_period);
  const Pose& final_goal = config.exploration.back();

  RobotState state{config.start.x, config.start.y, config.start.yaw};
  HeightMap map = HeightMap::centered_at(config.map_cells, config.map_cells, config.map_resolution, state.xy());
  PathFollower follower(config.follower, config.dt);

  int next_index = 0;
  int current_goal = -1;
  int infeasible_streak = 0;
  bool replan_now = true;
  long last_replan = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  int stall = 0;
  bool above_threshold = false;
  bool done = false;

  long step = 0;
  for (; step < total_steps && !done; ++step) {
    const double t = step * config.dt;
    const double base_z = world.ground_at(state.x, state.y).value_or(0.0);

    if (step % map_steps == 0) {
      const PointCloud cloud = sense(world, state.x, state.y, state.yaw, config.sensor);
      map = process_frame(map, cloud, RobotFrame{state.xy(), base_z}, config.pipeline);
    }

    if (replan_now || step - last_replan >= replan_steps) {
      replan_now = false;
      last_replan = step;
      const Pose here{state.x, state.y, 0.0, state.yaw, 0.0, 0.0};
      GoalSelection sel =
          select_goal(map, config.shape, here, config.exploration, next_index, planner, *backend, rng);

      PlanRecord rec;
      rec.t = t;
      rec.step = step;
      rec.stats = sel.stats;
      rec.outcome = sel.outcome;
      rec.goal_index = sel.goal_index;
      rec.path = sel.path;
      if (config.record_maps && sel.path) rec.map = map;
      report.plans.push_back(std::move(rec));

      const double d = planar_distance(state.xy(), final_goal.xy());
      if (d < best_distance - config.progress_epsilon) {
        best_distance = d;
        stall = 0;
      } else if (std::isfinite(best_distance)) {
        report.max_stall_cycles = std::max(report.max_stall_cycles, ++stall);
      } else {
        best_distance = d;
      }

      if (sel.outcome == GoalOutcome::kGoal) {
        infeasible_streak = 0;
        next_index = sel.goal_index;
        current_goal = sel.goal_index;
        follower.publish(sel.path->poses);
      } else if (sel.outcome == GoalOutcome::kExhausted) {
        report.outcome = ScenarioOutcome::kGoalReached;
        done = true;
        break;
      } else {
        current_goal = -1;
        follower.publish({here});
        if (++infeasible_streak >= config.infeasible_patience) {
          report.outcome = ScenarioOutcome::kInfeasible;
          done = true;
          break;
        }
      }
    }

    report.trajectory.push_back({t, state.x, state.y, state.yaw});
    const RobotState cmd = follower.step(state);
    const RobotState next = integrate(cmd, config.dt);
    report.distance_travelled += planar_distance(state.xy(), next.xy());
    state = next;

    if (const auto dev = follower.deviation(state)) {
      report.max_deviation = std::max(report.max_deviation, *dev);
      const bool above = *dev > config.deviation_threshold;
      if (above && !above_threshold) ++report.deviation_events;
      above_threshold = above;
    }

    const auto truth_pose = augment_pose(truth, config.shape, state.x, state.y, state.yaw, planner.torso_height);
    const Pose body = truth_pose.value_or(
        Pose{state.x, state.y, world.ground_at(state.x, state.y).value_or(0.0) + planner.torso_height, state.yaw,
             0.0, 0.0});
    if (truth_torso_collision(world, config.shape, body)) ++report.collision_steps;
    if (const auto cell = world.cell_at(state.x, state.y); !cell || !world.steppable(*cell)) ++report.unsafe_steps;

    if (current_goal >= 0 && follower.goal_reached(state)) {
      if (current_goal + 1 >= static_cast<int>(config.exploration.size())) {
        report.outcome = ScenarioOutcome::kGoalReached;
        done = true;
        ++step;
        break;
      }
      next_index = current_goal + 1;
      current_goal = -1;
      replan_now = true;
    }
  }

  report.steps = step;
  report.sim_time = step * config.dt;
  if (!done) report.outcome = ScenarioOutcome::kTimeout;
  report.trajectory.push_back({report.sim_time, state.x, state.y, state.yaw});
  report.final_goal_distance = planar_distance(state.xy(), final_goal.xy());
  return report;
}

// ---------------------------------------------------------------------------

void write_summary(std::ostream& out, const ScenarioReport& r) {
  out << "name = " << r.name << '\n'
      << "outcome = " << to_string(r.outcome) << '\n'
      << "sim_time = " << format_double(r.sim_time) << '\n'
      << "steps = " << r.steps << '\n'
      << "plans = " << r.plans.size() << '\n'
      << "collision_steps = " << r.collision_steps << '\n'
      << "unsafe_steps = " << r.unsafe_steps << '\n'
      << "deviation_events = " << r.deviation_events << '\n'
      << "max_deviation = " << format_double(r.max_deviation) << '\n'
      << "max_stall_cycles = " << r.max_stall_cycles << '\n'
      << "distance_travelled = " << format_double(r.distance_travelled) << '\n'
      << "final_goal_distance = " << format_double(r.final_goal_distance) << '\n';
}

void write_report(const std::filesystem::path& dir, const ScenarioReport& r) {
  std::filesystem::create_directories(dir / "paths");
  const auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw FormatError("cannot open '" + p.string() + "' for writing");
    return out;
  };

  {
    auto out = open(dir / "trajectory.csv");
    out << "t,x,y,yaw\n";
    for (const auto& s : r.trajectory) {
      out << format_double(s.t) << ',' << format_double(s.x) << ',' << format_double(s.y) << ','
          << format_double(s.yaw) << '\n';
    }
  }
  {
    auto out = open(dir / "plans.csv");
    out << "t,planning_ms,n_vertices,n_edges,n_pruned,path_cost,path_len\n";
    for (const auto& p : r.plans) {
      out << format_double(p.t) << ',' << format_double(p.stats.total_ms) << ',' << p.stats.n_vertices << ','
          << p.stats.n_edges << ',' << p.stats.n_pruned << ','
          << (p.path ? format_double(p.path->total_cost) : std::string("nan")) << ','
          << (p.path ? format_double(p.path->length()) : std::string("nan")) << '\n';
    }
  }
  {
    auto out = open(dir / "summary.txt");
    write_summary(out, r);
  }
  for (const auto& p : r.plans) {
    if (!p.path) continue;
    const std::string token = time_token(p.t);
    auto out = open(dir / "paths" / ("path_" + token + ".csv"));
    write_path_csv(out, *p.path);
    if (p.map) save_map(dir / "paths" / ("map_" + token + ".ahm"), *p.map);
  }
}

}  // namespace artnav
