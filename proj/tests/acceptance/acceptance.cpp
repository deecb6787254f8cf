#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "artnav/evaluation.hpp"
#include "artnav/map_pipeline.hpp"
#include "artnav/planner.hpp"
#include "artnav/reachability.hpp"
#include "artnav/scenario.hpp"
#include "artnav/world.hpp"
#include "oracles.hpp"

using namespace artnav;

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kPi = std::numbers::pi;
const fs::path kScenarios = ARTNAV_SCENARIO_DIR;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    detail += (detail.empty() ? "" : "; ") + what;
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Pose pose(double x, double y, double yaw = 0.0) {
  Pose p;
  p.x = x;
  p.y = y;
  p.yaw = yaw;
  return p;
}

HeightMap flat_map(int n = 200, double res = 0.04) {
  HeightMap m = HeightMap::centered_at(n, n, res, {0.0, 0.0});
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      m.set_elevation({ix, iy}, 0.0);
      m.set_observed({ix, iy}, true);
      m.set_foothold({ix, iy}, 1.0);
      m.set_steppable({ix, iy}, true);
    }
  return m;
}

HeightMap desk_map() {
  std::mt19937_64 rng(2024);
  return oracle::random_map(rng, 200, 0.04, 0.005);
}

// Reports ----------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Drops the wall-clock planning_ms column.
std::string mask_plans(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    const auto p = line.find(',');
    const auto q = p == std::string::npos ? p : line.find(',', p + 1);
    out += (q == std::string::npos ? line : line.substr(0, p) + line.substr(q)) + "\n";
  }
  return out;
}

std::map<std::string, std::string> report_files(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), dir).string();
    const std::string text = slurp(e.path());
    files[rel] = rel == "plans.csv" ? mask_plans(text) : text;
  }
  return files;
}

struct Run {
  ScenarioReport report;
  double wall = 0.0;
  fs::path dir;
};

Run run(const std::string& scenario, const std::string& tag, bool record_maps = false) {
  ScenarioConfig c = load_scenario(kScenarios / (scenario + ".scn"));
  c.record_maps = record_maps;
  Run r;
  r.dir = fs::temp_directory_path() / "artnav_acceptance" / (scenario + "_" + tag);
  fs::remove_all(r.dir);
  const auto t0 = Clock::now();
  r.report = run_scenario(c);
  write_report(r.dir, r.report);
  r.wall = seconds_since(t0);
  return r;
}

std::string describe(const ScenarioReport& r) {
  std::ostringstream s;
  s << r.name << ": " << to_string(r.outcome) << ", collisions " << r.collision_steps << ", travelled "
    << fmt("%.2f", r.distance_travelled) << " m";
  return s.str();
}

// Criteria ---------------------------------------------------------------

Verdict budgets() {
  Verdict v;
  const HeightMap m = desk_map();
  const RobotShape s = RobotShape::anymal_like();
  const PlannerConfig c;
  const auto t0 = Clock::now();
  double worst_ms = 0.0;
  int worst_v = 0, worst_e = 0;
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    BuildStats st;
    const std::vector<Pose> goals{pose(2.5, 2.5)};
    const NavGraph g = build_graph(m, s, pose(-2.5, -2.5), goals, c, rng, &st);
    worst_ms = std::max(worst_ms, st.sampling_ms);
    worst_v = std::max(worst_v, g.vertex_count());
    worst_e = std::max(worst_e, g.count_edges(EdgeState::kUnchecked));
    v.require(st.sampling_ms <= c.budgets.max_sampling_time * 1000.0 + 50.0, "sampling time over T + 50 ms");
    v.require(g.vertex_count() <= c.budgets.max_vertices + static_cast<int>(goals.size()), "vertex budget exceeded");
    v.require(g.count_edges(EdgeState::kUnchecked) <= c.budgets.max_unchecked_edges + 20, "edge budget exceeded");
  }
  const double total = seconds_since(t0);
  v.require(total < 180.0, "runtime over 3 min");
  v.note("50 runs, max sampling " + fmt("%.1f", worst_ms) + " ms, max vertices " + std::to_string(worst_v) +
         ", max unchecked edges " + std::to_string(worst_e) + ", " + fmt("%.1f", total) + " s");
  return v;
}

Verdict real_time() {
  Verdict v;
  const HeightMap m = desk_map();
  const RobotShape s = RobotShape::anymal_like();
  const PlannerConfig c;
  const auto backend = make_backend(c, s);
  double worst = 0.0;
  int under = 0, found = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    const PlanResult r = plan(m, s, pose(-2.5, -2.5), pose(2.5, 2.5), c, *backend, rng);
    const PlanStats& st = r.stats;
    worst = std::max(worst, st.total_ms);
    if (r.path) ++found;
    if (st.total_ms < 4440.0) ++under;
    v.require(st.total_ms <= c.budgets.max_sampling_time * 1000.0 + st.validation_ms + st.search_ms,
              "plan time above T + validation + search");
  }
  v.require(under == 100, std::to_string(under) + "/100 under 4.44 s");
  v.note("100/100 runs, worst " + fmt("%.0f", worst) + " ms, paths found " + std::to_string(found));
  return v;
}

Verdict astar_optimality() {
  Verdict v;
  Rng rng(11);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  std::uniform_real_distribution<double> extra(0.0, 2.0);
  std::uniform_int_distribution<int> nv(2, 50);
  int reachable = 0, mismatches = 0;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 200; ++trial) {
    const int n = nv(rng);
    NavGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex(pose(u(rng), u(rng)));
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int e = 0; e < 3 * n; ++e) {
      const int a = pick(rng), b = pick(rng);
      if (a == b) continue;
      g.add_edge(a, b);
      Edge& edge = g.edges().back();
      const Pose& pa = g.vertices()[a];
      const Pose& pb = g.vertices()[b];
      edge.state = extra(rng) < 0.2 ? EdgeState::kPruned : EdgeState::kValid;
      // Dyadic costs keep every path sum exact.
      edge.combined = std::ceil((std::hypot(pb.x - pa.x, pb.y - pa.y) + extra(rng)) * 64.0) / 64.0;
    }
    const int s = pick(rng), t = pick(rng);
    const auto want = oracle::shortest_cost(g, s, t);
    const auto got = astar(g, s, t, 1.0);
    if (got.has_value() != want.has_value() || (got && got->total_cost != *want)) ++mismatches;
    if (got) ++reachable;
  }
  const double total = seconds_since(t0);
  v.require(mismatches == 0, std::to_string(mismatches) + " cost mismatches");
  v.require(total < 30.0, "runtime over 30 s");
  v.note("200 graphs, " + std::to_string(reachable) + " reachable, exact match, " + fmt("%.2f", total) + " s");
  return v;
}

bool segment_hits_rect(const Pose& a, const Pose& b, double x0, double x1, double y0, double y1) {
  for (int i = 0; i <= 200; ++i) {
    const double t = i / 200.0;
    const double x = a.x + t * (b.x - a.x), y = a.y + t * (b.y - a.y);
    if (x >= x0 && x <= x1 && y >= y0 && y <= y1) return true;
  }
  return false;
}

Verdict risk_pruning() {
  Verdict v;
  // Steppable but hazardous band (score 0.5) across the direct route, open above y = 1.6.
  constexpr double kX0 = -0.6, kX1 = 0.6, kY0 = -4.0, kY1 = 1.6;
  HeightMap m = flat_map();
  for (int iy = 0; iy < m.size_y(); ++iy)
    for (int ix = 0; ix < m.size_x(); ++ix) {
      const Vec2 c = m.cell_center({ix, iy});
      if (c.x >= kX0 && c.x <= kX1 && c.y >= kY0 && c.y <= kY1) m.set_foothold({ix, iy}, 0.5);
    }
  const RobotShape s = RobotShape::anymal_like();
  PlannerConfig c;
  const auto backend = make_backend(c, s);
  int pruned_total = 0, over = 0, crossings = 0, paths = 0;
  for (int seed = 0; seed < 5; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    NavGraph g = build_graph(m, s, pose(-2.0, 0.0), {pose(2.0, 0.0)}, c, rng);
    pruned_total += validate_graph(g, m, *backend, c.weights, 0.5, c.worker_count());
    for (const Edge& e : g.edges())
      if (e.state == EdgeState::kValid && e.cost.c_r > 0.5) ++over;
    Rng rng2(static_cast<std::uint64_t>(seed));
    const PlanResult r = plan(m, s, pose(-2.0, 0.0), pose(2.0, 0.0), c, *backend, rng2);
    if (!r.path) continue;
    ++paths;
    for (std::size_t i = 1; i < r.path->poses.size(); ++i)
      if (segment_hits_rect(r.path->poses[i - 1], r.path->poses[i], kX0, kX1, kY0, kY1)) ++crossings;
  }
  v.require(over == 0, std::to_string(over) + " surviving edges above R");
  v.require(pruned_total >= 1, "no edge pruned");
  v.require(paths == 5, std::to_string(paths) + "/5 paths found");
  v.require(crossings == 0, std::to_string(crossings) + " path segments cross the band");
  v.note(std::to_string(pruned_total) + " edges pruned over 5 seeds, " + std::to_string(paths) +
         " detouring paths, 0 surviving edges above R");
  return v;
}

Verdict combiner() {
  Verdict v;
  v.require(combine(MotionCost{0.1, 0.08, 0.2}, CostWeights(1.0, 0.0, 5.0)) == 1.1, "combine example != 1.1");
  Rng rng(5);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  std::uniform_real_distribution<double> cost(0.0, 1.0);
  std::uniform_int_distribution<int> nv(5, 40);
  int compared = 0, differ = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = nv(rng);
    NavGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex(pose(u(rng), u(rng)));
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int e = 0; e < 4 * n; ++e) {
      const int a = pick(rng), b = pick(rng);
      if (a == b) continue;
      g.add_edge(a, b);
      Edge& edge = g.edges().back();
      edge.state = EdgeState::kValid;
      edge.cost = MotionCost{cost(rng), cost(rng), cost(rng)};
    }
    const CostWeights base(1.0, 0.3, 5.0);
    const auto solve = [&](double k) {
      NavGraph h = g;
      const CostWeights w(k * 1.0, k * 0.3, k * 5.0);
      for (Edge& e : h.edges()) e.combined = combine(e.cost, w);
      return astar(h, 0, n - 1, 0.0);
    };
    const auto ref = solve(1.0);
    for (double k : {0.5, 3.0, 16.0}) {
      const auto got = solve(k);
      if (ref.has_value() != got.has_value()) {
        ++differ;
        continue;
      }
      if (!ref) continue;
      ++compared;
      bool same = ref->poses.size() == got->poses.size();
      for (std::size_t i = 0; same && i < ref->poses.size(); ++i)
        same = ref->poses[i].x == got->poses[i].x && ref->poses[i].y == got->poses[i].y;
      if (!same) ++differ;
    }
    (void)base;
  }
  v.require(differ == 0, std::to_string(differ) + " vertex sequences changed under scaling");
  v.note("combine = 1.1 exactly; " + std::to_string(compared) + " scaled searches on 20 graphs identical");
  return v;
}

Verdict morphology() {
  Verdict v;
  const SafetyParams sp;
  const double res = 0.04;
  std::mt19937_64 rng(6);
  int mismatches = 0;
  for (int k = 0; k < 50; ++k) {
    std::bernoulli_distribution b(0.55 + 0.4 * (k % 5) / 4.0);
    Mask m(64 * 64);
    for (auto& x : m) x = b(rng);
    const Mask got = erode(dilate(m, 64, 64, sp.r_dilate / res), 64, 64, sp.r_erode / res);
    const Mask want =
        oracle::erode(oracle::dilate(m, 64, 64, sp.r_dilate / res), 64, 64, sp.r_erode / res);
    if (got != want) ++mismatches;
  }
  v.require(mismatches == 0, std::to_string(mismatches) + "/50 masks differ from the oracle");

  // Half-plane of hazard on x >= 20: measure how far the steppable edge retreats.
  HeightMap hp(64, 64, res, {0.0, 0.0});
  for (int iy = 0; iy < 64; ++iy)
    for (int ix = 0; ix < 64; ++ix) {
      hp.set_elevation({ix, iy}, 0.0);
      hp.set_observed({ix, iy}, true);
    }
  score_footholds(hp, FootholdModel{});
  for (int iy = 0; iy < 64; ++iy)
    for (int ix = 32; ix < 64; ++ix) hp.set_foothold({ix, iy}, 0.1);
  apply_safety_margin(hp, sp);
  int last = -1;
  for (int ix = 0; ix < 32; ++ix)
    if (hp.steppable({ix, 32})) last = ix;
  const double retreat = (31 - last) * res;
  v.require(std::abs(retreat - (sp.r_erode - sp.r_dilate)) <= res, "half-plane retreat " + fmt("%.2f", retreat));

  HeightMap spot = hp;
  score_footholds(spot, FootholdModel{});
  spot.set_foothold({16, 16}, 0.0);
  apply_safety_margin(spot, sp);
  v.require(spot.steppable({16, 16}), "isolated spot not erased");
  v.note("50 masks exact, retreat " + fmt("%.2f", retreat) + " m vs " + fmt("%.2f", sp.r_erode - sp.r_dilate) +
         " m, isolated spot erased");
  return v;
}

PointCloud random_cloud(std::mt19937_64& rng, const HeightMap& m, int n) {
  const double lo = m.origin().x - 0.3, hi = m.origin().x + m.resolution() * m.size_x() + 0.3;
  std::uniform_real_distribution<double> ux(lo, hi);
  std::uniform_real_distribution<double> uz(-0.3, 1.5);
  PointCloud c;
  const Vec2 g = m.grid_center();
  c.sensor_origin = {g.x + 0.13, g.y - 0.07, 0.55};
  for (int i = 0; i < n; ++i) c.points.push_back({ux(rng), ux(rng) - m.origin().x + m.origin().y, uz(rng)});
  return c;
}

Verdict virtual_surfaces() {
  Verdict v;
  std::mt19937_64 rng(17);
  int bad = 0, cells = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 20 + 3 * trial / 2;
    HeightMap m(n, n, 0.05, {-1.0, -1.0});
    const PointCloud c = random_cloud(rng, m, 200 + 20 * trial);
    const auto want = oracle::virtual_surfaces(m, c);
    compute_virtual_surfaces(m, c);
    for (std::size_t i = 0; i < want.size(); ++i) {
      const double got = m.upper_bound_layer()[i];
      if (std::isnan(got) != std::isnan(want[i]) || (!std::isnan(got) && std::abs(got - want[i]) > 1e-9)) ++bad;
      if (!std::isnan(got)) ++cells;
    }
  }
  v.require(bad == 0, std::to_string(bad) + " cells differ from the ray oracle");

  // Single-frame planning from the start pose, feature on and off.
  const ScenarioConfig on_cfg = load_scenario(kScenarios / "occluded_ramp_on.scn");
  const Pose goal = on_cfg.exploration.back();
  const auto frame_plan = [&](bool enabled) {
    PipelineParams params = on_cfg.pipeline;
    params.flags.virtual_surfaces = enabled;
    const PointCloud cloud = sense(on_cfg.world, 0.0, 0.0, 0.0, on_cfg.sensor);
    const HeightMap map = process_frame(HeightMap::centered_at(200, 200, 0.04, {0.0, 0.0}), cloud,
                                        RobotFrame{{0.0, 0.0}, 0.0}, params);
    const auto backend = make_backend(on_cfg.planner, on_cfg.shape);
    Rng r(1);
    return plan(map, on_cfg.shape, pose(0.0, 0.0), goal, on_cfg.planner, *backend, r).path.has_value();
  };
  const bool frame_on = frame_plan(true), frame_off = frame_plan(false);

  const Run on = run("occluded_ramp_on", "a");
  const Run off = run("occluded_ramp_off", "a");
  v.require(on.report.outcome == ScenarioOutcome::kGoalReached, "closed loop with the feature on: " + describe(on.report));
  v.require(off.report.outcome == ScenarioOutcome::kInfeasible, "closed loop with the feature off: " + describe(off.report));
  v.note(std::to_string(cells) + " bounded cells match the oracle within 1e-9");
  v.note(std::string("single-frame plan to the platform: on ") + (frame_on ? "found" : "none") + ", off " +
         (frame_off ? "found" : "none"));
  if (v.pass) v.note(describe(on.report) + "; " + describe(off.report));
  return v;
}

Verdict ceiling() {
  Verdict v;
  const CeilingFilterParams p;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(0.0, 8.0);
  std::uniform_real_distribution<double> z(-1.0, 3.5);
  std::uniform_real_distribution<double> a(-kPi, kPi);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const double dist = d(rng), ang = a(rng), height = z(rng);
    const double closed = std::min(p.h_cap, p.h_near + p.slope * std::max(0.0, dist - p.d_0));
    if (ceiling_threshold(dist, p) != closed) ++bad;
    PointCloud c;
    c.points.push_back({1.0 + dist * std::cos(ang), -0.5 + dist * std::sin(ang), 0.2 + height});
    const bool kept = !ceiling_filter(c, 0.2, {1.0, -0.5}, p).points.empty();
    const double dxy = std::hypot(c.points[0].x - 1.0, c.points[0].y + 0.5);
    const bool want = c.points[0].z <= 0.2 + std::min(p.h_cap, p.h_near + p.slope * std::max(0.0, dxy - p.d_0));
    if (kept != want) ++bad;
  }
  v.require(bad == 0, std::to_string(bad) + " of 1000 samples disagree with the closed form");

  const Run on = run("overhang_incline", "a");
  const Run off = run("overhang_incline_nofilter", "a");
  v.require(on.report.outcome == ScenarioOutcome::kGoalReached, describe(on.report));
  v.require(on.report.max_stall_cycles <= 3,
            "stalled for " + std::to_string(on.report.max_stall_cycles) + " replan cycles");
  v.require(on.report.collision_steps == 0, "truth collisions under the overhang");
  v.note("1000 samples exact; " + describe(on.report) + ", max stall " + std::to_string(on.report.max_stall_cycles) +
         " cycles; without the filter: " + describe(off.report));
  return v;
}

Verdict reachability() {
  Verdict v;
  std::mt19937_64 rng(2025);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::uniform_real_distribution<double> yaw(-kPi, kPi);
  std::uniform_real_distribution<double> tilt(-0.3, 0.3);
  std::uniform_real_distribution<double> dz(-0.25, 0.25);
  const RobotShape s = RobotShape::anymal_like();
  RobotShape big = s;
  for (auto& b : big.limb_boxes) {
    b.half_extents.x += 0.05;
    b.half_extents.y += 0.05;
    b.half_extents.z += 0.05;
  }
  int tested = 0, disagree = 0, non_monotone = 0;
  std::array<int, 3> tally{};
  for (int mi = 0; mi < 10; ++mi) {
    const HeightMap m = oracle::random_map(rng, 64, 0.04, mi % 2 ? 0.08 : 0.005);
    int here = 0;
    for (int k = 0; here < 20 && k < 1000; ++k) {
      Pose p;
      p.x = u(rng);
      p.y = u(rng);
      p.yaw = yaw(rng);
      if (k % 2 == 0) {
        const auto a = augment_pose(m, s, p.x, p.y, p.yaw);
        if (!a) continue;
        p = *a;
      } else {
        const double g = m.elevation_at(p.x, p.y);
        p.z = (is_known(g) ? g : 0.0) + 0.55 + dz(rng);
        p.roll = tilt(rng);
        p.pitch = tilt(rng);
      }
      ++here;
      ++tested;
      const PoseVerdict got = check_pose(m, s, p);
      ++tally[static_cast<int>(got)];
      if (got != oracle::check_pose(m, s, p)) ++disagree;
      const bool torso = torso_in_collision(m, s, p);
      for (double amount : {0.02, 0.1, 0.2})
        if (torso_in_collision(m, s.with_shrunk_torso(amount), p) && !torso) ++non_monotone;
      if (got == PoseVerdict::kValid && check_pose(m, big, p) == PoseVerdict::kLimbUnreachable) ++non_monotone;
    }
  }
  v.require(tested == 200, std::to_string(tested) + " poses tested");
  v.require(disagree == 0, std::to_string(disagree) + " verdicts disagree with the oracle");
  v.require(non_monotone == 0, std::to_string(non_monotone) + " monotonicity violations");
  v.note(std::to_string(tested) + " poses on 10 maps agree (valid " + std::to_string(tally[0]) + ", torso " +
         std::to_string(tally[1]) + ", limb " + std::to_string(tally[2]) + "), monotone");
  return v;
}

double min_edge_gap(const ScenarioReport& r, double edge_x) {
  double gap = 1e9;
  for (const TrajectorySample& t : r.trajectory) gap = std::min(gap, edge_x - t.x);
  return gap;
}

Verdict closed_loop() {
  Verdict v;
  constexpr double kCliffEdge = 3.02;  // last platform cell ends here
  const SafetyParams sp;
  for (const char* name : {"corridor", "cliff", "hazard_band"}) {
    const Run a = run(name, "a", true);
    const Run b = run(name, "b", true);
    const ScenarioReport& r = a.report;
    const bool cliff = std::string(name) == "cliff";
    const ScenarioOutcome want = cliff ? ScenarioOutcome::kInfeasible : ScenarioOutcome::kGoalReached;
    v.require(r.outcome == want, describe(r));
    v.require(r.collision_steps == 0, std::string(name) + " truth collisions");
    v.require(std::max(a.wall, b.wall) < 60.0, std::string(name) + " took " + fmt("%.1f", std::max(a.wall, b.wall)) + " s");
    v.require(report_files(a.dir) == report_files(b.dir), std::string(name) + " reports differ between runs");
    std::string extra;
    if (cliff) {
      const double gap = min_edge_gap(r, kCliffEdge);
      v.require(gap >= sp.r_erode - sp.r_dilate, "cliff edge gap " + fmt("%.2f", gap));
      extra = ", edge gap " + fmt("%.2f", gap) + " m";
    }
    v.note(describe(r) + extra + ", " + fmt("%.1f", std::max(a.wall, b.wall)) + " s");
  }
  if (v.pass) v.note("reports byte-identical");
  return v;
}

Verdict severe_metric() {
  Verdict v;
  HeightMap base(200, 60, 0.04, {-1.0, -1.2});
  for (int y = 0; y < base.size_y(); ++y)
    for (int x = 0; x < base.size_x(); ++x) {
      base.set_elevation({x, y}, 0.0);
      base.set_foothold({x, y}, 1.0);
      base.set_steppable({x, y}, true);
    }
  const auto post = [](HeightMap& m, double x, double top) {
    const CellIndex c = *m.world_to_cell(x, 0.0);
    m.set_elevation(c, top);
    m.set_steppable(c, false);
  };
  const auto line = [](int n) {
    NavPath p;
    for (int i = 0; i < n; ++i) p.poses.push_back(Pose{static_cast<double>(i), 0.0, 0.55, 0.0, 0.0, 0.0});
    p.segments.resize(static_cast<std::size_t>(n - 1));
    p.segment_cost.assign(static_cast<std::size_t>(n - 1), 1.0);
    return p;
  };
  const RobotShape s = RobotShape::anymal_like();
  const auto eval = [&](std::initializer_list<double> posts, double top, int n, double shrink) {
    HeightMap m = base;
    for (double x : posts) post(m, x, top);
    return evaluate_path(m, s, line(n), shrink);
  };
  EvalRecord r = eval({0.0, 2.0, 4.0}, 1.0, 6, 0.1);
  v.require(r.colliding == 2 && r.severe == true, "2 of 5 should be severe");
  r = eval({0.0, 3.0}, 1.0, 6, 0.1);
  v.require(r.colliding == 1 && r.severe == false, "1 of 5 should not be severe");
  r = eval({1.0}, 1.0, 4, 0.1);
  v.require(r.colliding == 1 && r.severe == false, "exactly 1 of 3 should not be severe");
  r = eval({0.0, 1.0}, 1.0, 2, 0.1);
  v.require(r.collision && !r.severe.has_value(), "2-pose path should have no severe verdict");
  r = eval({0.0}, 1.0, 3, 0.1);
  v.require(r.colliding == 0 && !r.collision, "first pose should be skipped");
  v.require(eval({1.0}, 0.42, 2, 0.0).colliding == 1 && eval({1.0}, 0.42, 2, 0.1).colliding == 0,
            "10 cm shrink should lift the torso bottom above a 0.42 m post");
  v.require(eval({1.43}, 1.0, 2, 0.0).colliding == 1 && eval({1.43}, 1.0, 2, 0.1).colliding == 0,
            "10 cm shrink should pull the torso edge inside 0.43 m");
  v.note("> 1/3 rule, >= 3-pose eligibility, first-pose skip and 10 cm shrink reproduced");
  return v;
}

Verdict latency() {
  Verdict v;
  const Run slow = run("pole_latency500", "a");
  const Run fast = run("pole_latency0", "a");
  v.require(slow.report.deviation_events >= 1, "no deviation event with 0.5 s latency");
  v.require(fast.report.deviation_events == 0,
            std::to_string(fast.report.deviation_events) + " deviation events without latency");
  v.note("0.5 s: " + std::to_string(slow.report.deviation_events) + " events, max " +
         fmt("%.2f", slow.report.max_deviation) + " m, " + std::to_string(slow.report.collision_steps) +
         " collision steps; 0 s: " + std::to_string(fast.report.deviation_events) + " events, max " +
         fmt("%.2f", fast.report.max_deviation) + " m");
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"budget enforcement", budgets},
      {"real-time bound", real_time},
      {"A* optimality", astar_optimality},
      {"risk pruning", risk_pruning},
      {"cost combiner", combiner},
      {"safety margin morphology", morphology},
      {"virtual surfaces", virtual_surfaces},
      {"ceiling filter", ceiling},
      {"reachability", reachability},
      {"closed loop", closed_loop},
      {"severe-collision metric", severe_metric},
      {"latency regression", latency},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto t0 = Clock::now();
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failed;
    std::printf("%s %2zu %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, seconds_since(t0),
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
