#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "artnav/errors.hpp"
#include "artnav/evaluation.hpp"
#include "artnav/key_value.hpp"
#include "artnav/planner.hpp"
#include "artnav/reachability.hpp"
#include "artnav/scenario.hpp"
#include "artnav/terrain_map.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNoResult = 2;

artnav::Pose parse_pose_flag(const std::string& text, const char* flag) {
  const auto v = artnav::parse_doubles(text);
  if (v.size() != 3) throw artnav::FormatError(std::string(flag) + ": expected x,y,yaw");
  artnav::Pose p;
  p.x = v[0];
  p.y = v[1];
  p.yaw = artnav::wrap_angle(v[2]);
  return p;
}

struct PlanArgs {
  std::string map, shape, config, start, goal, out, metrics;
  unsigned long long seed = 1;
};

int cmd_plan(const PlanArgs& a) {
  const artnav::HeightMap map = artnav::load_map(a.map);
  const artnav::RobotShape shape = a.shape.empty() ? artnav::RobotShape::anymal_like() : artnav::load_shape(a.shape);
  const artnav::PlannerConfig config = a.config.empty() ? artnav::PlannerConfig{} : artnav::load_planner_config(a.config);
  const auto backend = artnav::make_backend(config, shape);
  artnav::Rng rng(a.seed);
  const auto result = artnav::plan(map, shape, parse_pose_flag(a.start, "--start"), parse_pose_flag(a.goal, "--goal"),
                                   config, *backend, rng);

  const auto& s = result.stats;
  std::ostringstream line;
  line << "outcome=" << (result.path ? "path" : "no-path") << " reason=" << artnav::to_string(result.failure)
       << " planning_ms=" << s.total_ms << " sampling_ms=" << s.sampling_ms << " validation_ms=" << s.validation_ms
       << " search_ms=" << s.search_ms << " vertices=" << s.n_vertices << " edges=" << s.n_edges
       << " pruned=" << s.n_pruned;
  if (result.path) line << " cost=" << result.path->total_cost << " length=" << result.path->length();
  if (a.metrics.empty()) {
    std::cout << line.str() << '\n';
  } else {
    std::ofstream m(a.metrics);
    if (!m) throw artnav::FormatError("cannot open '" + a.metrics + "' for writing");
    m << line.str() << '\n';
  }

  if (!result.path) return kExitNoResult;
  if (a.out.empty()) {
    artnav::write_path_csv(std::cout, *result.path);
  } else {
    std::ofstream out(a.out);
    if (!out) throw artnav::FormatError("cannot open '" + a.out + "' for writing");
    artnav::write_path_csv(out, *result.path);
  }
  return kExitOk;
}

struct SimulateArgs {
  std::string scenario, report_dir;
  long long seed = -1;
  bool record_maps = false;
};

int cmd_simulate(const SimulateArgs& a) {
  artnav::ScenarioConfig config = artnav::load_scenario(a.scenario);
  if (a.seed >= 0) config.seed = static_cast<std::uint64_t>(a.seed);
  if (a.record_maps) config.record_maps = true;
  const artnav::ScenarioReport report = artnav::run_scenario(config);
  if (!a.report_dir.empty()) artnav::write_report(a.report_dir, report);
  artnav::write_summary(std::cout, report);
  return report.outcome == artnav::ScenarioOutcome::kGoalReached ? kExitOk : kExitNoResult;
}

struct EvalArgs {
  std::string paths, maps, shape, out, heatmap;
  double shrink = 0.10;
  double risk_cutoff = 0.5;
  unsigned threads = 1;
};

int cmd_eval(const EvalArgs& a) {
  const artnav::RobotShape shape = a.shape.empty() ? artnav::RobotShape::anymal_like() : artnav::load_shape(a.shape);
  artnav::EvalOptions options;
  options.shrink = a.shrink;
  options.risk_cutoff = a.risk_cutoff;
  options.threads = a.threads;
  const auto records = artnav::evaluate_bundle(a.paths, a.maps.empty() ? a.paths : a.maps, shape, options);
  const auto summary = artnav::summarize(records, a.risk_cutoff);

  if (!a.out.empty()) {
    std::filesystem::create_directories(a.out);
    std::ofstream csv(std::filesystem::path(a.out) / "eval.csv");
    artnav::write_eval_csv(csv, records);
    std::ofstream sum(std::filesystem::path(a.out) / "summary.txt");
    artnav::write_eval_summary(sum, summary);
  }
  if (!a.heatmap.empty()) {
    std::ofstream pgm(a.heatmap);
    if (!pgm) throw artnav::FormatError("cannot open '" + a.heatmap + "' for writing");
    artnav::write_cost_heatmap(pgm, records);
  }
  artnav::write_eval_summary(std::cout, summary);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Legged-robot navigation planner: planning, simulation and path evaluation"};
  app.require_subcommand(1);

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Plan a single path on a stored height map");
  plan->add_option("--map", plan_args.map, "Height map (.ahm)")->required();
  plan->add_option("--shape", plan_args.shape, "Robot shape (shape.cfg)");
  plan->add_option("--config", plan_args.config, "Planner configuration (planner.cfg)");
  plan->add_option("--start", plan_args.start, "Start pose x,y,yaw [m, m, rad]")->required();
  plan->add_option("--goal", plan_args.goal, "Goal pose x,y,yaw [m, m, rad]")->required();
  plan->add_option("--seed", plan_args.seed, "Random seed");
  plan->add_option("--out", plan_args.out, "Path CSV output (default: stdout)");
  plan->add_option("--metrics", plan_args.metrics, "Metrics line output (default: stdout)");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Run a closed-loop scenario");
  sim->add_option("--scenario", sim_args.scenario, "Scenario file (.scn)")->required();
  sim->add_option("--seed", sim_args.seed, "Random seed (overrides the scenario)");
  sim->add_option("--report-dir", sim_args.report_dir, "Directory for report files");
  sim->add_flag("--record-maps", sim_args.record_maps, "Store the map snapshot of every published path");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate recorded paths against their map snapshots");
  eval->add_option("--paths", eval_args.paths, "Directory with path_<t>.csv files")->required();
  eval->add_option("--maps", eval_args.maps, "Directory with map_<t>.ahm files (default: --paths)");
  eval->add_option("--shape", eval_args.shape, "Robot shape (shape.cfg)");
  eval->add_option("--shrink", eval_args.shrink, "Torso box reduction [m]")->capture_default_str();
  eval->add_option("--risk-cutoff", eval_args.risk_cutoff, "Risk cutoff")->capture_default_str();
  eval->add_option("--out", eval_args.out, "Output directory for eval.csv and summary.txt");
  eval->add_option("--heatmap", eval_args.heatmap, "Write a cost heat map (PGM)");
  eval->add_option("--threads", eval_args.threads, "Worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*plan) return cmd_plan(plan_args);
    if (*sim) return cmd_simulate(sim_args);
    if (*eval) return cmd_eval(eval_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
