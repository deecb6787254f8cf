#include "artnav/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <regex>
#include <thread>

#include "artnav/errors.hpp"

namespace artnav {

EvalRecord evaluate_path(const HeightMap& map, const RobotShape& shape, const NavPath& path, double shrink) {
  const RobotShape reduced = shape.with_shrunk_torso(shrink);
  EvalRecord rec;
  rec.n_poses = static_cast<int>(path.poses.size());
  for (std::size_t i = 1; i < path.poses.size(); ++i) {
    Pose pose = path.poses[i];
    if (const auto fitted = augment_pose(map, shape, pose.x, pose.y, pose.yaw)) {
      pose.roll = fitted->roll;
      pose.pitch = fitted->pitch;
    }
    if (torso_in_collision(map, reduced, pose)) ++rec.colliding;
  }
  rec.collision = rec.colliding > 0;
  if (rec.n_poses >= 3) rec.severe = 3 * rec.colliding > rec.n_poses - 1;
  for (std::size_t i = 0; i < path.segments.size(); ++i) {
    rec.segment_cost.push_back(path.segment_cost[i]);
    rec.segment_risk.push_back(path.segments[i].c_r);
    const Pose& a = path.poses[i];
    const Pose& b = path.poses[i + 1];
    rec.segment_mid.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
  }
  return rec;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

EvalSummary summarize(const std::vector<EvalRecord>& records, double risk_cutoff) {
  EvalSummary s;
  std::vector<double> costs, risks;
  for (const auto& r : records) {
    ++s.n_paths;
    if (r.collision) ++s.n_collision;
    if (r.severe) {
      ++s.n_severe_eligible;
      if (*r.severe) ++s.n_severe;
    }
    costs.insert(costs.end(), r.segment_cost.begin(), r.segment_cost.end());
    risks.insert(risks.end(), r.segment_risk.begin(), r.segment_risk.end());
  }
  if (s.n_paths > 0) s.collision_pct = 100.0 * s.n_collision / s.n_paths;
  if (s.n_severe_eligible > 0) s.severe_pct = 100.0 * s.n_severe / s.n_severe_eligible;
  if (!costs.empty()) s.mean_cost = std::accumulate(costs.begin(), costs.end(), 0.0) / costs.size();
  if (!risks.empty()) s.mean_risk = std::accumulate(risks.begin(), risks.end(), 0.0) / risks.size();
  s.p95_cost = percentile(costs, 0.95);
  s.p95_risk = percentile(risks, 0.95);
  s.n_over_cutoff = static_cast<int>(std::count_if(risks.begin(), risks.end(), [&](double r) { return r > risk_cutoff; }));
  return s;
}

namespace {

std::map<long long, std::filesystem::path> scan(const std::filesystem::path& dir, const std::regex& pattern) {
  if (!std::filesystem::is_directory(dir)) throw FormatError("not a directory: '" + dir.string() + "'");
  std::map<long long, std::filesystem::path> found;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, m, pattern)) continue;
    found.emplace(std::stoll(m[1].str()), entry.path());
  }
  return found;
}

// planning_ms per timestamp token from a plans.csv next to the bundle, if any.
std::map<long long, double> planning_times(const std::filesystem::path& paths_dir) {
  std::map<long long, double> out;
  for (const auto& candidate : {paths_dir / "plans.csv", paths_dir.parent_path() / "plans.csv"}) {
    std::ifstream in(candidate);
    if (!in) continue;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      if (c1 == std::string::npos || c2 == std::string::npos) continue;
      try {
        const double t = parse_double(line.substr(0, c1));
        out[std::llround(t * 1000.0)] = parse_double(line.substr(c1 + 1, c2 - c1 - 1));
      } catch (const FormatError&) {
        continue;
      }
    }
    break;
  }
  return out;
}

}  // namespace

std::vector<EvalRecord> evaluate_bundle(const std::filesystem::path& paths_dir, const std::filesystem::path& maps_dir,
                                        const RobotShape& shape, const EvalOptions& options) {
  const auto paths = scan(paths_dir, std::regex(R"(path_(\d+)\.csv)"));
  const auto maps = scan(maps_dir, std::regex(R"(map_(\d+)\.ahm)"));
  for (const auto& [t, p] : paths) {
    if (!maps.count(t)) throw FormatError("no map snapshot for '" + p.filename().string() + "'");
  }
  for (const auto& [t, m] : maps) {
    if (!paths.count(t)) throw FormatError("no recorded path for '" + m.filename().string() + "'");
  }
  const auto timing = planning_times(paths_dir);

  std::vector<long long> tokens;
  for (const auto& kv : paths) tokens.push_back(kv.first);
  std::vector<EvalRecord> records(tokens.size());
  std::vector<std::string> errors(tokens.size());
  const auto work = [&](std::size_t i) {
    try {
      std::ifstream in(paths.at(tokens[i]));
      const NavPath path = read_path_csv(in, paths.at(tokens[i]).string());
      const HeightMap map = load_map(maps.at(tokens[i]));
      records[i] = evaluate_path(map, shape, path, options.shrink);
      records[i].token = std::to_string(tokens[i]);
      if (const auto it = timing.find(tokens[i]); it != timing.end()) records[i].planning_ms = it->second;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(options.threads, tokens.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < tokens.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < tokens.size(); i += workers) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw FormatError(e);
  }
  return records;
}

void write_eval_csv(std::ostream& out, const std::vector<EvalRecord>& records) {
  out << "token,n_poses,colliding,collision,severe,mean_cost,max_risk,planning_ms\n";
  for (const auto& r : records) {
    const double mean = r.segment_cost.empty()
                            ? 0.0
                            : std::accumulate(r.segment_cost.begin(), r.segment_cost.end(), 0.0) / r.segment_cost.size();
    const double max_risk = r.segment_risk.empty() ? 0.0 : *std::max_element(r.segment_risk.begin(), r.segment_risk.end());
    out << r.token << ',' << r.n_poses << ',' << r.colliding << ',' << (r.collision ? 1 : 0) << ','
        << (r.severe ? (*r.severe ? "1" : "0") : "na") << ',' << format_double(mean) << ','
        << format_double(max_risk) << ',' << format_double(r.planning_ms) << '\n';
  }
}

void write_eval_summary(std::ostream& out, const EvalSummary& s) {
  out << "paths = " << s.n_paths << '\n'
      << "collision_paths = " << s.n_collision << '\n'
      << "collision_pct = " << format_double(s.collision_pct) << '\n'
      << "severe_eligible = " << s.n_severe_eligible << '\n'
      << "severe_paths = " << s.n_severe << '\n'
      << "severe_pct = " << format_double(s.severe_pct) << '\n'
      << "mean_cost = " << format_double(s.mean_cost) << '\n'
      << "p95_cost = " << format_double(s.p95_cost) << '\n'
      << "mean_risk = " << format_double(s.mean_risk) << '\n'
      << "p95_risk = " << format_double(s.p95_risk) << '\n'
      << "segments_over_cutoff = " << s.n_over_cutoff << '\n';
}

void write_cost_heatmap(std::ostream& out, const std::vector<EvalRecord>& records, double cell, double sigma) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const auto& r : records) {
    for (const auto& m : r.segment_mid) {
      x0 = std::min(x0, m.x);
      y0 = std::min(y0, m.y);
      x1 = std::max(x1, m.x);
      y1 = std::max(y1, m.y);
    }
  }
  if (x0 > x1) {
    out << "P2\n# empty\n1 1\n255\n0\n";
    return;
  }
  const double margin = 2.0 * sigma;
  x0 -= margin;
  y0 -= margin;
  x1 += margin;
  y1 += margin;
  const int w = static_cast<int>(std::ceil((x1 - x0) / cell)) + 1;
  const int h = static_cast<int>(std::ceil((y1 - y0) / cell)) + 1;
  std::vector<double> sum(static_cast<std::size_t>(w) * h, 0.0);
  std::vector<double> count(sum.size(), 0.0);
  for (const auto& r : records) {
    for (std::size_t i = 0; i < r.segment_mid.size(); ++i) {
      const int bx = static_cast<int>((r.segment_mid[i].x - x0) / cell);
      const int by = static_cast<int>((r.segment_mid[i].y - y0) / cell);
      sum[static_cast<std::size_t>(by) * w + bx] += r.segment_cost[i];
      count[static_cast<std::size_t>(by) * w + bx] += 1.0;
    }
  }

  // Separable Gaussian applied to sums and counts; the ratio is the smoothed mean.
  const int radius = static_cast<int>(std::ceil(3.0 * sigma / cell));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  for (int k = -radius; k <= radius; ++k) {
    const double d = k * cell;
    kernel[static_cast<std::size_t>(k + radius)] = std::exp(-0.5 * d * d / (sigma * sigma));
  }
  const auto blur = [&](const std::vector<double>& src) {
    std::vector<double> tmp(src.size(), 0.0), dst(src.size(), 0.0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int xx = x + k;
          if (xx >= 0 && xx < w) acc += kernel[static_cast<std::size_t>(k + radius)] * src[static_cast<std::size_t>(y) * w + xx];
        }
        tmp[static_cast<std::size_t>(y) * w + x] = acc;
      }
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int yy = y + k;
          if (yy >= 0 && yy < h) acc += kernel[static_cast<std::size_t>(k + radius)] * tmp[static_cast<std::size_t>(yy) * w + x];
        }
        dst[static_cast<std::size_t>(y) * w + x] = acc;
      }
    }
    return dst;
  };
  const auto s = blur(sum);
  const auto c = blur(count);
  std::vector<double> value(sum.size(), 0.0);
  double vmax = 0.0;
  const double floor_weight = 1e-3 * *std::max_element(c.begin(), c.end());
  for (std::size_t i = 0; i < value.size(); ++i) {
    value[i] = c[i] > floor_weight ? s[i] / c[i] : 0.0;
    vmax = std::max(vmax, value[i]);
  }

  out << "P2\n# cost heat map: 255 = " << format_double(vmax) << ", cell " << format_double(cell) << " m, sigma "
      << format_double(sigma) << " m, origin " << format_double(x0) << ' ' << format_double(y0)
      << ", top row = max y\n"
      << w << ' ' << h << "\n255\n";
  for (int y = h - 1; y >= 0; --y) {
    for (int x = 0; x < w; ++x) {
      const double v = value[static_cast<std::size_t>(y) * w + x];
      const int g = vmax > 0.0 ? static_cast<int>(std::lround(255.0 * v / vmax)) : 0;
      out << g << (x + 1 == w ? '\n' : ' ');
    }
  }
}

}  // namespace artnav
