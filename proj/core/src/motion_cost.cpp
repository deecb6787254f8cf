#include "artnav/motion_cost.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "artnav/errors.hpp"

namespace artnav {

CostWeights::CostWeights(double w_t, double w_e, double w_r) : w_t_(w_t), w_e_(w_e), w_r_(w_r) {
  if (!(w_t >= 0.0) || !(w_e >= 0.0) || !(w_r >= 0.0)) {
    throw std::invalid_argument("cost weights must be non-negative");
  }
  if (w_t == 0.0 && w_e == 0.0 && w_r == 0.0) throw std::invalid_argument("cost weights must not all be zero");
}

double combine(const MotionCost& c, const CostWeights& w) {
  return w.w_t() * c.c_t + w.w_e() * c.c_e + w.w_r() * c.c_r;
}

bool exceeds_risk(const MotionCost& c, double risk_threshold) { return c.c_r > risk_threshold; }

void SurrogateParams::validate() const {
  if (!(v_max > 0.0) || !(omega_max > 0.0) || !(t_norm > 0.0) || !(energy_ratio > 0.0) ||
      !(hazard_gain > 0.0) || !(hazard_gain <= 1.0) || !(sample_stride > 0.0)) {
    throw std::invalid_argument("surrogate parameters must be positive (hazard gain at most 1)");
  }
}

// ---------------------------------------------------------------------------

SurrogateBackend::SurrogateBackend(SurrogateParams params, RobotShape shape)
    : params_(params), footprint_(shape.torso_footprint()) {
  params_.validate();
}

double SurrogateBackend::time_lower_bound_per_meter() const { return 1.0 / (params_.v_max * params_.t_norm); }

double SurrogateBackend::footprint_hazard(const HeightMap& map, Vec2 xy, double yaw) const {
  const auto& fp = footprint_;
  const double c = std::cos(yaw), s = std::sin(yaw);
  const double reach = std::max({std::hypot(fp[0], fp[2]), std::hypot(fp[0], fp[3]), std::hypot(fp[1], fp[2]),
                                 std::hypot(fp[1], fp[3])});
  const double res = map.resolution();
  const Vec2 o = map.origin();
  const auto hazard = [&](int ix, int iy) {
    if (!map.contains({ix, iy})) return 1.0;
    const double f = map.foothold({ix, iy});
    return is_known(f) ? 1.0 - f : 1.0;
  };

  const int ix0 = static_cast<int>(std::ceil((xy.x - reach - o.x) / res - 1e-9));
  const int ix1 = static_cast<int>(std::floor((xy.x + reach - o.x) / res + 1e-9));
  const int iy0 = static_cast<int>(std::ceil((xy.y - reach - o.y) / res - 1e-9));
  const int iy1 = static_cast<int>(std::floor((xy.y + reach - o.y) / res + 1e-9));
  double sum = 0.0;
  int count = 0;
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      const double dx = o.x + res * ix - xy.x;
      const double dy = o.y + res * iy - xy.y;
      const double u = c * dx + s * dy;
      const double v = -s * dx + c * dy;
      if (u < fp[0] || u > fp[1] || v < fp[2] || v > fp[3]) continue;
      sum += hazard(ix, iy);
      ++count;
    }
  }
  if (count == 0) {
    const CellIndex n = map.nearest_cell(xy.x, xy.y);
    return hazard(n.ix, n.iy);
  }
  return sum / count;
}

MotionCost SurrogateBackend::evaluate(const HeightMap& map, const MotionQuery& q) const {
  const double len = q.length();
  MotionCost out;
  out.c_t = (len / params_.v_max + std::abs(q.dyaw) / params_.omega_max) / params_.t_norm;
  out.c_e = params_.energy_ratio * out.c_t;

  const double c = std::cos(q.start_yaw), s = std::sin(q.start_yaw);
  const double wx = c * q.dx - s * q.dy;
  const double wy = s * q.dx + c * q.dy;
  const int samples = len > 0.0 ? static_cast<int>(std::ceil(len / params_.sample_stride)) + 1 : 1;
  double survive = 1.0;
  for (int i = 0; i < samples; ++i) {
    const double t = samples == 1 ? 0.0 : static_cast<double>(i) / (samples - 1);
    const Vec2 p{q.start.x + t * wx, q.start.y + t * wy};
    survive *= 1.0 - params_.hazard_gain * footprint_hazard(map, p, q.start_yaw + t * q.dyaw);
  }
  out.c_r = std::clamp(1.0 - survive, 0.0, 1.0);
  return out;
}

// ---------------------------------------------------------------------------

MlpBackend::MlpBackend(Mlp net) : net_(std::move(net)) {
  if (net_.input_size() != kInputs || net_.output_size() != 3) {
    throw BackendError("cost network must map " + std::to_string(kInputs) + " inputs to 3 outputs, got " +
                       std::to_string(net_.input_size()) + " -> " + std::to_string(net_.output_size()));
  }
}

std::vector<double> MlpBackend::build_input(const HeightMap& map, const MotionQuery& q) const {
  constexpr int n = kPatchCells;
  constexpr double block = kPatchSize / n;
  std::vector<double> sum(n * n, 0.0);
  std::vector<int> count(n * n, 0);

  const double res = map.resolution();
  const Vec2 o = map.origin();
  const double x0 = q.start.x - 0.5 * kPatchSize;
  const double y0 = q.start.y - 0.5 * kPatchSize;
  const int ix0 = std::max(0, static_cast<int>(std::floor((x0 - o.x) / res)));
  const int ix1 = std::min(map.size_x() - 1, static_cast<int>(std::ceil((x0 + kPatchSize - o.x) / res)));
  const int iy0 = std::max(0, static_cast<int>(std::floor((y0 - o.y) / res)));
  const int iy1 = std::min(map.size_y() - 1, static_cast<int>(std::ceil((y0 + kPatchSize - o.y) / res)));
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      const Vec2 p = map.cell_center({ix, iy});
      const int bx = static_cast<int>(std::floor((p.x - x0) / block));
      const int by = static_cast<int>(std::floor((p.y - y0) / block));
      if (bx < 0 || by < 0 || bx >= n || by >= n) continue;
      const double e = map.effective_elevation({ix, iy});
      if (!is_known(e)) continue;
      sum[by * n + bx] += e;
      ++count[by * n + bx];
    }
  }

  std::vector<double> input;
  input.reserve(kInputs);
  for (int k = 0; k < n * n; ++k) input.push_back(count[k] > 0 ? sum[k] / count[k] : -1.0);
  input.push_back(std::sin(q.start_yaw));
  input.push_back(std::cos(q.start_yaw));
  input.push_back(q.dx);
  input.push_back(q.dy);
  input.push_back(std::sin(q.dyaw));
  input.push_back(std::cos(q.dyaw));
  return input;
}

MotionCost MlpBackend::evaluate(const HeightMap& map, const MotionQuery& q) const {
  const auto out = net_.forward(build_input(map, q));
  MotionCost c{softplus(out[0]), softplus(out[1]), logistic(out[2])};
  if (!std::isfinite(c.c_t) || !std::isfinite(c.c_e) || !std::isfinite(c.c_r)) {
    throw BackendError("cost network produced a non-finite output");
  }
  return c;
}

std::unique_ptr<MlpBackend> load_mlp(const std::filesystem::path& path) {
  Mlp net = load_mlp_file(path);
  if (net.input_size() != MlpBackend::kInputs || net.output_size() != 3) {
    throw FormatError(path.string() + ": cost network must map " + std::to_string(MlpBackend::kInputs) +
                      " inputs to 3 outputs");
  }
  return std::make_unique<MlpBackend>(std::move(net));
}

// ---------------------------------------------------------------------------

std::vector<MotionCost> batch_evaluate(const CostBackend& backend, const HeightMap& map,
                                       std::span<const MotionQuery> queries, unsigned threads) {
  std::vector<MotionCost> out(queries.size());
  const std::size_t total = queries.size();
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, total));

  // Each worker records its first failure; the lowest index wins.
  std::vector<std::size_t> fail_index(workers, total);
  std::vector<std::string> fail_message(workers);
  const auto run = [&](std::size_t w, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        out[i] = backend.evaluate(map, queries[i]);
      } catch (const std::exception& e) {
        fail_index[w] = i;
        fail_message[w] = e.what();
        return;
      }
    }
  };

  if (workers == 1) {
    run(0, 0, total);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (total + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(total, w * chunk);
      const std::size_t end = std::min(total, begin + chunk);
      pool.emplace_back(run, w, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  for (std::size_t w = 0; w < workers; ++w) {
    if (fail_index[w] < total) {
      throw BackendError("query " + std::to_string(fail_index[w]) + ": " + fail_message[w]);
    }
  }
  return out;
}

}  // namespace artnav
