#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "artnav/geometry.hpp"
#include "artnav/mlp.hpp"
#include "artnav/reachability.hpp"
#include "artnav/terrain_map.hpp"

namespace artnav {

/// One candidate transition. The goal offset (dx, dy, dyaw) is expressed in the
/// start body frame; the map patch is the one centered on `start`.
struct MotionQuery {
  Vec2 start;
  double start_yaw = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  double dyaw = 0.0;

  double length() const { return std::hypot(dx, dy); }
};

/// c_t and c_e are normalized time and energy, c_r is a failure probability.
struct MotionCost {
  double c_t = 0.0;
  double c_e = 0.0;
  double c_r = 0.0;
};

class CostWeights {
 public:
  CostWeights() = default;
  /// Throws std::invalid_argument for negative or all-zero weights.
  CostWeights(double w_t, double w_e, double w_r);

  double w_t() const { return w_t_; }
  double w_e() const { return w_e_; }
  double w_r() const { return w_r_; }

 private:
  double w_t_ = 1.0;
  double w_e_ = 0.0;
  double w_r_ = 5.0;
};

double combine(const MotionCost& c, const CostWeights& w);

/// c_r > risk_threshold.
bool exceeds_risk(const MotionCost& c, double risk_threshold);

struct SurrogateParams {
  double v_max = 0.9;        // [m/s]
  double omega_max = 1.0;    // [rad/s]
  double t_norm = 10.0;      // [s]
  double energy_ratio = 0.8;
  double hazard_gain = 0.2;
  double sample_stride = 0.1;  // [m]

  void validate() const;
};

class CostBackend {
 public:
  virtual ~CostBackend() = default;
  virtual MotionCost evaluate(const HeightMap& map, const MotionQuery& q) const = 0;
  /// Lower bound on c_t per meter of planar travel, for an admissible A* heuristic.
  virtual double time_lower_bound_per_meter() const = 0;
  virtual std::string name() const = 0;
};

/// Deterministic analytic stand-in for the learned cost model.
class SurrogateBackend final : public CostBackend {
 public:
  explicit SurrogateBackend(SurrogateParams params = {}, RobotShape shape = RobotShape::anymal_like());

  MotionCost evaluate(const HeightMap& map, const MotionQuery& q) const override;
  double time_lower_bound_per_meter() const override;
  std::string name() const override { return "surrogate"; }

  const SurrogateParams& params() const { return params_; }

  /// Mean hazard (1 - foothold, 1 for unknown or off-grid cells) over the
  /// torso footprint at the given planar pose.
  double footprint_hazard(const HeightMap& map, Vec2 xy, double yaw) const;

 private:
  SurrogateParams params_;
  std::array<double, 4> footprint_;
};

/// Network backend. Input: 16x16 block-mean elevation patch (2.56 m, world
/// aligned, row-major from -x/-y, unknown blocks -1), then sin/cos start yaw,
/// dx, dy, sin/cos dyaw. Outputs go through softplus, softplus, logistic.
class MlpBackend final : public CostBackend {
 public:
  static constexpr int kPatchCells = 16;
  static constexpr double kPatchSize = 2.56;  // [m]
  static constexpr int kInputs = kPatchCells * kPatchCells + 6;

  /// Throws BackendError if the network does not map kInputs to 3 outputs.
  explicit MlpBackend(Mlp net);

  MotionCost evaluate(const HeightMap& map, const MotionQuery& q) const override;
  double time_lower_bound_per_meter() const override { return 0.0; }
  std::string name() const override { return "mlp"; }

  std::vector<double> build_input(const HeightMap& map, const MotionQuery& q) const;
  const Mlp& network() const { return net_; }

 private:
  Mlp net_;
};

/// Loads an `amc 1` file as a cost backend. Throws FormatError or BackendError.
std::unique_ptr<MlpBackend> load_mlp(const std::filesystem::path& path);

/// Evaluates all queries; result i belongs to query i. With threads > 1 the
/// queries are split into contiguous chunks. A failing query is reported as
/// BackendError naming its index (the lowest failing index when several fail).
std::vector<MotionCost> batch_evaluate(const CostBackend& backend, const HeightMap& map,
                                       std::span<const MotionQuery> queries, unsigned threads = 1);

}  // namespace artnav
